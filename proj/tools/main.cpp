#include "cli.hpp"

int main(int argc, char** argv) { return bregman::cli::run(argc, argv); }
