// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.
//
//   acceptance [--only id[,id...]] [--skip id[,id...]] [--gesture-csv path]
//              [--gesture-classes A,B]
//
// The gesture file defaults to $BREGMAN_GESTURE_CSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace bregman;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> check;
};

struct Settings {
  std::string gesture_csv;
  std::vector<std::string> gesture_classes;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli(std::vector<std::string> args, int& code) {
  args.insert(args.begin(), "bregman");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return code == 0 ? out.str() : err.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Outcome gesture(const Settings& s) {
  if (s.gesture_csv.empty() || !fs::exists(s.gesture_csv))
    return {false, "gesture phase dataset not found at '" + s.gesture_csv +
                       "' (set BREGMAN_GESTURE_CSV or -DGESTURE_CSV=...; UCI raw file with "
                       "'timestamp' and 'phase' columns)"};
  const auto t0 = std::chrono::steady_clock::now();
  CsvSchema schema;
  schema.label_column = std::string("phase");
  schema.drop_columns = {std::string("timestamp")};
  LabeledDataset raw = load_csv(s.gesture_csv, schema);
  const auto classes = s.gesture_classes.empty() ? first_classes(raw, 2) : s.gesture_classes;
  const LabeledDataset data = scale_features(filter_classes(raw, classes), 1e7);

  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  const double cos = leave_one_out(data, make_measure("cosine"), jobs).accuracy * 100;
  const double ent = leave_one_out(data, make_measure("bregman-angle-entropy"), jobs).accuracy * 100;
  const double tv = leave_one_out(data, make_measure("bregman-angle-tv"), jobs).accuracy * 100;
  const double elapsed = seconds_since(t0);

  const bool strict = std::abs(cos - 98.0) <= 2.0 && std::abs(ent - 97.5) <= 2.0 && std::abs(tv - 99.0) <= 2.0;
  const bool ordering = tv >= cos && cos >= ent - 1.0 && std::min({cos, ent, tv}) >= 90.0;
  std::string detail = std::to_string(data.size()) + " instances, dim " + std::to_string(data.dimension()) +
                       "; cosine " + fmt(cos) + "%, entropy " + fmt(ent) + "%, TV " + fmt(tv) +
                       "%; " + fmt(elapsed, 3) + " s; tier " +
                       (strict ? "strict" : ordering ? "fallback-ordering" : "none");
  return {(strict || ordering) && elapsed < 10.0, detail};
}

Outcome blobs() {
  std::mt19937_64 gen(2718);
  std::normal_distribution<double> noise(0.0, 0.1);
  auto make = [&](std::size_t per_class) {
    LabeledDataset d;
    d.name = "blobs";
    for (std::size_t i = 0; i < per_class; ++i)
      for (double mean : {-10.0, 10.0}) {
        FeatureVector v(4);
        for (double& x : v) x = mean + noise(gen);
        d.vectors.push_back(v);
        d.labels.push_back(mean < 0 ? "neg" : "pos");
      }
    return d;
  };
  const auto train = make(100), test = make(100);
  const auto r = train_test_evaluate(train, test, make_measure("euclidean"), 2);
  return {r.accuracy == 1.0, "gaussian blobs train/test euclidean accuracy " + fmt(r.accuracy) +
                                 " (" + std::to_string(r.correct) + "/" + std::to_string(r.total) + ")"};
}

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Rng rng(101);
  double worst = 0.0;
  struct Case {
    ConvexCost cost;
    oracle::Scalar f;
    std::function<oracle::Vec(std::size_t)> draw;
  };
  const std::vector<Case> cases{
      {ConvexCost::negative_entropy(), oracle::neg_entropy, [&](std::size_t n) { return rng.vec(n, 0.05, 10); }},
      {ConvexCost::modified_entropy(), oracle::modified_entropy,
       [&](std::size_t n) { return rng.signed_away_from_zero(n, 0.01, 10); }},
      {ConvexCost::squared_l2(), oracle::squared_l2, [&](std::size_t n) { return rng.vec(n, -10, 10); }},
  };
  for (const auto& c : cases)
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = c.draw(rng.index(1, 18));
      const auto g = c.cost.gradient(x).components;
      for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, oracle::rel_err(g[i], oracle::central_difference(c.f, x, i, 1e-6)));
    }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-6 && elapsed < 1.0,
          "worst error " + fmt(worst, 3) + " over 300 points; " + fmt(elapsed, 3) + " s"};
}

Outcome tv_subgradient() {
  oracle::Rng rng(202);
  std::size_t checked = 0, violations = 0;
  for (double sz : {-1.0, 0.0, 1.0})
    for (std::size_t n = 2; n <= 10; ++n)
      for (int pair = 0; pair < 100; ++pair) {
        const auto x = pair % 2 ? rng.with_ties(n) : rng.vec(n, -5, 5);
        const auto y = pair % 3 ? rng.vec(n, -5, 5) : rng.with_ties(n);
        const auto g = subgrad_tv(x, sz).components;
        double lin = 0;
        for (std::size_t i = 0; i < n; ++i) lin += g[i] * (y[i] - x[i]);
        ++checked;
        if (oracle::total_variation(y) < oracle::total_variation(x) + lin - 1e-12) ++violations;
      }
  const oracle::Vec x{1, 2, 3}, y{3, 2, 3};
  const auto lit = subgrad_tv(x, 0.0, true).components;
  double lin = 0;
  for (std::size_t i = 0; i < 3; ++i) lin += lit[i] * (y[i] - x[i]);
  const bool witness = oracle::total_variation(y) < oracle::total_variation(x) + lin - 1e-12;
  return {violations == 0 && witness,
          std::to_string(violations) + " violations in " + std::to_string(checked) +
              " pairs; literal-form witness x=(1,2,3), y=(3,2,3): TV(y)=" +
              fmt(oracle::total_variation(y)) + " < bound " + fmt(oracle::total_variation(x) + lin)};
}

Outcome oracle_equivalence() {
  oracle::Rng rng(303);
  const auto ent = ConvexCost::negative_entropy();
  const auto l2 = ConvexCost::squared_l2();
  double e_closed = 0, e_tangent = 0, e_normals = 0, e_div = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.index(1, 18);
    const auto a = rng.vec(n, 1e-3, 1e3), b = rng.vec(n, 1e-3, 1e3);
    const auto sa = rng.vec(n, -10, 10), sb = rng.vec(n, -10, 10);
    e_closed = std::max(e_closed, std::abs(bregman_angle(ent, a, b) - bregman_angle_entropy(a, b)));
    e_tangent = std::max(e_tangent, std::abs(tangent_similarity(l2, sa, sb) - cosine_similarity(sa, sb)));
    for (const auto& f : {ent, ConvexCost::modified_entropy(), l2}) {
      const double explicit_dot =
          oracle::dot(oracle::unit_normal(f.gradient(a).components), oracle::unit_normal(f.gradient(b).components));
      e_normals = std::max(e_normals, std::abs(bregman_angle(f, a, b) - explicit_dot));
    }
    double sq = 0;
    for (std::size_t i = 0; i < n; ++i) sq += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    if (sq > 0) e_div = std::max(e_div, std::abs(bregman_divergence(l2, sa, sb) - sq) / sq);
  }
  const bool ok = e_closed <= 1e-12 && e_tangent <= 1e-12 && e_normals <= 1e-12 && e_div <= 1e-9;
  return {ok, "entropy closed form " + fmt(e_closed, 2) + ", tangent-l2 vs cosine " + fmt(e_tangent, 2) +
                  ", explicit normals " + fmt(e_normals, 2) + ", l2 divergence rel " + fmt(e_div, 2)};
}

Outcome measure_axioms() {
  oracle::Rng rng(404);
  std::vector<std::string> cosine_type{"cosine"};
  for (const char* fam : {"bregman-angle-", "tangent-"})
    for (const char* c : {"entropy", "modentropy", "tv", "l2"}) cosine_type.push_back(std::string(fam) + c);

  std::size_t failures = 0;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first_failure = what;
  };
  auto draw = [&](std::size_t n) { return rng.vec(n, 0.01, 20); };

  for (const auto& name : cosine_type) {
    const auto m = make_measure(name);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = rng.index(2, 18);
      const auto a = draw(n), b = draw(n);
      const double ab = m(a, b), ba = m(b, a);
      if (ab != ba) fail(name + " asymmetric");
      if (ab < -1 - 1e-12 || ab > 1 + 1e-12) fail(name + " out of range");
      if (std::abs(m(a, a) - 1.0) > 1e-12) fail(name + " self-similarity " + fmt(m(a, a), 17));
    }
  }
  {
    const auto m = make_measure("bregman-angle-tv", {0.0, false, true});
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = rng.index(2, 10);
      const auto a = rng.with_ties(n), b = rng.with_ties(n);
      const double ab = m(a, b);
      if (ab != m(b, a)) fail("max-cosine TV asymmetric");
      if (ab < -1 - 1e-12 || ab > 1 + 1e-12) fail("max-cosine TV out of range");
    }
  }
  const auto eu = make_measure("euclidean");
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.index(1, 18);
    const auto a = rng.vec(n, -20, 20), b = rng.vec(n, -20, 20);
    if (eu(a, b) != eu(b, a) || eu(a, b) < 0 || eu(a, a) != 0) fail("euclidean axiom");
  }
  const auto ent = ConvexCost::negative_entropy();
  const double fwd = bregman_divergence(ent, std::vector{1.0}, std::vector{std::numbers::e});
  const double bwd = bregman_divergence(ent, std::vector{std::numbers::e}, std::vector{1.0});
  const bool witness = std::abs(fwd - bwd) > 1e-3;
  if (!witness) fail("no divergence asymmetry witness");
  return {failures == 0, std::to_string(cosine_type.size() + 2) + " measures x 1000 pairs; divergence witness D(1,e)=" +
                             fmt(fwd) + " vs D(e,1)=" + fmt(bwd) +
                             (failures ? "; first failure: " + first_failure : "")};
}

Outcome figures() {
  auto column = [](const std::string& csv, std::size_t col) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) out.push_back(std::stod(bregman::detail::split_row(line, ',')[col]));
    return out;
  };
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  int code = 0;
  const auto circle = run_cli({"synth", "--shape", "circle", "-m", "euclidean,cosine,bregman-angle-entropy"}, code);
  if (code != 0) return {false, "synth circle failed: " + circle};
  const auto line = run_cli({"synth", "--shape", "line", "-m", "cosine,bregman-angle-entropy"}, code);
  if (code != 0) return {false, "synth line failed: " + line};

  const auto eu = column(circle, 3), cc = column(circle, 4);
  const auto lc = column(line, 3), lb = column(line, 4);
  double euc_dev = 0, line_cos_dev = 0;
  for (double v : eu) euc_dev = std::max(euc_dev, std::abs(v - eu.front()));
  for (double v : lc) line_cos_dev = std::max(line_cos_dev, std::abs(v - 1.0));
  const bool ok = euc_dev <= 1e-9 && spread(cc) > 1e-3 && line_cos_dev <= 1e-12 && spread(lb) > 1e-6;
  return {ok, "circle: euclidean deviation " + fmt(euc_dev, 2) + ", cosine spread " + fmt(spread(cc)) +
                  "; line: cosine deviation " + fmt(line_cos_dev, 2) + ", entropy angle spread " + fmt(spread(lb))};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "bregman_acceptance";
  fs::create_directories(dir);
  const fs::path data = dir / "dataset.csv";
  {
    oracle::Rng rng(505);
    LabeledDataset d;
    for (int i = 0; i < 150; ++i) {
      const bool second = i % 2;
      FeatureVector v(18);
      for (std::size_t c = 0; c < v.size(); ++c) v[c] = rng.uniform(1, 5) + (second ? 0.3 * c : 0.0);
      d.vectors.push_back(v);
      d.labels.push_back(second ? "B" : "A");
    }
    write_csv(data.string(), d);
  }
  std::vector<std::string> outputs;
  for (const char* jobs : {"1", "4", "1", "4"}) {
    const auto out = dir / (std::string("report_") + std::to_string(outputs.size()) + ".json");
    int code = 0;
    const auto msg = run_cli({"bench", "--data", data.string(), "--scale", "1e7", "-m",
                              "cosine,bregman-angle-entropy,bregman-angle-tv", "-j", jobs, "-o", out.string()},
                             code);
    if (code != 0) return {false, "bench failed: " + msg};
    outputs.push_back(slurp(out));
  }
  fs::remove_all(dir);
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto& s) { return s == outputs.front(); });
  return {same && !outputs.front().empty(),
          "4 runs (jobs 1,4,1,4), " + std::to_string(outputs.front().size()) + " bytes each, " +
              (same ? "identical" : "DIFFERENT")};
}

} // namespace

int main(int argc, char** argv) {
  Settings settings;
  if (const char* env = std::getenv("BREGMAN_GESTURE_CSV")) settings.gesture_csv = env;
  std::vector<std::string> only, skip;

  CLI::App app{"Acceptance checks"};
  app.add_option("--only", only, "Run just these criteria")->delimiter(',');
  app.add_option("--skip", skip, "Skip these criteria")->delimiter(',');
  app.add_option("--gesture-csv", settings.gesture_csv, "UCI gesture phase raw CSV");
  app.add_option("--gesture-classes", settings.gesture_classes, "Labels to keep (default: first two)")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"gesture", "gesture phase leave-one-out accuracies", [&] { return gesture(settings); }},
      {"blobs", "1-NN on separable gaussian blobs", blobs},
      {"gradients", "analytic gradients vs central differences", gradients},
      {"tv_subgradient", "TV subgradient inequality and paper-literal witness", tv_subgradient},
      {"oracles", "oracle equivalences", oracle_equivalence},
      {"axioms", "measure axioms", measure_axioms},
      {"figures", "circle/line qualitative behaviour", figures},
      {"determinism", "bench reports byte-identical across runs and jobs", determinism},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    if (std::find(skip.begin(), skip.end(), c.id) != skip.end()) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " - " << c.title << ": " << o.detail << '\n';
  }
  std::cout << ran - failed << "/" << ran << " criteria passed\n";
  return failed == 0 && ran > 0 ? 0 : 1;
}
