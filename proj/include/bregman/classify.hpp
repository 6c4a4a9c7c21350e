#pragma once

// 1-nearest-neighbour classification under an arbitrary Measure with
// leave-one-out and train/test evaluation.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bregman/errors.hpp"
#include "bregman/similarity.hpp"

namespace bregman {

struct LabeledDataset {
  std::vector<FeatureVector> vectors;
  std::vector<std::string> labels;
  std::string name;
  double applied_scale = 1.0;

  std::size_t size() const noexcept { return vectors.size(); }
  std::size_t dimension() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }

  std::size_t distinct_labels() const {
    return std::set<std::string>(labels.begin(), labels.end()).size();
  }

  /// Checks shape invariants: matching lengths, uniform dimension, at least
  /// `min_size` instances.
  void validate(std::size_t min_size = 1) const {
    if (vectors.size() != labels.size())
      throw SchemaError("dataset '" + name + "': " + std::to_string(vectors.size()) +
                        " vectors but " + std::to_string(labels.size()) + " labels");
    if (vectors.size() < min_size)
      throw SchemaError("dataset '" + name + "': need at least " + std::to_string(min_size) +
                        " instances, got " + std::to_string(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].size() != dimension())
        throw DimensionMismatch("dataset '" + name + "': instance " + std::to_string(i) +
                                " has dimension " + std::to_string(vectors[i].size()) +
                                ", expected " + std::to_string(dimension()));
    }
  }
};

enum class Protocol { LeaveOneOut, TrainTestSplit };

inline const char* to_string(Protocol p) {
  return p == Protocol::LeaveOneOut ? "leave-one-out" : "train-test-split";
}

struct Prediction {
  std::size_t index;
  std::string predicted;
  std::string actual;
};

struct EvaluationReport {
  std::string measure_name;
  Protocol protocol = Protocol::LeaveOneOut;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  std::vector<Prediction> per_instance;
};

namespace detail {

// Index of the training instance closest to `query`, skipping `exclude`.
// Ties go to the lowest index.
inline std::size_t nearest_index(const LabeledDataset& train, std::span<const double> query,
                                 const Measure& m, std::optional<std::size_t> exclude,
                                 std::optional<std::size_t> query_index) {
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    if (exclude && *exclude == j) continue;
    double v;
    try {
      v = m(query, train.vectors[j]);
    } catch (const DomainError& e) {
      std::string where = query_index ? "instance " + std::to_string(*query_index) + " vs "
                                      : std::string("query vs ");
      throw DomainError(m.name() + ": " + where + "training instance " + std::to_string(j) +
                            ": " + e.what(),
                        e.component(), query_index ? query_index : std::optional(j));
    }
    if (!best || m.closer(v, best_value)) {
      best = j;
      best_value = v;
    }
  }
  if (!best) throw SchemaError("1-NN needs at least one candidate training instance");
  return *best;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each slot is written
// by exactly one task; the exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline EvaluationReport assemble(std::string measure, Protocol protocol,
                                 std::vector<Prediction> predictions) {
  EvaluationReport r;
  r.measure_name = std::move(measure);
  r.protocol = protocol;
  r.total = predictions.size();
  r.correct = static_cast<std::size_t>(std::count_if(
      predictions.begin(), predictions.end(),
      [](const Prediction& p) { return p.predicted == p.actual; }));
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(r.total);
  r.per_instance = std::move(predictions);
  return r;
}

} // namespace detail

/// Label of the training instance that is closest to `query` under `m`.
inline std::string predict_1nn(const LabeledDataset& train, std::span<const double> query,
                               const Measure& m) {
  train.validate(1);
  detail::require_same_dim(query, train.vectors.front());
  return train.labels[detail::nearest_index(train, query, m, std::nullopt, std::nullopt)];
}

/// Classifies every instance against all the others. `jobs` only affects
/// speed; the report is identical for any value.
inline EvaluationReport leave_one_out(const LabeledDataset& data, const Measure& m,
                                      unsigned jobs = 1) {
  data.validate(2);
  std::vector<Prediction> out(data.size());
  detail::parallel_for(data.size(), jobs, [&](std::size_t i) {
    const std::size_t j = detail::nearest_index(data, data.vectors[i], m, i, i);
    out[i] = Prediction{i, data.labels[j], data.labels[i]};
  });
  return detail::assemble(m.name(), Protocol::LeaveOneOut, std::move(out));
}

inline EvaluationReport train_test_evaluate(const LabeledDataset& train,
                                            const LabeledDataset& test, const Measure& m,
                                            unsigned jobs = 1) {
  train.validate(1);
  test.validate(1);
  if (train.dimension() != test.dimension())
    throw DimensionMismatch("train dimension " + std::to_string(train.dimension()) +
                            " differs from test dimension " + std::to_string(test.dimension()));
  std::vector<Prediction> out(test.size());
  detail::parallel_for(test.size(), jobs, [&](std::size_t i) {
    const std::size_t j = detail::nearest_index(train, test.vectors[i], m, std::nullopt, i);
    out[i] = Prediction{i, train.labels[j], test.labels[i]};
  });
  return detail::assemble(m.name(), Protocol::TrainTestSplit, std::move(out));
}

} // namespace bregman
