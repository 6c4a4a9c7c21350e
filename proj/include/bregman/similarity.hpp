#pragma once

// Similarity and distance measures built on convex costs, plus a uniform
// Measure handle carrying the ordering direction used by nearest-neighbour
// search.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bregman/convex.hpp"
#include "bregman/errors.hpp"

namespace bregman {

namespace detail {

inline void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
}

inline double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

} // namespace detail

struct AngleOptions {
  /// At points where TV is not differentiable, choose the subgradient whose
  /// normal is closest to the other vector's canonical normal.
  bool max_cosine_subgradient = false;
};

/// Cosine of the angle between the unit surface normals of f at x1 and x2:
/// (g1.g2 + 1) / (sqrt(g1.g1 + 1) sqrt(g2.g2 + 1)).
///
/// With max_cosine_subgradient, each side is optimised in turn against the
/// other's canonical normal and the larger cosine is kept, so the measure
/// stays symmetric.
inline double bregman_angle(const ConvexCost& f, std::span<const double> x1,
                            std::span<const double> x2, AngleOptions opt = {}) {
  detail::require_same_dim(x1, x2);
  const Gradient g1 = f.gradient(x1);
  const Gradient g2 = f.gradient(x2);
  auto angle = [](const std::vector<double>& a, const std::vector<double>& b) {
    const double num = detail::dot(a, b) + 1.0;
    return num / (std::sqrt(detail::dot(a, a) + 1.0) * std::sqrt(detail::dot(b, b) + 1.0));
  };
  double c = angle(g1.components, g2.components);
  if (opt.max_cosine_subgradient && f.kind() == CostKind::TotalVariation &&
      (g1.is_subgradient_choice || g2.is_subgradient_choice)) {
    if (g2.is_subgradient_choice) {
      const Gradient best2 = select_max_cosine_subgradient(f, x2, surface_normal(g1));
      c = std::max(c, angle(g1.components, best2.components));
    }
    if (g1.is_subgradient_choice) {
      const Gradient best1 = select_max_cosine_subgradient(f, x1, surface_normal(g2));
      c = std::max(c, angle(best1.components, g2.components));
    }
  }
  return detail::clamp_unit(c);
}

/// Closed form of the Bregman angle under negative entropy, written
/// directly in terms of log(x) + 1.
inline double bregman_angle_entropy(std::span<const double> x1, std::span<const double> x2) {
  detail::require_same_dim(x1, x2);
  detail::require_nonempty(x1, "negative entropy");
  detail::require_finite(x1, "negative entropy");
  detail::require_finite(x2, "negative entropy");
  detail::require_positive(x1, "negative entropy");
  detail::require_positive(x2, "negative entropy");
  double cross = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double a = std::log(x1[i]) + 1.0;
    const double b = std::log(x2[i]) + 1.0;
    cross += a * b;
    s1 += a * a;
    s2 += b * b;
  }
  return detail::clamp_unit((cross + 1.0) / (std::sqrt(s1 + 1.0) * std::sqrt(s2 + 1.0)));
}

inline double cosine_similarity(std::span<const double> x1, std::span<const double> x2) {
  detail::require_same_dim(x1, x2);
  const double n1 = detail::dot(x1, x1);
  const double n2 = detail::dot(x2, x2);
  if (n1 == 0.0 || n2 == 0.0) throw ZeroVector("cosine similarity of a zero vector");
  return detail::clamp_unit(detail::dot(x1, x2) / (std::sqrt(n1) * std::sqrt(n2)));
}

/// Plain cosine between the gradients of f at x1 and x2.
inline double tangent_similarity(const ConvexCost& f, std::span<const double> x1,
                                 std::span<const double> x2) {
  detail::require_same_dim(x1, x2);
  const Gradient g1 = f.gradient(x1);
  const Gradient g2 = f.gradient(x2);
  const double n1 = std::sqrt(detail::dot(g1.components, g1.components));
  const double n2 = std::sqrt(detail::dot(g2.components, g2.components));
  if (n1 < 1e-300 || n2 < 1e-300)
    throw ZeroGradient("tangent similarity undefined: gradient of " + std::string(f.name()) +
                       " vanishes");
  return detail::clamp_unit(detail::dot(g1.components, g2.components) / (n1 * n2));
}

/// Non-squared Euclidean distance.
inline double euclidean_distance(std::span<const double> x1, std::span<const double> x2) {
  detail::require_same_dim(x1, x2);
  double s = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double d = x1[i] - x2[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// f(x1) - f(x2) - grad f(x2) . (x1 - x2). Not symmetric.
inline double bregman_divergence(const ConvexCost& f, std::span<const double> x1,
                                 std::span<const double> x2) {
  detail::require_same_dim(x1, x2);
  const Gradient g2 = f.gradient(x2);
  double lin = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) lin += g2.components[i] * (x1[i] - x2[i]);
  return f.value(x1) - f.value(x2) - lin;
}

enum class Direction { HigherIsCloser, LowerIsCloser };

struct SimilarityValue {
  double value;
  std::string measure_name;
};

/// A named comparison function with an ordering direction.
class Measure {
public:
  using Fn = std::function<double(std::span<const double>, std::span<const double>)>;

  Measure(std::string name, Direction direction, Fn fn,
          std::optional<ConvexCost> cost = std::nullopt)
      : name_(std::move(name)), direction_(direction), fn_(std::move(fn)), cost_(cost) {}

  const std::string& name() const noexcept { return name_; }
  Direction direction() const noexcept { return direction_; }
  const std::optional<ConvexCost>& cost() const noexcept { return cost_; }

  double operator()(std::span<const double> a, std::span<const double> b) const {
    return fn_(a, b);
  }

  SimilarityValue evaluate(std::span<const double> a, std::span<const double> b) const {
    return {fn_(a, b), name_};
  }

  /// True when `candidate` is strictly closer than `incumbent`.
  bool closer(double candidate, double incumbent) const noexcept {
    return direction_ == Direction::HigherIsCloser ? candidate > incumbent
                                                   : candidate < incumbent;
  }

private:
  std::string name_;
  Direction direction_;
  Fn fn_;
  std::optional<ConvexCost> cost_;
};

struct MeasureOptions {
  double sign_zero = 0.0;
  bool paper_literal = false;
  bool max_cosine_subgradient = false;
};

namespace detail {

inline std::optional<ConvexCost> cost_from_suffix(std::string_view suffix, const MeasureOptions& o) {
  if (suffix == "entropy") return ConvexCost::negative_entropy();
  if (suffix == "modentropy") return ConvexCost::modified_entropy();
  if (suffix == "tv") return ConvexCost::total_variation({o.sign_zero, o.paper_literal});
  if (suffix == "l2") return ConvexCost::squared_l2();
  return std::nullopt;
}

} // namespace detail

/// Names accepted by make_measure.
inline std::vector<std::string> measure_names() {
  std::vector<std::string> out{"cosine", "euclidean"};
  for (const char* family : {"bregman-angle-", "tangent-", "bregman-divergence-"})
    for (const char* cost : {"entropy", "modentropy", "tv", "l2"})
      out.push_back(std::string(family) + cost);
  return out;
}

/// Builds a measure from its command-line name, e.g. "bregman-angle-tv".
/// Throws std::invalid_argument for unknown names.
inline Measure make_measure(std::string_view name, const MeasureOptions& opt = {}) {
  if (name == "cosine")
    return Measure("cosine", Direction::HigherIsCloser,
                   [](auto a, auto b) { return cosine_similarity(a, b); });
  if (name == "euclidean")
    return Measure("euclidean", Direction::LowerIsCloser,
                   [](auto a, auto b) { return euclidean_distance(a, b); });

  constexpr std::array<std::string_view, 3> families{"bregman-angle-", "tangent-",
                                                     "bregman-divergence-"};
  for (std::size_t fam = 0; fam < families.size(); ++fam) {
    if (!name.starts_with(families[fam])) continue;
    auto cost = detail::cost_from_suffix(name.substr(families[fam].size()), opt);
    if (!cost) break;
    const ConvexCost f = *cost;
    switch (fam) {
    case 0: {
      const AngleOptions ao{opt.max_cosine_subgradient};
      return Measure(std::string(name), Direction::HigherIsCloser,
                     [f, ao](auto a, auto b) { return bregman_angle(f, a, b, ao); }, f);
    }
    case 1:
      return Measure(std::string(name), Direction::HigherIsCloser,
                     [f](auto a, auto b) { return tangent_similarity(f, a, b); }, f);
    default:
      return Measure(std::string(name), Direction::LowerIsCloser,
                     [f](auto a, auto b) { return bregman_divergence(f, a, b); }, f);
    }
  }
  throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
}

} // namespace bregman
