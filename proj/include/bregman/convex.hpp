#pragma once

// Convex cost functions, their (sub)gradients and the unit surface normals
// of their graphs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bregman/errors.hpp"

namespace bregman {

using FeatureVector = std::vector<double>;

/// A (sub)gradient of a cost at a point. `is_subgradient_choice` is set when
/// the subdifferential at that point is not a singleton and one element of
/// it had to be picked.
struct Gradient {
  std::vector<double> components;
  bool is_subgradient_choice = false;
};

/// Unit vector [g, -1] / ||[g, -1]|| of length N + 1.
struct SurfaceNormal {
  std::vector<double> components;
};

enum class CostKind { NegativeEntropy, ModifiedEntropy, TotalVariation, SquaredL2 };

/// Subgradient selection for total variation. `sign_zero` is the value used
/// for sign(0) and must lie in [-1, 1]. `paper_literal` flips the sign of the
/// first component to +sign(x2 - x1), which is not a valid subgradient.
struct TvOptions {
  double sign_zero = 0.0;
  bool paper_literal = false;
};

namespace detail {

inline constexpr double inv_e = 1.0 / std::numbers::e;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void require_finite(std::span<const double> x, std::string_view what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw DomainError(std::string(what) + ": component " + std::to_string(i) +
                            " is not finite",
                        i);
  }
}

inline void require_nonempty(std::span<const double> x, std::string_view what) {
  if (x.empty()) throw DimensionError(std::string(what) + ": empty vector");
}

inline void require_positive(std::span<const double> x, std::string_view what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0))
      throw DomainError(std::string(what) + ": component " + std::to_string(i) + " = " +
                            std::to_string(x[i]) +
                            " is not strictly positive (use modified entropy)",
                        i);
  }
}

inline void require_tv_options(const TvOptions& opt) {
  if (!(opt.sign_zero >= -1.0 && opt.sign_zero <= 1.0))
    throw RangeError("sign_zero must lie in [-1, 1], got " + std::to_string(opt.sign_zero));
}

inline double sign_or(double t, double at_zero) {
  if (t > 0.0) return 1.0;
  if (t < 0.0) return -1.0;
  return at_zero;
}

// TV subgradient from per-difference signs u: g_j = u_{j-1} - u_j with
// u_{-1} = u_{N-1} = 0.
inline std::vector<double> tv_from_signs(std::span<const double> u) {
  const std::size_t n = u.size() + 1;
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] -= u[i];
    g[i + 1] += u[i];
  }
  return g;
}

} // namespace detail

/// Gradient of sum x log x: log(x_i) + 1. Rejects non-positive components.
inline Gradient grad_neg_entropy(std::span<const double> x) {
  detail::require_nonempty(x, "negative entropy");
  detail::require_finite(x, "negative entropy");
  detail::require_positive(x, "negative entropy");
  Gradient g;
  g.components.resize(x.size());
  std::transform(x.begin(), x.end(), g.components.begin(),
                 [](double v) { return std::log(v) + 1.0; });
  return g;
}

/// Gradient of sum (|x|+1/e) log(|x|+1/e) + 1/e:
/// sign(x_i) (log(|x_i| + 1/e) + 1), which is 0 at x_i = 0.
inline Gradient grad_modified_entropy(std::span<const double> x) {
  detail::require_nonempty(x, "modified entropy");
  detail::require_finite(x, "modified entropy");
  Gradient g;
  g.components.resize(x.size());
  std::transform(x.begin(), x.end(), g.components.begin(), [](double v) {
    if (v == 0.0) return 0.0;
    const double mag = std::log(std::abs(v) + detail::inv_e) + 1.0;
    return v > 0.0 ? mag : -mag;
  });
  return g;
}

/// Subgradient of TV(x) = sum_{i<N-1} |x_{i+1} - x_i| (no wraparound).
inline Gradient subgrad_tv(std::span<const double> x, double sign_zero = 0.0,
                           bool paper_literal = false) {
  if (x.size() < 2)
    throw DimensionError("total variation needs at least 2 components, got " +
                         std::to_string(x.size()));
  detail::require_tv_options({sign_zero, paper_literal});
  detail::require_finite(x, "total variation");

  std::vector<double> u(x.size() - 1);
  bool choice = false;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double d = x[i + 1] - x[i];
    choice = choice || d == 0.0;
    u[i] = detail::sign_or(d, sign_zero);
  }
  Gradient g{detail::tv_from_signs(u), choice};
  if (paper_literal) g.components.front() = u.front();
  return g;
}

inline Gradient grad_sq_l2(std::span<const double> x) {
  detail::require_nonempty(x, "squared l2");
  detail::require_finite(x, "squared l2");
  Gradient g;
  g.components.resize(x.size());
  std::transform(x.begin(), x.end(), g.components.begin(), [](double v) { return 2.0 * v; });
  return g;
}

/// [g, -1] scaled to unit length. The denominator is at least 1.
inline SurfaceNormal surface_normal(std::span<const double> g) {
  detail::require_finite(g, "surface normal");
  const double norm = std::sqrt(detail::dot(g, g) + 1.0);
  SurfaceNormal n;
  n.components.reserve(g.size() + 1);
  for (double v : g) n.components.push_back(v / norm);
  n.components.push_back(-1.0 / norm);
  return n;
}

inline SurfaceNormal surface_normal(const Gradient& g) { return surface_normal(g.components); }

/// One of the four supported convex costs plus its subgradient options.
class ConvexCost {
public:
  static ConvexCost negative_entropy() { return ConvexCost(CostKind::NegativeEntropy, {}); }
  static ConvexCost modified_entropy() { return ConvexCost(CostKind::ModifiedEntropy, {}); }
  static ConvexCost squared_l2() { return ConvexCost(CostKind::SquaredL2, {}); }
  static ConvexCost total_variation(TvOptions opt = {}) {
    detail::require_tv_options(opt);
    return ConvexCost(CostKind::TotalVariation, opt);
  }

  CostKind kind() const noexcept { return kind_; }
  const TvOptions& tv_options() const noexcept { return tv_; }
  bool differentiable() const noexcept { return kind_ != CostKind::TotalVariation; }

  std::string_view name() const noexcept {
    switch (kind_) {
    case CostKind::NegativeEntropy: return "negative-entropy";
    case CostKind::ModifiedEntropy: return "modified-entropy";
    case CostKind::TotalVariation: return "total-variation";
    case CostKind::SquaredL2: return "squared-l2";
    }
    return "unknown";
  }

  /// Throws if x is outside the domain of the cost.
  void check_domain(std::span<const double> x) const {
    if (kind_ == CostKind::TotalVariation) {
      if (x.size() < 2)
        throw DimensionError("total variation needs at least 2 components, got " +
                             std::to_string(x.size()));
    } else {
      detail::require_nonempty(x, name());
    }
    detail::require_finite(x, name());
    if (kind_ == CostKind::NegativeEntropy) detail::require_positive(x, name());
  }

  double value(std::span<const double> x) const {
    check_domain(x);
    double s = 0.0;
    switch (kind_) {
    case CostKind::NegativeEntropy:
      for (double v : x) s += v * std::log(v);
      break;
    case CostKind::ModifiedEntropy:
      for (double v : x) {
        const double a = std::abs(v) + detail::inv_e;
        s += a * std::log(a) + detail::inv_e;
      }
      break;
    case CostKind::TotalVariation:
      for (std::size_t i = 0; i + 1 < x.size(); ++i) s += std::abs(x[i + 1] - x[i]);
      break;
    case CostKind::SquaredL2:
      for (double v : x) s += v * v;
      break;
    }
    return s;
  }

  /// Gradient, or the canonical subgradient (sign(0) := sign_zero) for TV.
  Gradient gradient(std::span<const double> x) const {
    switch (kind_) {
    case CostKind::NegativeEntropy: return grad_neg_entropy(x);
    case CostKind::ModifiedEntropy: return grad_modified_entropy(x);
    case CostKind::TotalVariation: return subgrad_tv(x, tv_.sign_zero, tv_.paper_literal);
    case CostKind::SquaredL2: return grad_sq_l2(x);
    }
    throw UnsupportedCost("unknown cost kind");
  }

private:
  ConvexCost(CostKind kind, TvOptions tv) : kind_(kind), tv_(tv) {}

  CostKind kind_;
  TvOptions tv_;
};

/// Picks the subgradient of `f` at `x` whose surface normal has the largest
/// cosine with `reference`. Only TV has a non-singleton subdifferential; its
/// elements are parametrised by t_j in [-1, 1], one per zero difference, and
/// the cosine is maximised by exact coordinate ascent over those parameters.
/// The returned subgradient is always valid (the paper-literal sign flip is
/// not applied).
inline Gradient select_max_cosine_subgradient(const ConvexCost& f, std::span<const double> x,
                                              const SurfaceNormal& reference,
                                              double tolerance = 1e-9, int max_sweeps = 200) {
  if (f.kind() != CostKind::TotalVariation)
    throw UnsupportedCost("subgradient selection requested for differentiable cost " +
                          std::string(f.name()));
  f.check_domain(x);
  const std::size_t n = x.size();
  if (reference.components.size() != n + 1)
    throw DimensionMismatch("reference normal has " +
                            std::to_string(reference.components.size()) +
                            " components, expected " + std::to_string(n + 1));

  std::vector<double> u(n - 1);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    if (d == 0.0) free.push_back(i);
    u[i] = detail::sign_or(d, f.tv_options().sign_zero);
  }
  if (free.empty()) return Gradient{detail::tv_from_signs(u), false};

  const std::span<const double> head(reference.components.data(), n);
  const double last = reference.components.back();
  auto cosine_of = [&](std::span<const double> g) {
    return (detail::dot(g, head) - last) / std::sqrt(detail::dot(g, g) + 1.0);
  };

  std::vector<double> g = detail::tv_from_signs(u);
  double best = cosine_of(g);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double start = best;
    for (std::size_t i : free) {
      // g(t) = a + t c with c = e_{i+1} - e_i; cos(t) = (alpha + beta t) / sqrt(q(t)),
      // q(t) = gamma + 2 delta t + 2 t^2. d/dt cos has a single root.
      std::vector<double> a = g;
      a[i] += u[i];
      a[i + 1] -= u[i];
      const double alpha = detail::dot(a, head) - last;
      const double beta = head[i + 1] - head[i];
      const double gamma = detail::dot(a, a) + 1.0;
      const double delta = a[i + 1] - a[i];
      auto eval = [&](double t) {
        return (alpha + beta * t) / std::sqrt(gamma + 2.0 * delta * t + 2.0 * t * t);
      };

      double t_best = u[i];
      double v_best = eval(t_best);
      std::vector<double> candidates{-1.0, 1.0};
      const double denom = beta * delta - 2.0 * alpha;
      if (denom != 0.0) {
        const double t_star = (alpha * delta - beta * gamma) / denom;
        if (std::isfinite(t_star)) candidates.push_back(std::clamp(t_star, -1.0, 1.0));
      }
      for (double t : candidates) {
        const double v = eval(t);
        if (v > v_best) {
          v_best = v;
          t_best = t;
        }
      }
      u[i] = t_best;
      a[i] -= t_best;
      a[i + 1] += t_best;
      g = std::move(a);
    }
    best = cosine_of(g);
    if (best - start < tolerance) break;
  }
  return Gradient{std::move(g), true};
}

} // namespace bregman
