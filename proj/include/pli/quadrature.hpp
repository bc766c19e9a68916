#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace pli::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

/// 20-point rule; computed once, thread-safe.
Rule gauss_legendre20();

template <std::size_t M, class F>
std::array<double, M> apply_rule(const F& f, double a, double b) {
  const Rule rule = gauss_legendre20();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::array<double, M> acc{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const std::array<double, M> v = f(mid + half * rule.nodes[k]);
    for (std::size_t j = 0; j < M; ++j) acc[j] += rule.weights[k] * v[j];
  }
  for (auto& x : acc) x *= half;
  return acc;
}

namespace detail {

template <std::size_t M, class F>
std::array<double, M> adapt(const F& f, double a, double b,
                            const std::array<double, M>& whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const auto left = apply_rule<M>(f, a, m);
  const auto right = apply_rule<M>(f, m, b);
  std::array<double, M> sum{};
  double err = 0.0;
  double size = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    sum[j] = left[j] + right[j];
    err = std::max(err, std::abs(sum[j] - whole[j]));
    size = std::max(size, std::abs(sum[j]));
  }
  // Below a few hundred ulps of the estimate, further bisection only
  // chases rounding noise.
  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * size;
  if (err <= std::max(tol, floor) || depth <= 0) return sum;
  const auto l = adapt<M>(f, a, m, left, 0.5 * tol, depth - 1);
  const auto r = adapt<M>(f, m, b, right, 0.5 * tol, depth - 1);
  for (std::size_t j = 0; j < M; ++j) sum[j] = l[j] + r[j];
  return sum;
}

}  // namespace detail

//! Adaptive Gauss-Legendre quadrature of a vector-valued integrand over the
//! compact interval [a, b]. Intervals are bisected until the two-half estimate
//! agrees with the whole-interval estimate within the (split) tolerance.
template <std::size_t M, class F>
std::array<double, M> integrate(const F& f, double a, double b,
                                double abs_tol = 1e-13, int max_depth = 30) {
  const auto whole = apply_rule<M>(f, a, b);
  return detail::adapt<M>(f, a, b, whole, abs_tol, max_depth);
}

template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-13,
                 int max_depth = 30) {
  auto wrapped = [&f](double x) { return std::array<double, 1>{f(x)}; };
  return integrate<1>(wrapped, a, b, abs_tol, max_depth)[0];
}

}  // namespace pli::quad
