#include "pli/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "pli/error.hpp"

namespace pli {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "normal quantile requires p in (0, 1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Marginal Marginal::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw Error(ErrorCode::invalid_argument, "uniform marginal requires finite a < b");
  }
  return Marginal(Uniform{a, b});
}

Marginal Marginal::normal(double mu, double sigma) {
  if (!(std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "normal marginal requires sigma > 0");
  }
  return Marginal(Normal{mu, sigma});
}

double Marginal::pdf(double x) const {
  return std::visit(
      overloaded{
          [x](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
          [x](const Normal& n) { return normal_pdf((x - n.mu) / n.sigma) / n.sigma; },
      },
      family_);
}

double Marginal::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const Uniform& u) {
            if (x <= u.a) return 0.0;
            if (x >= u.b) return 1.0;
            return (x - u.a) / (u.b - u.a);
          },
          [x](const Normal& n) { return normal_cdf((x - n.mu) / n.sigma); },
      },
      family_);
}

double Marginal::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "quantile requires p in (0, 1)");
  }
  return std::visit(
      overloaded{
          [p](const Uniform& u) { return u.a + p * (u.b - u.a); },
          [p](const Normal& n) { return n.mu + n.sigma * normal_quantile(p); },
      },
      family_);
}

double Marginal::mean() const {
  return std::visit(overloaded{
                        [](const Uniform& u) { return 0.5 * (u.a + u.b); },
                        [](const Normal& n) { return n.mu; },
                    },
                    family_);
}

double Marginal::sd() const {
  return std::visit(overloaded{
                        [](const Uniform& u) { return std::abs(u.b - u.a) / std::sqrt(12.0); },
                        [](const Normal& n) { return n.sigma; },
                    },
                    family_);
}

double Marginal::lower() const {
  if (const auto* u = std::get_if<Uniform>(&family_)) return u->a;
  return -std::numeric_limits<double>::infinity();
}

double Marginal::upper() const {
  if (const auto* u = std::get_if<Uniform>(&family_)) return u->b;
  return std::numeric_limits<double>::infinity();
}

std::vector<double> Marginal::sample(std::size_t n, std::uint64_t seed) const {
  return sample(n, CounterStream(seed));
}

std::vector<double> Marginal::sample(std::size_t n, const CounterStream& stream) const {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = quantile(stream.uniform(k));
  return out;
}

std::string Marginal::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&os](const Uniform& u) { os << "uniform(" << u.a << ", " << u.b << ")"; },
                 [&os](const Normal& n) { os << "normal(" << n.mu << ", " << n.sigma << ")"; },
             },
             family_);
  return os.str();
}

}  // namespace pli
