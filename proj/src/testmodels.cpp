#include "pli/testmodels.hpp"

#include <cmath>

#include "pli/error.hpp"

namespace pli::models {

LinearGaussianModel::LinearGaussianModel(std::vector<double> coefficients,
                                         std::vector<Marginal> marginals)
    : coefficients_(std::move(coefficients)), marginals_(std::move(marginals)) {
  if (coefficients_.empty() || coefficients_.size() != marginals_.size()) {
    throw Error(ErrorCode::invalid_argument, "one coefficient per marginal required");
  }
  for (const auto& m : marginals_) {
    if (!m.is_normal()) {
      throw Error(ErrorCode::invalid_argument, "linear-Gaussian model needs normal marginals");
    }
  }
}

double LinearGaussianModel::evaluate(std::span<const double> x) const {
  double y = 0.0;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) y += coefficients_[i] * x[i];
  return y;
}

double LinearGaussianModel::output_mean() const { return oracle_output_law(*this).first; }

double LinearGaussianModel::output_sd() const { return oracle_output_law(*this).second; }

std::pair<double, double> oracle_output_law(const LinearGaussianModel& m,
                                            std::optional<Perturbation> p) {
  double mean = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double mu = m.marginals()[i].mean();
    double sigma = m.marginals()[i].sd();
    if (p && p->input == i) {
      // Exponential tilting of a normal law stays normal.
      if (p->kind == PerturbationKind::mean) {
        mu += p->delta_in_sd_units * sigma;
      } else {
        sigma *= 1.0 + p->delta_in_sd_units;
      }
    }
    const double a = m.coefficients()[i];
    mean += a * mu;
    var += a * a * sigma * sigma;
  }
  return {mean, std::sqrt(var)};
}

double oracle_quantile(const LinearGaussianModel& m, double alpha, std::optional<Perturbation> p) {
  const auto [mean, sd] = oracle_output_law(m, p);
  return mean + sd * normal_quantile(alpha);
}

double oracle_exceedance(const LinearGaussianModel& m, double eta, std::optional<Perturbation> p) {
  const auto [mean, sd] = oracle_output_law(m, p);
  return 1.0 - normal_cdf((eta - mean) / sd);
}

namespace {

struct Term {
  double a;
  double b;
  double scale;  // contribution range in kelvin
  double curvature;
};

constexpr std::array<Term, SyntheticStudyModel::kDim> kTerms{{
    {0.8, 1.2, 14.0, 0.5},
    {10.0, 20.0, 4.0, 0.2},
    {0.1, 0.5, 22.0, 1.0},
    {100.0, 200.0, 11.0, 0.3},
    {0.0, 1.0, 9.0, 0.4},
    {2.0, 4.0, 8.0, 0.0},
    {0.5, 1.5, 2.5, 0.2},
    {50.0, 80.0, 1.5, 0.0},
    {-1.0, 1.0, 0.6, 0.1},
}};

}  // namespace

SyntheticStudyModel::SyntheticStudyModel() {
  for (const auto& t : kTerms) marginals_.push_back(Marginal::uniform(t.a, t.b));
}

std::vector<std::string> SyntheticStudyModel::names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kDim; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

double SyntheticStudyModel::evaluate(std::span<const double> x) const {
  std::array<double, kDim> u{};
  for (std::size_t i = 0; i < kDim; ++i) u[i] = (x[i] - kTerms[i].a) / (kTerms[i].b - kTerms[i].a);
  // Each term c (u + k u^2) / (1 + k) is increasing on [0, 1] for k >= 0.
  double y = 550.0;
  for (std::size_t i = 0; i < kDim; ++i) {
    const Term& t = kTerms[i];
    y += kDirection[i] * t.scale * (u[i] + t.curvature * u[i] * u[i]) / (1.0 + t.curvature);
  }
  // Interactions between inputs of equal direction keep the monotonicity.
  y += 6.0 * u[0] * u[3];
  y -= 5.0 * u[2] * u[4];
  return y;
}

Sample generate_sample(std::span<const Marginal> marginals, const Response& response,
                       std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "sample size must be >= 1");
  const std::size_t d = marginals.size();
  const CounterStream root(seed);
  std::vector<std::vector<double>> columns;
  for (std::size_t i = 0; i < d; ++i) columns.push_back(marginals[i].sample(n, root.split(i)));
  std::vector<double> inputs(n * d);
  std::vector<double> outputs(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < d; ++i) inputs[r * d + i] = columns[i][r];
    outputs[r] = response(std::span<const double>(inputs).subspan(r * d, d));
  }
  return Sample(std::move(inputs), d, std::move(outputs));
}

Sample generate_sample(const LinearGaussianModel& m, std::size_t n, std::uint64_t seed) {
  return generate_sample(m.marginals(), [&m](std::span<const double> x) { return m.evaluate(x); },
                         n, seed);
}

Sample generate_sample(const SyntheticStudyModel& m, std::size_t n, std::uint64_t seed) {
  return generate_sample(m.marginals(), [&m](std::span<const double> x) { return m.evaluate(x); },
                         n, seed);
}

}  // namespace pli::models
