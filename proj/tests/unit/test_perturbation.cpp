#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "pli/error.hpp"
#include "pli/perturbation.hpp"
#include "pli/quadrature.hpp"

namespace pli {
namespace {

using boost::math::quadrature::gauss_kronrod;

// Independent oracle: adaptive Gauss-Kronrod over the base support.
template <class F>
double oracle_integral(const TiltedDensity& t, F f) {
  const Marginal& b = t.base();
  const double lo = b.bounded() ? b.lower() : b.mean() - 12.0 * b.sd();
  const double hi = b.bounded() ? b.upper() : b.mean() + 12.0 * b.sd();
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

void expect_moments(const TiltedDensity& t, double tol) {
  const double mass = oracle_integral(t, [&t](double x) { return t.pdf(x); });
  EXPECT_NEAR(mass, 1.0, tol);
  for (const auto& k : t.constraints()) {
    const double realized = oracle_integral(t, [&t, &k](double x) {
      return t.pdf(x) * (k.psi == Moment::raw_x ? x : x * x);
    });
    EXPECT_NEAR(realized, k.target, tol * std::max(1.0, std::abs(k.target)));
  }
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  const auto rule = quad::gauss_legendre20();
  EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 2.0, 1e-14);
  // A 20-point rule integrates degree 39 exactly.
  const double v = quad::integrate([](double x) { return std::pow(x, 38); }, -1.0, 1.0);
  EXPECT_NEAR(v, 2.0 / 39.0, 1e-15);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(60.0 * x); }, 0.0, 1.0),
              std::expm1(60.0) / 60.0, 1e-13 * std::exp(60.0) / 60.0);
}

TEST(SolveTilting, ZeroPerturbationIsIdentity) {
  const auto base = Marginal::uniform(0.0, 1.0);
  const auto t = solve_tilting(base, {{Moment::raw_x, 0.5}});
  EXPECT_TRUE(t.is_identity());
  EXPECT_EQ(t.lambdas(), std::vector<double>{0.0});
  EXPECT_EQ(t.log_normalizer(), 0.0);
}

TEST(SolveTilting, UniformMeanTarget) {
  const auto t = solve_tilting(Marginal::uniform(0.0, 1.0), {{Moment::raw_x, 0.6}});
  // Root of 1/(1 - e^-l) - 1/l = 0.6, computed independently.
  EXPECT_NEAR(t.lambdas()[0], 1.22993320038195, 1e-9);
  EXPECT_NEAR(t.log_normalizer(), 0.677221234662444, 1e-9);
  expect_moments(t, 1e-10);
}

TEST(SolveTilting, NormalMeanTiltIsAShift) {
  const auto base = Marginal::normal(2.0, 3.0);
  const double delta = 1.5;
  const auto t = solve_tilting(base, {{Moment::raw_x, 2.0 + delta}});
  EXPECT_NEAR(t.lambdas()[0], delta / 9.0, 1e-12);
  const auto shifted = Marginal::normal(2.0 + delta, 3.0);
  for (double x : {-5.0, 0.0, 2.0, 3.5, 9.0}) {
    EXPECT_NEAR(t.pdf(x), shifted.pdf(x), 1e-13);
    EXPECT_NEAR(t.cdf(x), shifted.cdf(x), 1e-13);
  }
}

TEST(SolveTilting, SecondMomentOnlyOnOffsetSupport) {
  const auto base = Marginal::uniform(1.0, 2.0);
  const auto t = solve_tilting(base, {{Moment::raw_x_squared, 2.5}});
  expect_moments(t, 1e-10);
  EXPECT_GT(t.lambdas()[0], 0.0);
}

TEST(SolveTilting, RejectsMalformedConstraintSets) {
  const auto base = Marginal::uniform(0.0, 1.0);
  EXPECT_EQ(code_of([&] { solve_tilting(base, {}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { solve_tilting(base, {{Moment::raw_x, 0.4}, {Moment::raw_x, 0.6}}); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { solve_tilting(base, {{Moment::raw_x, 1.0}}); }),
            ErrorCode::target_unachievable);
  EXPECT_EQ(code_of([&] { solve_tilting(base, {{Moment::raw_x, -0.1}}); }),
            ErrorCode::target_unachievable);
  // Variance above the two-point bound (m - a)(b - m) = 0.25.
  EXPECT_EQ(code_of([&] {
              solve_tilting(base, {{Moment::raw_x, 0.5}, {Moment::raw_x_squared, 0.25 + 0.26}});
            }),
            ErrorCode::target_unachievable);
  EXPECT_EQ(code_of([&] {
              solve_tilting(base, {{Moment::raw_x, 0.5}, {Moment::raw_x_squared, 0.25}});
            }),
            ErrorCode::target_unachievable);
}

TEST(PerturbMean, Examples) {
  const auto base = Marginal::uniform(0.0, 1.0);
  EXPECT_TRUE(perturb_mean(base, 0.0).is_identity());
  EXPECT_TRUE(perturb_mean(Marginal::normal(1.0, 2.0), 0.0).is_identity());

  const auto t = perturb_mean(base, 1.0);
  EXPECT_NEAR(t.constraints()[0].target, 0.5 + 1.0 / std::sqrt(12.0), 1e-15);
  EXPECT_NEAR(t.lambdas()[0], 4.4911623355861, 1e-8);
  expect_moments(t, 1e-10);
  EXPECT_NEAR(t.mean(), 0.5 + 1.0 / std::sqrt(12.0), 1e-10);

  EXPECT_EQ(code_of([&] { perturb_mean(base, 1.8); }), ErrorCode::target_unachievable);
  EXPECT_EQ(code_of([&] { perturb_mean(base, -std::sqrt(3.0)); }), ErrorCode::target_unachievable);
  EXPECT_EQ(code_of([&] { perturb_mean(base, std::sqrt(3.0)); }), ErrorCode::target_unachievable);
}

TEST(PerturbMean, LambdaGrowsTowardTheBound) {
  const auto base = Marginal::uniform(0.0, 1.0);
  double previous = 0.0;
  for (double d : {0.01, 0.5, 1.0, 1.5, 1.7, 1.72}) {
    const auto t = perturb_mean(base, d);
    EXPECT_GT(t.lambdas()[0], previous) << d;
    previous = t.lambdas()[0];
    expect_moments(t, 1e-9);
  }
  EXPECT_GT(previous, 50.0);
  EXPECT_LT(std::abs(perturb_mean(base, 1e-6).lambdas()[0]), 1e-4);
  // Antisymmetric for a symmetric base.
  EXPECT_NEAR(perturb_mean(base, -1.2).lambdas()[0], -perturb_mean(base, 1.2).lambdas()[0], 1e-9);
}

TEST(PerturbMean, NearBoundaryDiagnostic) {
  const auto base = Marginal::uniform(0.0, 1.0);
  EXPECT_FALSE(perturb_mean(base, 1.0).diagnostics().near_boundary);
  EXPECT_TRUE(perturb_mean(base, 1.72).diagnostics().near_boundary);
  EXPECT_TRUE(perturb_mean(base, -1.72).diagnostics().near_boundary);
}

TEST(PerturbSd, Examples) {
  const auto base = Marginal::uniform(0.0, 1.0);
  EXPECT_TRUE(perturb_sd(base, 0.0).is_identity());

  const auto t = perturb_sd(base, -0.3);
  EXPECT_NEAR(t.sd(), 0.7 / std::sqrt(12.0), 1e-9);
  EXPECT_NEAR(t.mean(), 0.5, 1e-9);
  expect_moments(t, 1e-10);
  EXPECT_NEAR(t.lambdas()[0], 10.6319928293, 1e-6);
  EXPECT_NEAR(t.lambdas()[1], -10.6319928293, 1e-6);

  const auto g = perturb_sd(Marginal::normal(0.0, 1.0), 0.5);
  const auto wide = Marginal::normal(0.0, 1.5);
  for (double x : {-4.0, -1.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(g.pdf(x), wide.pdf(x), 1e-13);

  // sd limit on a uniform support is sqrt(3) sd.
  EXPECT_EQ(code_of([&] { perturb_sd(base, std::sqrt(3.0) - 1.0 + 1e-9); }),
            ErrorCode::target_unachievable);
  EXPECT_EQ(code_of([&] { perturb_sd(base, -1.0); }), ErrorCode::target_unachievable);
  EXPECT_NO_THROW(perturb_sd(base, 0.7));
}

TEST(PerturbSd, SupportFarFromOrigin) {
  const auto base = Marginal::uniform(300.0, 400.0);
  for (double d : {-0.5, 0.4}) {
    const auto t = perturb_sd(base, d);
    EXPECT_NEAR(t.mean(), 350.0, 1e-9);
    EXPECT_NEAR(t.sd(), base.sd() * (1.0 + d), 1e-9);
    expect_moments(t, 1e-12);
  }
  // Narrow support with a mean thousands of sds from the origin.
  const auto narrow = Marginal::uniform(36.3671, 36.4071);
  for (double d : {-0.9, 0.5538, 0.7}) {
    const auto t = perturb_sd(narrow, d);
    EXPECT_NEAR(t.mean(), narrow.mean(), 1e-10 * narrow.mean());
    EXPECT_NEAR(t.sd(), narrow.sd() * (1.0 + d), 1e-8 * narrow.sd());
  }
}

TEST(LikelihoodRatio, Examples) {
  const auto base = Marginal::uniform(0.0, 1.0);
  const auto id = perturb_mean(base, 0.0);
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(likelihood_ratio(id, x), 1.0);

  const auto t = solve_tilting(base, {{Moment::raw_x, 0.6}});
  EXPECT_NEAR(likelihood_ratio(t, 1.0) / likelihood_ratio(t, 0.0), std::exp(t.lambdas()[0]), 1e-12);
  EXPECT_THROW(likelihood_ratio(t, 1.01), Error);
  EXPECT_EQ(code_of([&] { likelihood_ratio(t, -0.5); }), ErrorCode::out_of_support);

  const auto g = perturb_mean(Marginal::normal(0.0, 1.0), 0.5);
  for (double x : {-3.0, 0.0, 1.0, 4.0}) {
    EXPECT_NEAR(likelihood_ratio(g, x), std::exp(0.5 * x - 0.125), 1e-12 * std::exp(0.5 * x));
  }
}

TEST(KlDivergence, Examples) {
  EXPECT_EQ(kl_divergence(perturb_mean(Marginal::uniform(0.0, 1.0), 0.0)), 0.0);
  for (double d : {0.5, -1.3}) {
    EXPECT_NEAR(kl_divergence(perturb_mean(Marginal::normal(0.0, 1.0), d)), d * d / 2.0, 1e-12);
  }
  const auto t = solve_tilting(Marginal::uniform(0.0, 1.0), {{Moment::raw_x, 0.6}});
  EXPECT_NEAR(kl_divergence(t), 0.0607386855667292, 1e-9);
  const double quadrature = oracle_integral(t, [&t](double x) {
    const double p = t.pdf(x);
    return p * std::log(p);  // base density is 1
  });
  EXPECT_NEAR(kl_divergence(t), quadrature, 1e-6);
}

// Alternative densities with the same support, mass and constrained moments:
// p(x) = f_delta(x) (1 + eps g(x)), g made orthogonal to 1 and psi under
// f_delta. None may have smaller KL to the base.
TEST(KlDivergence, TiltedDensityIsMinimal) {
  const auto base = Marginal::uniform(-1.0, 2.0);
  for (const auto& t : {perturb_mean(base, 0.8), perturb_sd(base, -0.4)}) {
    const double kl_star = kl_divergence(t);
    for (int trial = 0; trial < 10; ++trial) {
      const double freq = 1.0 + trial;
      const double phase = 0.37 * trial;
      auto raw = [&](double x) { return std::cos(freq * x + phase); };
      // Project out span{1, x, x^2} under f_delta (covers both constraint sets).
      double gram[3][3] = {};
      double rhs[3] = {};
      for (int i = 0; i < 3; ++i) {
        rhs[i] = oracle_integral(t, [&](double x) { return t.pdf(x) * raw(x) * std::pow(x, i); });
        for (int j = 0; j < 3; ++j) {
          gram[i][j] = oracle_integral(t, [&](double x) { return t.pdf(x) * std::pow(x, i + j); });
        }
      }
      // Solve the 3x3 system by Cramer's rule.
      auto det3 = [](double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      };
      double coef[3];
      const double d = det3(gram);
      for (int c = 0; c < 3; ++c) {
        double m[3][3];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m[i][j] = (j == c) ? rhs[i] : gram[i][j];
        coef[c] = det3(m) / d;
      }
      auto g = [&](double x) { return raw(x) - coef[0] - coef[1] * x - coef[2] * x * x; };
      const double eps = 0.2;
      const double kl_alt = oracle_integral(t, [&](double x) {
        const double p = t.pdf(x) * (1.0 + eps * g(x));
        return p > 0.0 ? p * std::log(p / base.pdf(x)) : 0.0;
      });
      EXPECT_GE(kl_alt, kl_star - 1e-9) << "trial " << trial;
    }
  }
}

TEST(SupLikelihoodRatio, Examples) {
  const auto base = Marginal::uniform(0.0, 1.0);
  EXPECT_EQ(sup_likelihood_ratio(perturb_mean(base, 0.0)), 1.0);
  const auto t = perturb_mean(base, 0.7);
  EXPECT_NEAR(sup_likelihood_ratio(t), std::exp(t.lambdas()[0] - t.log_normalizer()), 1e-12);
  EXPECT_NEAR(sup_likelihood_ratio(t), likelihood_ratio(t, 1.0), 1e-12);
  // Concave exponent peaks inside the support.
  const auto narrow = perturb_sd(base, -0.5);
  EXPECT_NEAR(sup_likelihood_ratio(narrow), likelihood_ratio(narrow, 0.5), 1e-12);

  EXPECT_TRUE(std::isinf(sup_likelihood_ratio(perturb_mean(Marginal::normal(0.0, 1.0), 0.5))));
  EXPECT_TRUE(std::isinf(sup_likelihood_ratio(perturb_sd(Marginal::normal(0.0, 1.0), 0.5))));
  // Narrowing a normal bounds the ratio at sigma / sigma'.
  EXPECT_NEAR(sup_likelihood_ratio(perturb_sd(Marginal::normal(0.0, 1.0), -0.5)), 2.0, 1e-12);
}

TEST(TiltedSampler, MatchesTiltedLaw) {
  const auto t = perturb_mean(Marginal::uniform(2.0, 5.0), 0.9);
  const TiltedSampler sampler(t);
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(t.cdf(sampler.quantile(p)), p, 1e-12) << p;
  }
  const auto draws = sampler.sample(200000, 5);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  EXPECT_NEAR(mean, t.mean(), 4.0 * t.sd() / std::sqrt(200000.0));

  const auto g = perturb_sd(Marginal::normal(1.0, 2.0), 0.25);
  const TiltedSampler gs(g);
  EXPECT_NEAR(gs.quantile(0.95), 1.0 + 2.5 * 1.64485362695147, 1e-9);
}

}  // namespace
}  // namespace pli
