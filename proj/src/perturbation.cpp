#include "pli/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pli/error.hpp"
#include "pli/quadrature.hpp"

namespace pli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kUniformHalfWidth = std::sqrt(3.0);  // standardized uniform lives on [-r, r]

constexpr int kMaxNewtonIterations = 100;
constexpr int kMaxHalvings = 60;
constexpr double kConvergedResidual = 1e-10;
constexpr double kPolishResidual = 1e-14;
constexpr double kQuadTolerance = 1e-15;

// Log-partition and raw moments E[z^j], j = 0..4, of the base law tilted by
// exp(t1 z + t2 z^2), all in standardized coordinates.
struct ZMoments {
  double log_z = kInf;
  std::array<double, 5> m{};
  bool finite() const { return std::isfinite(log_z); }
};

double uniform_exponent_max(double t1, double t2) {
  const double r = kUniformHalfWidth;
  double best = std::max(-t1 * r + t2 * r * r, t1 * r + t2 * r * r);
  if (t2 < 0.0) {
    const double vertex = -t1 / (2.0 * t2);
    if (std::abs(vertex) < r) best = std::max(best, t1 * vertex + t2 * vertex * vertex);
  }
  return best;
}

ZMoments z_moments(const Marginal& base, double t1, double t2) {
  ZMoments out;
  if (base.is_normal()) {
    if (t2 >= 0.5) return out;
    const double v = 1.0 / (1.0 - 2.0 * t2);
    const double m = t1 * v;
    out.log_z = 0.5 * t1 * t1 * v + 0.5 * std::log(v);
    out.m = {1.0, m, v + m * m, m * m * m + 3.0 * m * v, m * m * m * m + 6.0 * m * m * v + 3.0 * v * v};
    return out;
  }

  const double r = kUniformHalfWidth;
  const double shift = uniform_exponent_max(t1, t2);
  auto integrand = [=](double z) {
    const double g = std::exp(t1 * z + t2 * z * z - shift);
    const double z2 = z * z;
    return std::array<double, 5>{g, g * z, g * z2, g * z2 * z, g * z2 * z2};
  };
  std::array<double, 5> acc{};
  constexpr int kPieces = 8;
  const double width = 2.0 * r / kPieces;
  for (int p = 0; p < kPieces; ++p) {
    const double lo = -r + p * width;
    const double hi = (p + 1 == kPieces) ? r : lo + width;
    const auto part = quad::integrate<5>(integrand, lo, hi, kQuadTolerance);
    for (int j = 0; j < 5; ++j) acc[j] += part[j];
  }
  out.log_z = shift + std::log(acc[0] / (2.0 * r));
  for (int j = 0; j < 5; ++j) out.m[j] = acc[j] / acc[0];
  return out;
}

// A raw-x constraint expressed in standardized coordinates:
// psi~(z) = a z + b z^2 = (psi(x) - c) / d.
struct StandardizedConstraint {
  double a;
  double b;
  double target;
  double c;
  double d;
};

StandardizedConstraint standardize(const Constraint& k, double mean, double sd) {
  switch (k.psi) {
    case Moment::raw_x:
      return {1.0, 0.0, (k.target - mean) / sd, mean, sd};
    case Moment::raw_x_squared:
      return {2.0 * mean / sd, 1.0, (k.target - mean * mean) / (sd * sd), mean * mean, sd * sd};
  }
  return {};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

[[noreturn]] void unachievable(const std::string& what) {
  throw Error(ErrorCode::target_unachievable, "target unachievable: " + what);
}

// Validates the constraint set against the base support and returns whether
// the target sits within 1% of the edge of its achievable range.
bool check_achievable(const Marginal& base, const ConstraintSet& cs) {
  if (cs.empty() || cs.size() > 2) {
    throw Error(ErrorCode::invalid_argument, "constraint set must hold one or two constraints");
  }
  if (cs.size() == 2 && cs[0].psi == cs[1].psi) {
    throw Error(ErrorCode::invalid_argument, "constraint moment tags must be distinct");
  }
  const Constraint* first = nullptr;
  const Constraint* second = nullptr;
  for (const auto& k : cs) {
    if (!std::isfinite(k.target)) unachievable("non-finite target");
    (k.psi == Moment::raw_x ? first : second) = &k;
  }

  if (base.is_normal()) {
    if (second && !first && second->target <= 0.0) unachievable("second moment must be positive");
    if (first && second && second->target - first->target * first->target <= 0.0) {
      unachievable("target variance must be positive");
    }
    return false;
  }

  const double a = base.lower();
  const double b = base.upper();
  bool near = false;
  if (first) {
    const double m = first->target;
    if (!(m > a && m < b)) {
      unachievable("mean " + fmt(m) + " outside (" + fmt(a) + ", " + fmt(b) + ")");
    }
    near = std::min(m - a, b - m) < 0.01 * (b - a);
    if (second) {
      const double v = second->target - m * m;
      const double vmax = (m - a) * (b - m);
      if (!(v > 0.0 && v < vmax)) {
        unachievable("variance " + fmt(v) + " outside (0, " + fmt(vmax) + ")");
      }
      near = near || v > 0.99 * vmax || v < 0.01 * vmax;
    }
  } else if (second) {
    const double lo = (a < 0.0 && b > 0.0) ? 0.0 : std::min(a * a, b * b);
    const double hi = std::max(a * a, b * b);
    const double s = second->target;
    if (!(s > lo && s < hi)) {
      unachievable("second moment " + fmt(s) + " outside (" + fmt(lo) + ", " + fmt(hi) + ")");
    }
    near = std::min(s - lo, hi - s) < 0.01 * (hi - lo);
  }
  return near;
}

struct DualState {
  std::array<double, 2> mu{0.0, 0.0};
  ZMoments z;
  std::array<double, 2> residual{0.0, 0.0};
  double dual = kInf;
  double max_residual = kInf;
};

}  // namespace

TiltedDensity::TiltedDensity(const Marginal& base, ConstraintSet cs)
    : base_(base),
      constraints_(std::move(cs)),
      lambdas_(constraints_.size(), 0.0),
      center_(base.mean()),
      scale_(base.sd()) {}

TiltedDensity TiltedDensity::identity(const Marginal& base, const ConstraintSet& cs) {
  return TiltedDensity(base, cs);
}

double TiltedDensity::log_ratio(double x) const {
  if (is_identity()) return 0.0;
  const double z = to_z(x);
  return theta_[0] * z + theta_[1] * z * z - log_norm_z_;
}

double TiltedDensity::pdf(double x) const {
  const double p = base_.pdf(x);
  return p == 0.0 ? 0.0 : p * std::exp(log_ratio(x));
}

double TiltedDensity::cdf(double x) const {
  if (is_identity()) return base_.cdf(x);
  const double z = to_z(x);
  if (base_.is_normal()) {
    const double v = 1.0 / (1.0 - 2.0 * theta_[1]);
    return normal_cdf((z - theta_[0] * v) / std::sqrt(v));
  }
  const double r = kUniformHalfWidth;
  if (x <= base_.lower()) return 0.0;
  if (x >= base_.upper()) return 1.0;
  auto density = [this, r](double u) {
    return std::exp(theta_[0] * u + theta_[1] * u * u - log_norm_z_) / (2.0 * r);
  };
  return std::clamp(quad::integrate(density, -r, z, kQuadTolerance), 0.0, 1.0);
}

double TiltedDensity::mean() const { return center_ + scale_ * mean_z_; }

double TiltedDensity::sd() const { return scale_ * std::sqrt(var_z_); }

TiltedDensity solve_tilting(const Marginal& base, const ConstraintSet& cs) {
  const bool near = check_achievable(base, cs);
  const double mean = base.mean();
  const double sd = base.sd();

  const std::size_t k_count = cs.size();
  std::array<StandardizedConstraint, 2> sc{};
  for (std::size_t k = 0; k < k_count; ++k) sc[k] = standardize(cs[k], mean, sd);

  TiltedDensity out(base, cs);
  out.diagnostics_.near_boundary = near;

  // With two constraints the Newton iteration runs on the canonical moments
  // (z, z^2) directly. Far from the origin the standardized x^2 constraint is
  // nearly collinear with the mean constraint, and the original basis leaves
  // the Hessian too ill-conditioned to converge.
  std::array<StandardizedConstraint, 2> work = sc;
  double det = 1.0;
  if (k_count == 2) {
    det = sc[0].a * sc[1].b - sc[1].a * sc[0].b;
    const double c0 = (sc[1].b * sc[0].target - sc[0].b * sc[1].target) / det;
    const double c1 = (sc[0].a * sc[1].target - sc[1].a * sc[0].target) / det;
    work[0] = {1.0, 0.0, c0, 0.0, 1.0};
    work[1] = {0.0, 1.0, c1, 0.0, 1.0};
  }

  // Base moments in standardized coordinates are E[z] = 0, E[z^2] = 1.
  bool at_base = true;
  for (std::size_t k = 0; k < k_count; ++k) {
    at_base = at_base && std::abs(sc[k].b - sc[k].target) <= kPolishResidual;
  }
  if (at_base) return out;

  auto evaluate = [&](const std::array<double, 2>& mu) {
    DualState s;
    s.mu = mu;
    double t1 = 0.0;
    double t2 = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      t1 += mu[k] * work[k].a;
      t2 += mu[k] * work[k].b;
    }
    s.z = z_moments(base, t1, t2);
    if (!s.z.finite()) return s;
    s.dual = s.z.log_z;
    s.max_residual = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      s.residual[k] = work[k].a * s.z.m[1] + work[k].b * s.z.m[2] - work[k].target;
      s.dual -= mu[k] * work[k].target;
      s.max_residual = std::max(s.max_residual, std::abs(s.residual[k]));
    }
    return s;
  };

  DualState state = evaluate({0.0, 0.0});
  int iter = 0;
  for (; iter < kMaxNewtonIterations && state.max_residual > kPolishResidual; ++iter) {
    const auto& m = state.z.m;
    const double var_z = m[2] - m[1] * m[1];
    const double cov = m[3] - m[1] * m[2];
    const double var_z2 = m[4] - m[2] * m[2];
    auto hess = [&](std::size_t i, std::size_t j) {
      return work[i].a * work[j].a * var_z + (work[i].a * work[j].b + work[i].b * work[j].a) * cov +
             work[i].b * work[j].b * var_z2;
    };

    std::array<double, 2> step{0.0, 0.0};
    if (k_count == 1) {
      step[0] = -state.residual[0] / hess(0, 0);
    } else {
      const double h00 = hess(0, 0), h01 = hess(0, 1), h11 = hess(1, 1);
      const double det = h00 * h11 - h01 * h01;
      step[0] = -(h11 * state.residual[0] - h01 * state.residual[1]) / det;
      step[1] = -(-h01 * state.residual[0] + h00 * state.residual[1]) / det;
    }
    if (!std::isfinite(step[0]) || !std::isfinite(step[1])) break;

    const double slope = state.residual[0] * step[0] + state.residual[1] * step[1];
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const DualState cand =
          evaluate({state.mu[0] + t * step[0], state.mu[1] + t * step[1]});
      if (!cand.z.finite()) continue;
      if (cand.dual <= state.dual + 1e-4 * t * slope || cand.max_residual < state.max_residual) {
        state = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  out.diagnostics_.iterations = iter;
  out.diagnostics_.residual = state.max_residual;
  if (!(state.max_residual < kConvergedResidual)) {
    throw Error(ErrorCode::solver_diverged,
                "tilting solver did not converge after " + std::to_string(iter) +
                    " iterations; last residual " + fmt(state.max_residual));
  }

  double t1 = 0.0;
  double t2 = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    t1 += state.mu[k] * work[k].a;
    t2 += state.mu[k] * work[k].b;
  }
  // Multipliers of the original standardized constraints: theta = A^T mu.
  std::array<double, 2> mu = state.mu;
  if (k_count == 2) {
    mu[0] = (sc[1].b * t1 - sc[1].a * t2) / det;
    mu[1] = (sc[0].a * t2 - sc[0].b * t1) / det;
  }
  out.log_normalizer_ = state.z.log_z;
  for (std::size_t k = 0; k < k_count; ++k) {
    out.lambdas_[k] = mu[k] / sc[k].d;
    out.log_normalizer_ += out.lambdas_[k] * sc[k].c;
  }
  out.theta_ = {t1, t2};
  out.log_norm_z_ = state.z.log_z;
  out.mean_z_ = state.z.m[1];
  out.var_z_ = state.z.m[2] - state.z.m[1] * state.z.m[1];
  return out;
}

TiltedDensity perturb_mean(const Marginal& base, double delta_in_sd_units) {
  const ConstraintSet cs{{Moment::raw_x, base.mean() + delta_in_sd_units * base.sd()}};
  if (base.bounded() && !(std::abs(delta_in_sd_units) < kUniformHalfWidth)) {
    unachievable("|delta| = " + fmt(std::abs(delta_in_sd_units)) +
                 " reaches the support bound (limit sqrt(3))");
  }
  if (delta_in_sd_units == 0.0) return TiltedDensity::identity(base, cs);
  return solve_tilting(base, cs);
}

TiltedDensity perturb_sd(const Marginal& base, double delta_in_sd_units) {
  const double mean = base.mean();
  const double target_sd = base.sd() * (1.0 + delta_in_sd_units);
  if (!(target_sd > 0.0)) unachievable("target sd " + fmt(target_sd) + " is not positive");
  const ConstraintSet cs{{Moment::raw_x, mean},
                         {Moment::raw_x_squared, target_sd * target_sd + mean * mean}};
  if (delta_in_sd_units == 0.0) return TiltedDensity::identity(base, cs);
  return solve_tilting(base, cs);
}

double likelihood_ratio(const TiltedDensity& t, double x) {
  if (!t.base().in_support(x)) {
    throw Error(ErrorCode::out_of_support,
                "x = " + fmt(x) + " outside support of " + t.base().describe());
  }
  if (t.is_identity()) return 1.0;
  return std::exp(t.log_ratio(x));
}

double kl_divergence(const TiltedDensity& t) {
  if (t.is_identity()) return 0.0;
  const double second = t.var_z_ + t.mean_z_ * t.mean_z_;
  const double kl = t.theta_[0] * t.mean_z_ + t.theta_[1] * second - t.log_norm_z_;
  return std::max(kl, 0.0);
}

double sup_likelihood_ratio(const TiltedDensity& t) {
  if (t.is_identity()) return 1.0;
  const auto [t1, t2] = t.standardized_theta();
  const double lz = t.standardized_log_normalizer();
  if (t.base().is_normal()) {
    if (t2 >= 0.0) return kInf;
    const double vertex = -t1 / (2.0 * t2);
    return std::exp(t1 * vertex + t2 * vertex * vertex - lz);
  }
  return std::exp(uniform_exponent_max(t1, t2) - lz);
}

TiltedSampler::TiltedSampler(const TiltedDensity& t, std::size_t cells) : density_(t) {
  if (!t.base().is_uniform()) return;
  cells = std::max<std::size_t>(cells, 1);
  const double r = kUniformHalfWidth;
  edges_.resize(cells + 1);
  cumulative_.assign(cells + 1, 0.0);
  for (std::size_t i = 0; i <= cells; ++i) edges_[i] = -r + 2.0 * r * i / cells;
  edges_.back() = r;
  auto g = [this](double z) { return std::array<double, 1>{density_z(z)}; };
  for (std::size_t i = 0; i < cells; ++i) {
    cumulative_[i + 1] = cumulative_[i] + quad::apply_rule<1>(g, edges_[i], edges_[i + 1])[0];
  }
}

double TiltedSampler::density_z(double z) const {
  const auto& th = density_.standardized_theta();
  return std::exp(th[0] * z + th[1] * z * z - density_.standardized_log_normalizer()) /
         (2.0 * kUniformHalfWidth);
}

double TiltedSampler::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "quantile requires p in (0, 1)");
  }
  const Marginal& base = density_.base();
  const double center = base.mean();
  const double scale = base.sd();
  if (base.is_normal()) {
    const auto& th = density_.standardized_theta();
    const double v = 1.0 / (1.0 - 2.0 * th[1]);
    return center + scale * (th[0] * v + std::sqrt(v) * normal_quantile(p));
  }

  const double target = p * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t cell = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  cell = std::clamp<std::size_t>(cell, 1, edges_.size() - 1) - 1;
  const double z0 = edges_[cell];
  double lo = z0;
  double hi = edges_[cell + 1];
  const double remaining = target - cumulative_[cell];
  const double mass = cumulative_[cell + 1] - cumulative_[cell];

  auto g = [this](double z) { return std::array<double, 1>{density_z(z)}; };
  double z = mass > 0.0 ? z0 + (hi - lo) * std::clamp(remaining / mass, 0.0, 1.0) : z0;
  for (int iter = 0; iter < 50; ++iter) {
    const double f = (z > z0 ? quad::apply_rule<1>(g, z0, z)[0] : 0.0) - remaining;
    if (f > 0.0) hi = z; else lo = z;
    const double dens = density_z(z);
    double next = dens > 0.0 ? z - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) < 1e-15 * (1.0 + std::abs(z))) {
      z = next;
      break;
    }
    z = next;
  }
  return std::clamp(center + scale * z, base.lower(), base.upper());
}

std::vector<double> TiltedSampler::sample(std::size_t n, const CounterStream& stream) const {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = quantile(stream.uniform(k));
  return out;
}

}  // namespace pli
