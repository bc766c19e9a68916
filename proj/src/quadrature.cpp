#include "pli/quadrature.hpp"

#include <numbers>

namespace pli::quad {
namespace {

constexpr int kOrder = 20;

struct Table {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  Table() {
    // Newton iteration on P_n from the Chebyshev-like initial guesses.
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

}  // namespace

Rule gauss_legendre20() {
  static const Table table;
  return Rule{table.nodes, table.weights};
}

}  // namespace pli::quad
