#include "otdro/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace otdro {

namespace {

// 16-point Gauss-Legendre abscissas/weights on [-1, 1].
constexpr std::array<double, 8> kNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i)
    s += kWeights[i] * (f(mid + half * kNodes[i]) + f(mid - half * kNodes[i]));
  return s * half;
}

}  // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int total_points) {
  if (b <= a) return 0.0;
  if (total_points < 16) total_points = 16;
  const int panels = (total_points + 15) / 16;
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += panel(f, a + p * h, a + (p + 1) * h);
  return s;
}

double sqrt_substitution_panel(const std::function<double(double)>& f, double e0,
                               int total_points) {
  if (!(e0 > 0.0)) return 0.0;
  const double umax = std::sqrt(e0);
  return gauss_legendre([&](double u) { return 2.0 * u * f(u * u); }, 0.0, umax,
                        total_points);
}

}  // namespace otdro
