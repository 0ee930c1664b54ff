#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double binomial_term(int m, int l, double x) {
  long double c = 1.0L;
  for (int j = 1; j <= l; ++j) c = c * (m - l + j) / j;
  return static_cast<double>(c * std::pow(static_cast<long double>(x), m - l) *
                             std::pow(1.0L - static_cast<long double>(x), l));
}

double binomial_cdf(int m, int k, double x) {
  long double s = 0.0L;
  for (int l = 0; l <= std::min(k, m); ++l) s += binomial_term(m, l, x);
  return static_cast<double>(s);
}

namespace {

std::vector<cplx> trapezoid(const std::function<cplx(cplx)>& f, int k_max, double radius, int nodes) {
  std::vector<cplx> c(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    const cplx fz = f(std::polar(radius, theta));
    for (int k = 0; k <= k_max; ++k) c[static_cast<std::size_t>(k)] += fz * std::polar(1.0, -k * theta);
  }
  for (int k = 0; k <= k_max; ++k) c[static_cast<std::size_t>(k)] /= nodes * std::pow(radius, k);
  return c;
}

}  // namespace

std::vector<double> cauchy_coefficients(const std::function<cplx(cplx)>& f, int k_max, double radius) {
  int nodes = 64;
  auto prev = trapezoid(f, k_max, radius, nodes);
  for (int it = 0; it < 12; ++it) {
    nodes *= 2;
    auto next = trapezoid(f, k_max, radius, nodes);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      diff = std::max(diff, std::abs(next[k] - prev[k]) * std::pow(radius, static_cast<double>(k)));
      scale = std::max(scale, std::abs(next[k]) * std::pow(radius, static_cast<double>(k)));
    }
    prev = std::move(next);
    if (diff <= 1e-15 * scale) break;
  }
  std::vector<double> out(prev.size());
  for (std::size_t k = 0; k < prev.size(); ++k) out[k] = prev[k].real();
  return out;
}

double r_contour(double z0, double z1, double z2, int n, int m) {
  const double radius = 0.5 * std::min(z0 - z1, z2 - z1);
  auto integrand = [&](double theta) {
    const cplx u = std::polar(radius, theta);
    const cplx z = z1 + u;
    const cplx denom = (z - z0) * std::pow((z - z1) * (z - z2), n);
    return std::pow(z, m) / denom * u;  // dz / (2 pi i) = u dtheta / (2 pi)
  };
  int nodes = 64;
  auto sum_at = [&](int count) {
    cplx s = 0.0;
    for (int j = 0; j < count; ++j) s += integrand(2.0 * std::numbers::pi * j / count);
    return (s / static_cast<double>(count)).real();
  };
  double prev = sum_at(nodes);
  for (int it = 0; it < 14; ++it) {
    nodes *= 2;
    const double next = sum_at(nodes);
    if (std::fabs(next - prev) <= 1e-15 * std::fabs(next)) return next;
    prev = next;
  }
  return prev;
}

cplx lambda_root(double r, double nu, cplx p, int sign) {
  const double r_hi = nu * r;
  const double r_lo = r - r_hi;
  const cplx b = 1.0 + r - r_lo * p;
  const cplx disc = std::sqrt(b * b - 4.0 * r_hi);
  const cplx big = 0.5 * (b + disc);
  return sign > 0 ? big : r_hi / big;
}

double erlang_c(int servers, double r) {
  const long double a = static_cast<long double>(servers) * r;
  long double term = 1.0L;
  long double s = 0.0L;
  for (int k = 0; k < servers; ++k) {
    s += term;
    term = term * a / (k + 1);
  }
  const long double tail = term / (1.0L - r);
  return static_cast<double>(tail / (s + tail));
}

}  // namespace oracle
