#include "npq/model.hpp"

#include <cmath>
#include <limits>

namespace npq {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

void check_intensity(double r) {
  require(std::isfinite(r), "traffic intensity r must be finite");
  require(r < 1.0, "traffic intensity r = " + std::to_string(r) + " is not < 1: the queue is unstable");
  require(r > 0.0, "traffic intensity r must be > 0");
}

void check_servers(int n_servers) {
  require(n_servers >= 1, "number of servers must be >= 1");
}

}  // namespace

ModelParams ModelParams::make(double r, double nu, std::optional<int> n_servers, double mu) {
  ModelParams p{r, nu, n_servers, mu};
  validate(p);
  return p;
}

void validate(const ModelParams& params) {
  check_intensity(params.r);
  require(std::isfinite(params.nu) && params.nu >= 0.0 && params.nu <= 1.0,
          "high-priority fraction nu must lie in [0, 1]");
  if (params.n_servers) check_servers(*params.n_servers);
  require(std::isfinite(params.mu) && params.mu > 0.0, "service rate mu must be > 0");
}

DerivedConstants derive_constants(const ModelParams& params) {
  validate(params);
  DerivedConstants c;
  c.r = params.r;
  c.nu = params.nu;
  c.r_hi = params.r_hi();
  c.r_lo = params.r_lo();
  const double r = params.r;

  if (params.nu == 0.0) {
    c.z0 = 0.0;
    c.z1 = 0.0;
    c.z2 = 1.0 + r;
    c.root_gap = 1.0 + r;
    c.pole_ratio = r / c.z2;
    return c;
  }
  if (params.nu == 1.0) {
    c.z0 = 1.0;
    c.z1 = r;
    c.z2 = 1.0;
    c.root_gap = 1.0 - r;
    c.pole_ratio = r;
    return c;
  }

  const double one_minus_r = 1.0 - r;
  c.root_gap = std::sqrt(one_minus_r * one_minus_r + 4.0 * c.r_lo);
  c.z2 = 0.5 * (1.0 + r + c.root_gap);
  // The "-" root loses digits as nu -> 0; use the product of roots instead.
  c.z1 = c.r_hi / c.z2;
  c.z0 = params.nu;
  c.pole_ratio = r / c.z2;
  // 1 - z1/z0 = (z2 - r) / z2 with z2 - r = (1 - r + gap) / 2.
  const double one_minus_x = (one_minus_r + c.root_gap) / (2.0 * c.z2);

  SeriesConstants s;
  s.kappa = 1.0 / (c.root_gap * one_minus_x);
  s.a_ratio = c.r_lo / (c.root_gap * c.root_gap);
  s.b_ratio = c.root_gap / one_minus_x;
  s.gamma_ratio = c.r_lo / (c.root_gap * one_minus_x);
  const double t = 1.0 - std::sqrt(c.r_hi);
  s.chi = 1.0 + t * t / c.r_lo;
  c.series = s;
  return c;
}

SeriesConstants series_constants_at_unit_hifrac(double r) {
  check_intensity(r);
  SeriesConstants s;
  const double g = 1.0 - r;
  s.kappa = 1.0 / (g * g);
  s.a_ratio = 0.0;
  s.b_ratio = 1.0;
  s.gamma_ratio = 0.0;
  s.chi = std::numeric_limits<double>::infinity();
  return s;
}

double geometric_pmf(double q, int k) {
  return (1.0 - q) * std::pow(q, k);
}

double no_wait_probability(double r, int n_servers) {
  check_servers(n_servers);
  require(std::isfinite(r) && r >= 0.0, "traffic intensity r must be >= 0");
  require(r < 1.0, "traffic intensity r = " + std::to_string(r) + " is not < 1: the queue is unstable");
  if (r == 0.0) return 1.0;

  // s = N!/(Nr)^N * sum_{k<N} (Nr)^k/k!, summed from the largest term down.
  const double load = n_servers * r;
  double term = 1.0 / r;  // k = N - 1
  double s = term;
  for (int k = n_servers - 1; k >= 1; --k) {
    term *= k / load;
    s += term;
  }
  const double t = (1.0 - r) * s;
  if (std::isinf(t)) return 1.0;
  return t / (1.0 + t);
}

double scaled_upper_incomplete_gamma(double x, double shape) {
  require(std::isfinite(x) && x > 0.0, "incomplete gamma argument must be > 0");
  require(std::isfinite(shape) && shape > 0.0, "incomplete gamma shape must be > 0");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min() / eps;
  constexpr int max_iter = 100000;

  if (x >= shape + 1.0) {
    // Modified Lentz evaluation of e^x x^-s Gamma(s, x).
    double b = x + 1.0 - shape;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
      const double an = -i * (i - shape);
      b += 2.0;
      d = an * d + b;
      if (std::fabs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::fabs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) <= eps) break;
    }
    return shape * h;
  }

  // Gamma(s, x) = Gamma(s) - gamma(s, x); the series gives e^x x^-s gamma(s, x).
  double ap = shape;
  double del = 1.0 / shape;
  double sum = del;
  for (int i = 0; i < max_iter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) <= std::fabs(sum) * eps) break;
  }
  double complete = std::tgamma(shape + 1.0) * std::exp(x) * std::pow(x, -shape);
  if (!std::isfinite(complete) || complete == 0.0) {
    complete = std::exp(std::lgamma(shape + 1.0) + x - shape * std::log(x));
  }
  return complete - shape * sum;
}

double empty_system_probability(double r, int n_servers) {
  check_servers(n_servers);
  require(std::isfinite(r) && r >= 0.0, "traffic intensity r must be >= 0");
  require(r < 1.0, "traffic intensity r = " + std::to_string(r) + " is not < 1: the queue is unstable");
  if (r == 0.0) return 1.0;

  const double load = r * n_servers;
  const double bracket = 1.0 / (1.0 - r) + scaled_upper_incomplete_gamma(load, n_servers);
  const double prefactor = std::pow(load, n_servers) / std::tgamma(n_servers + 1.0);
  if (std::isfinite(prefactor) && prefactor > 0.0) return 1.0 / (prefactor * bracket);
  const double log_inv =
      n_servers * std::log(load) - std::lgamma(n_servers + 1.0) + std::log(bracket);
  return std::exp(-log_inv);
}

double hi_marginal_exact(const ModelParams& params, int m) {
  validate(params);
  require(m >= 0, "queue length must be >= 0");
  return geometric_pmf(params.r_hi(), m);
}

double agg_exact(double r, int k) {
  check_intensity(r);
  require(k >= 0, "queue length must be >= 0");
  return geometric_pmf(r, k);
}

double xhi_exact(const ModelParams& params, int m) {
  require(m >= 0, "queue length must be >= 0");
  const DerivedConstants c = derive_constants(params);
  return (1.0 - c.r) * std::pow(c.r_hi / c.z2, m);
}

namespace {

double no_wait_for(const ModelParams& params) {
  require(params.n_servers.has_value(), "unconditional distributions need the number of servers");
  return no_wait_probability(params.r, *params.n_servers);
}

}  // namespace

PmfVector condition_decomposition(const ModelParams& params, const PmfVector& wait_conditional) {
  validate(params);
  require(wait_conditional.conditional, "input is already unconditional");
  const double p_nw = no_wait_for(params);
  const double w = 1.0 - p_nw;
  PmfVector out = wait_conditional;
  out.conditional = false;
  for (double& v : out.values) v *= w;
  if (!out.values.empty()) out.values[0] += p_nw;
  return out;
}

JointPmf condition_decomposition(const ModelParams& params, const JointPmf& wait_conditional) {
  validate(params);
  require(wait_conditional.conditional, "input is already unconditional");
  const double p_nw = no_wait_for(params);
  const double w = 1.0 - p_nw;
  JointPmf out = wait_conditional;
  out.conditional = false;
  for (double& v : out.data()) v *= w;
  out(0, 0) += p_nw;
  return out;
}

}  // namespace npq
