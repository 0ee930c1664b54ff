#include "npq/chebyshev.hpp"

#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <string>

#include "npq/quad_recurrence.hpp"

namespace npq {

namespace {

using BigFloat = boost::multiprecision::mpfr_float;

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

/// Restores the default MPFR precision on scope exit.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(BigFloat::default_precision()) {
    BigFloat::default_precision(digits);
  }
  ~PrecisionGuard() { BigFloat::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

JointPmf lo_only_joint(double r, int n_max, int m_max, Method method) {
  JointPmf joint(n_max, m_max, method);
  for (int n = 0; n <= n_max; ++n) joint(n, 0) = geometric_pmf(r, n);
  return joint;
}

JointPmf hi_only_joint(double r, int n_max, int m_max, Method method) {
  JointPmf joint(n_max, m_max, method);
  for (int m = 0; m <= m_max; ++m) joint(0, m) = geometric_pmf(r, m);
  return joint;
}

}  // namespace

ABPolynomials ab_polynomials(int m, const ModelParams& params, int degree_cap) {
  validate(params);
  require(m >= 0, "level index m must be >= 0");
  const int cap = degree_cap < 0 ? m + 1 : degree_cap;
  const auto t = ab_table(params.r, params.r_hi(), params.r_lo(), m, cap);
  return {m, t.a.back(), t.b.back()};
}

std::pair<double, double> chebyshev_tu(int n, double x) {
  require(n >= 0, "Chebyshev degree must be >= 0");
  // T_0 = 1, T_1 = x; U_{-1} = 0, U_0 = 1
  double t_prev = 1.0;
  double t_cur = x;
  double u_prev = 0.0;
  double u_cur = 1.0;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double t_next = 2.0 * x * t_cur - t_prev;
    const double u_next = 2.0 * x * u_cur - u_prev;
    t_prev = t_cur;
    t_cur = t_next;
    u_prev = u_cur;
    u_cur = u_next;
  }
  return {t_cur, u_cur};
}

std::pair<double, double> alpha_beta(int m, double p, const ModelParams& params) {
  validate(params);
  require(m >= 0, "level index m must be >= 0");
  if (m == 0) return {0.0, 1.0};
  if (m == 1) return {1.0, 0.0};
  require(params.nu > 0.0, "alpha/beta through Chebyshev polynomials need nu > 0 for m >= 2");
  const double r1 = params.r_hi();
  const double s = std::sqrt(r1);
  const double x = (1.0 + params.r - params.r_lo() * p) / (2.0 * s);
  // U_{m-2} and U_{m-1}
  double u_prev = 0.0;  // U_{-1}
  double u_cur = 1.0;   // U_0
  for (int k = 1; k < m - 1; ++k) {
    const double u_next = 2.0 * x * u_cur - u_prev;
    u_prev = u_cur;
    u_cur = u_next;
  }
  const double u_m2 = m == 2 ? 1.0 : u_cur;
  const double u_m1 = m == 2 ? 2.0 * x : 2.0 * x * u_cur - u_prev;
  const double alpha = std::pow(s, m - 1) * u_m1;
  const double beta = -std::pow(s, m) * u_m2;
  return {alpha, beta};
}

JointPmf joint_via_convolution(const ModelParams& params, int n_max, int m_max, const PmfVector& lo_marginal) {
  validate(params);
  require(n_max >= 0 && m_max >= 0, "queue-length extents must be >= 0");
  require(lo_marginal.size() >= static_cast<std::size_t>(n_max) + 1, "low-priority marginal is shorter than n_max + 1");
  if (params.nu == 0.0) return lo_only_joint(params.r, n_max, m_max, Method::cheb);
  if (params.nu == 1.0) return hi_only_joint(params.r, n_max, m_max, Method::cheb);

  const auto t = ab_table(params.r, params.r_hi(), params.r_lo(), m_max, n_max);
  const std::vector<double> f_lo(lo_marginal.values.begin(), lo_marginal.values.begin() + n_max + 1);
  const auto values = convolutional_joint(t, f_lo, n_max, m_max);
  JointPmf joint(n_max, m_max, Method::cheb);
  std::copy(values.begin(), values.end(), joint.data().begin());
  joint.clamp = clamp_roundoff(joint.data());
  return joint;
}

int cheb_working_digits(const ModelParams& params, int m_max, const ChebOptions& options) {
  validate(params);
  require(options.min_magnitude > 0.0 && options.min_magnitude < 1.0, "min_magnitude must lie in (0, 1)");
  // Coefficient sums of alpha_m grow like rho^m with rho the root of t^2 = (1 + r + r_lo) t + r_hi.
  const double c = 1.0 + params.r + params.r_lo();
  const double rho = 0.5 * (c + std::sqrt(c * c + 4.0 * params.r_hi()));
  const double growth = (m_max + 2) * std::log10(rho);
  return static_cast<int>(std::ceil(growth - std::log10(options.min_magnitude))) + 17 + 10;
}

JointPmf joint_cheb(const ModelParams& params, int n_max, int m_max, const ChebOptions& options) {
  validate(params);
  require(n_max >= 0 && m_max >= 0, "queue-length extents must be >= 0");
  if (params.nu == 0.0) return lo_only_joint(params.r, n_max, m_max, Method::cheb);
  if (params.nu == 1.0) return hi_only_joint(params.r, n_max, m_max, Method::cheb);

  const PrecisionGuard guard(static_cast<unsigned>(cheb_working_digits(params, m_max, options)));
  const BigFloat r(params.r);
  const BigFloat r1(params.r_hi());
  // The cancellation amplifies any mismatch r1 + r2 != r, so r2 is formed exactly here.
  const BigFloat r2 = r - r1;

  auto f_lo = lo_pgf_coefficients<BigFloat>(r, r2, n_max, r2);
  for (auto& v : f_lo) v *= BigFloat(1) - r;

  const auto t = ab_table<BigFloat>(r, r1, r2, m_max, n_max);
  const auto values = convolutional_joint(t, f_lo, n_max, m_max);
  JointPmf joint(n_max, m_max, Method::cheb);
  auto out = joint.data();
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].convert_to<double>();
  joint.clamp = clamp_roundoff(joint.data());
  return joint;
}

}  // namespace npq
