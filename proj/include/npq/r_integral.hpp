#pragma once

// R-integral engine. The joint and marginal PMFs are differences of the
// contour integrals R^m_n = (1/2 pi i) \oint z^m dz / ((z - z0) [(z - z1)(z - z2)]^n)
// taken around z1, which have a closed-form series in binomial-CDF
// polynomials. Everything is evaluated in the scaled variables
// R^_n = (-r_lo)^(n-1) R_n.

#include <vector>

#include "npq/model.hpp"
#include "npq/pmf.hpp"

namespace npq {

/// x at or above this value uses the forward D recursion, below it the backward one.
inline constexpr double kForwardRecursionThreshold = 0.5;

/// Upper edge of the neighbourhood of nu = 0 where the small-nu limit is accepted.
inline constexpr double kSmallHifracBand = 1e-2;

/// P_k^m(x) = sum_{l<=k} C(m,l) x^(m-l) (1-x)^l for k = 0..k_max.
std::vector<double> d_cumulative(int m, double x, int k_max);

/// The binomial terms D^m_l(x) for l = 0..m.
std::vector<double> d_terms(int m, double x);

/// Row-major (m_max + 1) x (k_max + 1) table of P_k^m(x).
std::vector<double> p_polynomial_table(double x, int m_max, int k_max);

/// Three poles with z1 < min(z0, z2); used for evaluations off the model manifold.
struct PoleTriple {
  double z0 = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

PoleTriple poles_of(const ModelParams& params);

/// Unscaled R^m_n for n >= 1 by the series; R^m_0 = 0.
double r_integral(const PoleTriple& poles, int n, int m);

/// How close the series constants are to their degenerate limits.
struct RiCondition {
  double gamma_ratio = 0.0;
  double one_minus_x = 0.0;
  double kappa = 0.0;
};

RiCondition ri_condition(const ModelParams& params);

struct RiOptions {
  /// At nu = 1 evaluate the generic series with its limiting constants
  /// instead of returning the analytic reduction.
  bool series_at_unit_hifrac = false;
};

/// Scaled integrals R^m_{n+1} for n = 0..n_rows and m = 0..m_cols.
struct RIntegralTable {
  int n_rows = 0;
  int m_cols = 0;
  SeriesConstants constants;
  double z0 = 0.0;
  double x = 0.0;  // z1 / z0
  std::vector<double> r_hat;  // row-major (n_rows + 1) x (m_cols + 1)
  std::vector<double> p_scaled;  // P^(m)_k, row-major (m_cols + 1) x (n_rows + 1)

  double operator()(int n, int m) const {
    return r_hat[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_cols + 1) + static_cast<std::size_t>(m)];
  }
};

RIntegralTable r_hat_table(const ModelParams& params, int n_rows, int m_cols, const RiOptions& options = {});

JointPmf joint_ri(const ModelParams& params, int n_max, int m_max, const RiOptions& options = {});
PmfVector lo_marginal_ri(const ModelParams& params, int n_max, const RiOptions& options = {});
PmfVector xlo_ri(const ModelParams& params, int n_max, const RiOptions& options = {});

/// Backwards recurrence against the series. Entries are indexed (n, m) with
/// n = 0..n_max, m = 0..m_max on the unscaled R^m_n.
struct BackwardDiagnostic {
  int n_max = 0;
  int m_max = 0;
  std::vector<double> backward;
  std::vector<double> series;
  std::vector<double> digits;  // agreement in decimal places, capped at 16
  double min_digits = 16.0;
  int worst_n = 0;
  int worst_m = 0;

  double at(const std::vector<double>& v, int n, int m) const {
    return v[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max + 1) + static_cast<std::size_t>(m)];
  }
};

BackwardDiagnostic backwards_recurrence_diagnostic(const ModelParams& params, int n_max, int m_max);

/// Seeds of the backwards recurrence: R^0_{n+1} and R^1_{n+1}.
double r_seed_m0(const PoleTriple& poles, int n);
double r_seed_m1(const PoleTriple& poles, int n);

/// Unscaled R^m_n (n >= 1) from the nu -> 0 limit when 0 < nu <= kSmallHifracBand,
/// or from the closed sum when nu = 1.
double limiting_r_value(const ModelParams& params, int n, int m);

}  // namespace npq
