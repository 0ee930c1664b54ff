#pragma once

// Convolutional form of the joint PMF. Powers of lambda_1 reduce to
// lambda_1^m = alpha_m lambda_1 + beta_m with polynomial alpha_m, beta_m
// (scaled Chebyshev polynomials of the second kind), which gives
// f(n, m) = A^(m)_n + sum_k B^(m)_k f_lo(n - k).
//
// The coefficients of alpha_m grow geometrically while f(n, m) decays, so the
// sum cancels badly in double precision once m is more than a few dozen.
// joint_cheb therefore runs the whole reconstruction in MPFR.

#include <algorithm>
#include <utility>
#include <vector>

#include "npq/model.hpp"
#include "npq/pmf.hpp"

namespace npq {

/// A^(m) (degree m) and B^(m) (degree m + 1) for m = 0..m_max, truncated to degree_cap.
template <class Real>
struct AbTable {
  std::vector<std::vector<Real>> a;
  std::vector<std::vector<Real>> b;
};

/// alpha_0..alpha_{m_max} as coefficient vectors in p, truncated to degree_cap.
template <class Real>
std::vector<std::vector<Real>> alpha_polynomials(const Real& r, const Real& r1, const Real& r2, int m_max,
                                                 int degree_cap) {
  const auto len = [&](int m) { return static_cast<std::size_t>(std::max(1, std::min(m, degree_cap + 1))); };
  std::vector<std::vector<Real>> alpha(static_cast<std::size_t>(m_max) + 1);
  alpha[0].assign(1, Real(0));
  if (m_max >= 1) alpha[1].assign(1, Real(1));
  const Real b0 = Real(1) + r;
  for (int m = 1; m < m_max; ++m) {
    const auto& cur = alpha[static_cast<std::size_t>(m)];
    const auto& prev = alpha[static_cast<std::size_t>(m) - 1];
    std::vector<Real> next(len(m + 1), Real(0));
    for (std::size_t k = 0; k < next.size(); ++k) {
      Real v(0);
      if (k < cur.size()) v += b0 * cur[k];
      if (k >= 1 && k - 1 < cur.size()) v -= r2 * cur[k - 1];
      if (k < prev.size()) v -= r1 * prev[k];
      next[k] = v;
    }
    alpha[static_cast<std::size_t>(m) + 1] = std::move(next);
  }
  return alpha;
}

template <class Real>
AbTable<Real> ab_table(const Real& r, const Real& r1, const Real& r2, int m_max, int degree_cap) {
  const auto alpha = alpha_polynomials(r, r1, r2, m_max + 1, degree_cap);
  auto coeff = [](const std::vector<Real>& v, std::size_t k) { return k < v.size() ? v[k] : Real(0); };
  // beta_0 = 1, beta_m = -r1 alpha_{m-1}
  auto beta = [&](int m, std::size_t k) {
    if (m == 0) return k == 0 ? Real(1) : Real(0);
    return Real(-r1 * coeff(alpha[static_cast<std::size_t>(m) - 1], k));
  };

  AbTable<Real> t;
  t.a.resize(static_cast<std::size_t>(m_max) + 1);
  t.b.resize(static_cast<std::size_t>(m_max) + 1);
  const Real one_minus_r = Real(1) - r;
  for (int m = 0; m <= m_max; ++m) {
    const auto& am = alpha[static_cast<std::size_t>(m)];
    const auto& an = alpha[static_cast<std::size_t>(m) + 1];
    const auto a_size = static_cast<std::size_t>(std::min(m, degree_cap)) + 1;
    const auto b_size = static_cast<std::size_t>(std::min(m + 1, degree_cap)) + 1;
    std::vector<Real> a(a_size), b(b_size);
    for (std::size_t k = 0; k < b_size; ++k) {
      const Real d = coeff(am, k) - coeff(an, k);  // alpha_m - alpha_{m+1}
      if (k < a_size) a[k] = -one_minus_r * d;
      Real v = d + beta(m, k) - beta(m + 1, k);
      if (k >= 1) v -= r2 * (coeff(am, k - 1) - coeff(an, k - 1));
      b[k] = v;
    }
    t.a[static_cast<std::size_t>(m)] = std::move(a);
    t.b[static_cast<std::size_t>(m)] = std::move(b);
  }
  return t;
}

/// f(n, m) = A^(m)_n + sum_{k<=min(n,m+1)} B^(m)_k f_lo(n-k), row-major in n.
template <class Real>
std::vector<Real> convolutional_joint(const AbTable<Real>& t, const std::vector<Real>& f_lo, int n_max, int m_max) {
  std::vector<Real> out(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(m_max + 1), Real(0));
  for (int m = 0; m <= m_max; ++m) {
    const auto& a = t.a[static_cast<std::size_t>(m)];
    const auto& b = t.b[static_cast<std::size_t>(m)];
    for (int n = 0; n <= n_max; ++n) {
      Real s = static_cast<std::size_t>(n) < a.size() ? a[static_cast<std::size_t>(n)] : Real(0);
      const int k_hi = std::min(n, static_cast<int>(b.size()) - 1);
      for (int k = 0; k <= k_hi; ++k) s += b[static_cast<std::size_t>(k)] * f_lo[static_cast<std::size_t>(n - k)];
      out[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max + 1) + static_cast<std::size_t>(m)] = s;
    }
  }
  return out;
}

struct ABPolynomials {
  int m = 0;
  std::vector<double> a_coeffs;
  std::vector<double> b_coeffs;
};

/// A^(m), B^(m) in double, truncated to degree_cap (default: full degree m).
ABPolynomials ab_polynomials(int m, const ModelParams& params, int degree_cap = -1);

/// alpha_m(p), beta_m(p) through U_n at x(p) = (1 + r - r_lo p) / (2 sqrt(r_hi)).
/// nu = 0 is accepted for m <= 1 only.
std::pair<double, double> alpha_beta(int m, double p, const ModelParams& params);

/// T_n(x) and U_{n-1}(x) by the three-term recurrences.
std::pair<double, double> chebyshev_tu(int n, double x);

/// Convolutional joint PMF in double from a supplied low-priority marginal.
/// Accurate only while the alpha coefficients stay small (m up to a few dozen).
JointPmf joint_via_convolution(const ModelParams& params, int n_max, int m_max, const PmfVector& lo_marginal);

struct ChebOptions {
  /// Smallest |f| that must keep full double accuracy; sets the MPFR precision.
  double min_magnitude = 1e-40;
};

/// Decimal digits used by joint_cheb for the given extent.
int cheb_working_digits(const ModelParams& params, int m_max, const ChebOptions& options = {});

/// Convolutional joint PMF evaluated end to end in MPFR, marginal included.
JointPmf joint_cheb(const ModelParams& params, int n_max, int m_max, const ChebOptions& options = {});

}  // namespace npq
