#pragma once

// Quadratic-recurrence engine. The low-priority PGF and the roots lambda_+-(p)
// all satisfy quadratic equations, so their Taylor coefficients obey
// non-linear recurrences that are evaluated here with an arbitrary scale
// factor Lambda. The recurrences are templates so that the multiprecision
// verification path can reuse them unchanged.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "npq/model.hpp"
#include "npq/pmf.hpp"

namespace npq {

/// Working state of the scaled marginal recurrence.
template <class Real>
struct ScaledRecurrenceState {
  Real scale_factor;  // Lambda
  Real c1;            // r_lo / Lambda
  Real c2;            // Lambda / D
  Real root_gap;      // D = sqrt((1 - r)^2 + 4 r_lo)
  std::vector<Real> f_tilde;
  std::vector<Real> delta;
};

/// Runs f~_n = c2 (f~_{n-1} + sum_{k<n} f~_k Delta_{n-1-k}) for n = 1..n_max,
/// where Delta_k = r f~_k - c1 f~_{k+1} and f~_n is taken as 0 inside Delta_{n-1}.
/// Requires r_lo > 0 and scale > 0.
template <class Real>
ScaledRecurrenceState<Real> scaled_lo_recurrence(const Real& r, const Real& r_lo, int n_max, const Real& scale) {
  using std::sqrt;
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  if (!(r_lo > Real(0)) || !(scale > Real(0))) throw DomainError("scaled recurrence needs r_lo > 0 and Lambda > 0");

  ScaledRecurrenceState<Real> s;
  const Real one_minus_r = Real(1) - r;
  s.scale_factor = scale;
  s.root_gap = sqrt(one_minus_r * one_minus_r + Real(4) * r_lo);
  s.c1 = r_lo / scale;
  s.c2 = scale / s.root_gap;
  s.f_tilde.assign(static_cast<std::size_t>(n_max) + 1, Real(0));
  s.delta.assign(static_cast<std::size_t>(n_max) + 1, Real(0));

  auto& f = s.f_tilde;
  auto& d = s.delta;
  f[0] = Real(2) / (one_minus_r + s.root_gap);
  for (int n = 1; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (n >= 2) d[un - 2] = r * f[un - 2] - s.c1 * f[un - 1];
    d[un - 1] = r * f[un - 1];  // f~_n is still zero here
    Real acc = f[un - 1];
    for (std::size_t k = 0; k < un; ++k) acc += f[k] * d[un - 1 - k];
    f[un] = s.c2 * acc;
  }
  return s;
}

/// Taylor coefficients lambda^(k) of lambda_+ (sign > 0) or lambda_- (sign < 0)
/// in powers of p. `scaled` receives the internal f^+-_k when non-null.
template <class Real>
std::vector<Real> lambda_taylor_series(const Real& r, const Real& r_lo, const Real& r_hi, int n_max, int sign,
                                       const Real& scale, std::vector<Real>* scaled = nullptr) {
  using std::sqrt;
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  if (!(r_lo > Real(0)) || !(scale > Real(0))) throw DomainError("lambda recurrence needs r_lo > 0 and Lambda > 0");

  const Real one_minus_r = Real(1) - r;
  const Real gap = sqrt(one_minus_r * one_minus_r + Real(4) * r_lo);
  const Real z2 = (Real(1) + r + gap) / Real(2);
  std::vector<Real> f(static_cast<std::size_t>(n_max) + 1, Real(0));
  // The smaller root comes from the root product to avoid cancellation.
  f[0] = sign > 0 ? z2 : r_hi / z2;
  const Real factor = sign > 0 ? Real(-1) / gap : Real(1) / gap;
  for (int n = 1; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    Real acc = scale * f[un - 1];
    for (std::size_t k = 1; k < un; ++k) acc += f[k] * f[un - k];
    f[un] = factor * acc;
  }

  std::vector<Real> coeffs(f.size());
  const Real ratio = r_lo / scale;
  Real power(1);
  for (std::size_t k = 0; k < f.size(); ++k) {
    coeffs[k] = power * f[k];
    power *= ratio;
  }
  if (scaled) *scaled = std::move(f);
  return coeffs;
}

/// Generating-function coefficients of 1/(lambda_2(p) - r), i.e. f_lo(n)/(1 - r).
template <class Real>
std::vector<Real> lo_pgf_coefficients(const Real& r, const Real& r_lo, int n_max, const Real& scale) {
  const auto state = scaled_lo_recurrence(r, r_lo, n_max, scale);
  std::vector<Real> g(state.f_tilde.size());
  Real power(1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    g[n] = power * state.f_tilde[n];
    power *= state.c1;
  }
  return g;
}

struct QrOptions {
  /// Scale factor Lambda; defaults to r_lo.
  std::optional<double> scale;
};

enum class RootSign { plus, minus };

struct LambdaTaylor {
  RootSign sign = RootSign::minus;
  double scale = 0.0;
  std::vector<double> coeffs;  // lambda^(k)
  std::vector<double> scaled;  // f^+-_k
};

/// Low-priority wait-conditional marginal f_lo(0..n_max).
PmfVector lo_marginal_qr(const ModelParams& params, int n_max, const QrOptions& options = {});

LambdaTaylor lambda_taylor(const ModelParams& params, int n_max, RootSign sign, const QrOptions& options = {});

/// Joint wait-conditional PMF on [0, n_max] x [0, m_max] by repeated convolution.
JointPmf joint_qr(const ModelParams& params, int n_max, int m_max, const QrOptions& options = {});

}  // namespace npq
