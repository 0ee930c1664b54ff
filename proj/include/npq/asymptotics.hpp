#pragma once

// Large-n behaviour of the low-priority marginal. Away from nu = r the tail is
// a geometric pole term r^n (present only while r_hi <= r^2) plus a branch-cut
// term chi^-n n^-3/2. At nu = r the two merge into r^n / sqrt(n).

#include <string_view>
#include <vector>

#include "npq/model.hpp"
#include "npq/pmf.hpp"

namespace npq {

/// |nu - r| <= kCriticalTolerance * r selects the critical formula.
inline constexpr double kCriticalTolerance = 1e-12;

enum class TailRegime { critical, pole_plus_cut, cut_only };

std::string_view to_string(TailRegime regime);

/// Regime from sign(r^2 - r_hi), with nu = r (to kCriticalTolerance) routed to critical.
TailRegime tail_regime(const ModelParams& params);

struct TailAsymptote {
  TailRegime regime = TailRegime::critical;
  double r = 0.0;
  double pole_coeff = 0.0;  // [1 - r(1-r)/r_lo], zero without the pole
  double cut_coeff = 0.0;   // prefactor of chi^-(n-1/2) n^-3/2; critical: of r^n / sqrt(n)
  double chi = 0.0;

  double pole_term(int n) const;
  double cut_term(int n) const;
  double operator()(int n) const;
};

/// Coefficients for nu in (0, 1); nu = 0 and nu = 1 throw DomainError.
TailAsymptote tail_asymptote(const ModelParams& params);

/// tail_asymptote(params)(n) for n >= 1.
double lo_tail_asymptote(const ModelParams& params, int n);

struct ConvergencePoint {
  int n = 0;
  double f_lo = 0.0;
  double asymptote = 0.0;
  double rel_error = 0.0;  // |f_lo / asymptote - 1|
};

struct ConvergenceReport {
  TailRegime regime = TailRegime::critical;
  std::vector<ConvergencePoint> points;
  /// Relative error never grows by more than noise_floor between consecutive n.
  bool decreasing = true;
  /// First n whose error exceeds its predecessor's by more than noise_floor; -1 if none.
  int first_increase = -1;
  double noise_floor = 0.0;
};

/// Default slack allowed in the monotonicity check: the marginal's own rounding level.
inline constexpr double kConvergenceNoiseFloor = 1e-10;

/// Compares the marginal with its asymptote for n = n_first..n_last.
ConvergenceReport asymptote_convergence_report(const ModelParams& params, int n_first, int n_last,
                                               Method method = Method::ri,
                                               double noise_floor = kConvergenceNoiseFloor);

/// Same comparison against a marginal computed elsewhere (index n = entry n).
ConvergenceReport asymptote_convergence_report(const ModelParams& params, const PmfVector& lo_marginal, int n_first,
                                               int n_last, double noise_floor = kConvergenceNoiseFloor);

}  // namespace npq
