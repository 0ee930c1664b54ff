#pragma once

// Parameters of the two-level non-preemptive M/M/c queue with equal service
// rates, the algebraic constants derived from them, and the closed-form
// probabilities used as references throughout the library.

#include <optional>
#include <stdexcept>
#include <string>

#include "npq/pmf.hpp"

namespace npq {

/// Raised for inputs outside an operation's domain (unstable load, bad fraction, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total intensity r and high-priority arrival fraction nu, plus the optional
/// server count and service rate needed for unconditional quantities.
struct ModelParams {
  double r = 0.5;
  double nu = 0.5;
  std::optional<int> n_servers;
  double mu = 1.0;

  /// Validates and builds; throws DomainError.
  static ModelParams make(double r, double nu, std::optional<int> n_servers = std::nullopt, double mu = 1.0);

  /// The sum r_hi() + r_lo() reproduces r exactly for nu >= 1/2 and to one ulp below.
  double r_hi() const { return nu * r; }
  double r_lo() const { return r - r_hi(); }

  /// nu == 0 or nu == 1: single-class reductions apply.
  bool single_class() const { return nu == 0.0 || nu == 1.0; }
};

void validate(const ModelParams& params);

/// Constants of the R-integral series; undefined when nu is 0 or 1.
struct SeriesConstants {
  double kappa = 0.0;        // 1 / ((z2 - z1)(1 - z1/z0))
  double a_ratio = 0.0;      // r_lo / (z2 - z1)^2
  double b_ratio = 0.0;      // (z2 - z1) / (1 - z1/z0)
  double gamma_ratio = 0.0;  // r_lo / ((z2 - z1)(1 - z1/z0))
  double chi = 0.0;          // 1 + (1 - sqrt(r_hi))^2 / r_lo
};

struct DerivedConstants {
  double r = 0.0;
  double nu = 0.0;
  double r_hi = 0.0;
  double r_lo = 0.0;
  double z0 = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
  /// z2 - z1 = sqrt((1 - r)^2 + 4 r_lo), computed without subtraction.
  double root_gap = 0.0;
  /// z1 / z0; equals r / z2 and is well defined for nu in (0, 1].
  double pole_ratio = 0.0;
  std::optional<SeriesConstants> series;

  bool degenerate() const { return !series.has_value(); }
};

DerivedConstants derive_constants(const ModelParams& params);

/// Exact limits of the series constants at nu = 1 (z0 = z2 = 1, z1 = r).
/// Only used to evaluate the generic series at that boundary.
SeriesConstants series_constants_at_unit_hifrac(double r);

/// (1 - q) q^k. Every geometric law in the library goes through here so that
/// analytic branches are bit-identical to the reference formulas.
double geometric_pmf(double q, int k);

/// Probability that an arrival finds a free server (Erlang-C complement).
/// r = 0 returns 1 by continuity.
double no_wait_probability(double r, int n_servers);

/// p(0,0): probability that the whole system is empty.
double empty_system_probability(double r, int n_servers);

/// shape * e^x * x^-shape * integral_x^inf t^(shape-1) e^-t dt.
double scaled_upper_incomplete_gamma(double x, double shape);

double hi_marginal_exact(const ModelParams& params, int m);
double agg_exact(double r, int k);
double xhi_exact(const ModelParams& params, int m);

/// Mixes a wait-conditional law with the no-wait atom at the origin.
PmfVector condition_decomposition(const ModelParams& params, const PmfVector& wait_conditional);
JointPmf condition_decomposition(const ModelParams& params, const JointPmf& wait_conditional);

}  // namespace npq
