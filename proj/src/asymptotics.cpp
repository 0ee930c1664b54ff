#include "npq/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "npq/quad_recurrence.hpp"
#include "npq/r_integral.hpp"

namespace npq {

std::string_view to_string(TailRegime regime) {
  switch (regime) {
    case TailRegime::critical:
      return "critical";
    case TailRegime::pole_plus_cut:
      return "pole_plus_cut";
    case TailRegime::cut_only:
      return "cut_only";
  }
  return "unknown";
}

TailRegime tail_regime(const ModelParams& params) {
  validate(params);
  const double r = params.r;
  if (std::fabs(params.nu - r) <= kCriticalTolerance * r) return TailRegime::critical;
  return r * r - params.r_hi() >= 0.0 ? TailRegime::pole_plus_cut : TailRegime::cut_only;
}

double TailAsymptote::pole_term(int n) const {
  if (regime != TailRegime::pole_plus_cut) return 0.0;
  return pole_coeff * (1.0 - r) * std::exp((n - 1) * std::log(r));
}

double TailAsymptote::cut_term(int n) const {
  if (regime == TailRegime::critical) return 0.0;
  return cut_coeff * std::exp(-(n - 0.5) * std::log(chi) - 1.5 * std::log(static_cast<double>(n)));
}

double TailAsymptote::operator()(int n) const {
  if (n < 1) throw DomainError("asymptote requires n >= 1");
  if (regime == TailRegime::critical) {
    return cut_coeff * std::exp(n * std::log(r) - 0.5 * std::log(static_cast<double>(n)));
  }
  return pole_term(n) + cut_term(n);
}

TailAsymptote tail_asymptote(const ModelParams& params) {
  validate(params);
  if (params.single_class()) throw DomainError("tail asymptote requires 0 < nu < 1");
  TailAsymptote t;
  t.regime = tail_regime(params);
  t.r = params.r;
  const double r = params.r;
  const double r_hi = params.r_hi();
  const double r_lo = params.r_lo();
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  if (t.regime == TailRegime::critical) {
    t.chi = 1.0 / r;
    t.cut_coeff = std::sqrt((1.0 - r) / (std::numbers::pi * r));
    return t;
  }
  const double s = 1.0 - std::sqrt(r_hi);
  t.chi = 1.0 + s * s / r_lo;
  // 1 - r(1-r)/r_lo rewritten without cancellation
  if (t.regime == TailRegime::pole_plus_cut) t.pole_coeff = (r * r - r_hi) / r_lo;
  t.cut_coeff = std::sqrt(std::sqrt(r_hi) / r_lo) / (2.0 * sqrt_pi * r) * (1.0 - r) / (t.chi - 1.0 / r);
  return t;
}

double lo_tail_asymptote(const ModelParams& params, int n) { return tail_asymptote(params)(n); }

ConvergenceReport asymptote_convergence_report(const ModelParams& params, const PmfVector& lo_marginal, int n_first,
                                               int n_last, double noise_floor) {
  if (n_first < 1 || n_last < n_first) throw DomainError("convergence range must satisfy 1 <= n_first <= n_last");
  if (static_cast<std::size_t>(n_last) >= lo_marginal.size()) throw DomainError("marginal shorter than range");
  const auto asym = tail_asymptote(params);
  ConvergenceReport rep;
  rep.regime = asym.regime;
  rep.noise_floor = noise_floor;
  for (int n = n_first; n <= n_last; ++n) {
    ConvergencePoint p;
    p.n = n;
    p.f_lo = lo_marginal[static_cast<std::size_t>(n)];
    p.asymptote = asym(n);
    p.rel_error = std::fabs(p.f_lo / p.asymptote - 1.0);
    if (!rep.points.empty() && !(p.rel_error <= rep.points.back().rel_error + noise_floor) && rep.decreasing) {
      rep.decreasing = false;
      rep.first_increase = n;
    }
    rep.points.push_back(p);
  }
  return rep;
}

ConvergenceReport asymptote_convergence_report(const ModelParams& params, int n_first, int n_last, Method method,
                                               double noise_floor) {
  if (n_last < 0) throw DomainError("convergence range must satisfy 1 <= n_first <= n_last");
  PmfVector f;
  if (method == Method::qr) {
    f = lo_marginal_qr(params, n_last);
  } else if (method == Method::ri) {
    f = lo_marginal_ri(params, n_last);
  } else {
    throw DomainError("convergence report supports methods qr and ri");
  }
  return asymptote_convergence_report(params, f, n_first, n_last, noise_floor);
}

}  // namespace npq
