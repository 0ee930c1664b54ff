#include "npq/quad_recurrence.hpp"

#include "npq/series.hpp"

namespace npq {

namespace {

double resolve_scale(const ModelParams& params, const QrOptions& options) {
  const double scale = options.scale.value_or(params.r_lo());
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale factor Lambda must be finite and > 0");
  return scale;
}

void check_extent(int n) {
  if (n < 0) throw DomainError("queue-length extent must be >= 0");
}

}  // namespace

PmfVector lo_marginal_qr(const ModelParams& params, int n_max, const QrOptions& options) {
  validate(params);
  check_extent(n_max);
  PmfVector out;
  out.kind = PmfKind::lo_marginal;
  out.method = Method::qr;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);

  if (params.nu == 1.0) {
    out.values[0] = 1.0;
    return out;
  }
  if (params.nu == 0.0) {
    for (int n = 0; n <= n_max; ++n) out.values[static_cast<std::size_t>(n)] = geometric_pmf(params.r, n);
    return out;
  }

  const double scale = resolve_scale(params, options);
  const auto g = lo_pgf_coefficients(params.r, params.r_lo(), n_max, scale);
  const double weight = 1.0 - params.r;
  for (std::size_t n = 0; n < g.size(); ++n) out.values[n] = weight * g[n];
  out.clamp = clamp_roundoff(out.values);
  return out;
}

LambdaTaylor lambda_taylor(const ModelParams& params, int n_max, RootSign sign, const QrOptions& options) {
  validate(params);
  check_extent(n_max);
  LambdaTaylor out;
  out.sign = sign;
  const int sgn = sign == RootSign::plus ? 1 : -1;
  const auto size = static_cast<std::size_t>(n_max) + 1;

  if (params.single_class()) {
    // The roots are polynomials in p: {1, r} when nu = 1 and {1 + r - r p, 0} when nu = 0.
    out.coeffs.assign(size, 0.0);
    out.scale = options.scale.value_or(params.r_lo());
    if (params.nu == 1.0) {
      out.coeffs[0] = sgn > 0 ? 1.0 : params.r;
    } else if (sgn > 0) {
      out.coeffs[0] = 1.0 + params.r;
      if (n_max >= 1) out.coeffs[1] = -params.r;
    }
    out.scaled = out.coeffs;
    return out;
  }

  out.scale = resolve_scale(params, options);
  out.coeffs = lambda_taylor_series(params.r, params.r_lo(), params.r_hi(), n_max, sgn, out.scale, &out.scaled);
  return out;
}

JointPmf joint_qr(const ModelParams& params, int n_max, int m_max, const QrOptions& options) {
  validate(params);
  check_extent(n_max);
  check_extent(m_max);
  JointPmf joint(n_max, m_max, Method::qr);

  if (params.nu == 1.0) {
    for (int m = 0; m <= m_max; ++m) joint(0, m) = geometric_pmf(params.r, m);
    return joint;
  }
  if (params.nu == 0.0) {
    for (int n = 0; n <= n_max; ++n) joint(n, 0) = geometric_pmf(params.r, n);
    return joint;
  }

  const double scale = resolve_scale(params, options);
  const auto n_trunc = static_cast<std::size_t>(n_max);
  const auto g = lo_pgf_coefficients(params.r, params.r_lo(), n_max, scale);
  const auto lambda1 = lambda_taylor_series(params.r, params.r_lo(), params.r_hi(), n_max, -1, scale);

  std::vector<double> one_minus_lambda1(lambda1.size());
  for (std::size_t k = 0; k < lambda1.size(); ++k) one_minus_lambda1[k] = -lambda1[k];
  one_minus_lambda1[0] += 1.0;

  std::vector<double> phi = convolve_truncated(g, one_minus_lambda1, n_trunc);
  const double weight = 1.0 - params.r;
  for (double& v : phi) v *= weight;

  for (int m = 0;; ++m) {
    for (int n = 0; n <= n_max; ++n) joint(n, m) = phi[static_cast<std::size_t>(n)];
    if (m == m_max) break;
    phi = convolve_truncated(phi, lambda1, n_trunc);
  }
  joint.clamp = clamp_roundoff(joint.data());
  return joint;
}

}  // namespace npq
