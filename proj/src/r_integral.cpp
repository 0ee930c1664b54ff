#include "npq/r_integral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npq/scaled_real.hpp"

namespace npq {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

/// D^m_l(x) for l = 0..min(m, l_max) in extended range.
std::vector<ScaledReal> scaled_d_terms(int m, double x, int l_max) {
  const int top = std::min(m, l_max);
  std::vector<ScaledReal> d(static_cast<std::size_t>(top) + 1);
  if (x >= kForwardRecursionThreshold) {
    const double ratio = (1.0 - x) / x;
    d[0] = ScaledReal::pow(x, m);
    for (int l = 1; l <= top; ++l) {
      d[static_cast<std::size_t>(l)] = d[static_cast<std::size_t>(l) - 1] * (static_cast<double>(m + 1 - l) / l * ratio);
    }
    return d;
  }
  const double ratio = x / (1.0 - x);
  ScaledReal cur = ScaledReal::pow(1.0 - x, m);
  for (int l = m;; --l) {
    if (l <= top) d[static_cast<std::size_t>(l)] = cur;
    if (l == 0) break;
    cur *= static_cast<double>(l) / (m - l + 1) * ratio;
  }
  return d;
}

/// Running sums of the D terms, padded with exact ones where k >= m.
std::vector<ScaledReal> scaled_cumulative(int m, double x, int k_max) {
  std::vector<ScaledReal> p(static_cast<std::size_t>(k_max) + 1, ScaledReal(1.0));
  const auto d = scaled_d_terms(m, x, k_max);
  ScaledReal acc;
  for (int k = 0; k <= std::min(m - 1, k_max); ++k) {
    acc += d[static_cast<std::size_t>(k)];
    p[static_cast<std::size_t>(k)] = acc;
  }
  return p;
}

void check_unit_interval(double x) {
  require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "polynomial argument x must lie in [0, 1]");
}

/// Scaled-series evaluator shared by the table and the PMF assemblies.
class SeriesEngine {
 public:
  SeriesEngine(double z0, double x, const SeriesConstants& s, int k_max, int c_max)
      : z0_(z0), x_(x), s_(s), k_max_(k_max), c_max_(c_max) {
    // z0^e for e = -k_max - 1 .. c_max - 1
    z0_pow_.reserve(static_cast<std::size_t>(k_max + c_max) + 1);
    for (int e = -k_max - 1; e <= c_max - 1; ++e) z0_pow_.push_back(ScaledReal::pow(z0_, e));
    columns_.resize(static_cast<std::size_t>(c_max) + 1);
  }

  /// P^(c)_k = z0^(c-k-1) P_k^c(x) for k = 0..k_max.
  const std::vector<double>& column(int c) {
    auto& col = columns_[static_cast<std::size_t>(c)];
    if (!col.empty()) return col;
    const auto p = scaled_cumulative(c, x_, k_max_);
    col.resize(p.size());
    for (int k = 0; k <= k_max_; ++k) {
      const ScaledReal& zp = z0_pow_[static_cast<std::size_t>(c - k - 1 + k_max_ + 1)];
      col[static_cast<std::size_t>(k)] = (p[static_cast<std::size_t>(k)] * zp).to_double();
    }
    return col;
  }

  /// kappa a^(n-k) C(2n-k, n) gamma^k for k = 0..n.
  std::vector<double> weights(int n) const {
    std::vector<ScaledReal> t(static_cast<std::size_t>(n) + 1);
    t[0] = ScaledReal(1.0);
    for (int l = 1; l <= n; ++l) {
      t[static_cast<std::size_t>(l)] = t[static_cast<std::size_t>(l) - 1] * ((1.0 + static_cast<double>(n) / l) * s_.a_ratio);
    }
    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      const ScaledReal term = t[static_cast<std::size_t>(n - k)] * ScaledReal::pow(s_.gamma_ratio, k) * s_.kappa;
      w[static_cast<std::size_t>(k)] = term.to_double();
    }
    return w;
  }

  double r_hat(const std::vector<double>& w, int c) {
    const auto& col = column(c);
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * col[k];
    return s;
  }

  int c_max() const { return c_max_; }

 private:
  double z0_;
  double x_;
  SeriesConstants s_;
  int k_max_;
  int c_max_;
  std::vector<ScaledReal> z0_pow_;
  std::vector<std::vector<double>> columns_;
};

struct EngineSetup {
  double z0 = 0.0;
  double x = 0.0;
  SeriesConstants constants;
};

EngineSetup engine_setup(const ModelParams& params, const RiOptions& options) {
  if (params.nu == 1.0 && options.series_at_unit_hifrac) {
    return {1.0, params.r, series_constants_at_unit_hifrac(params.r)};
  }
  const DerivedConstants c = derive_constants(params);
  require(!c.degenerate(), "the R-integral series needs 0 < nu < 1");
  return {c.z0, c.pole_ratio, *c.series};
}

bool use_series(const ModelParams& params, const RiOptions& options) {
  return !params.single_class() || (params.nu == 1.0 && options.series_at_unit_hifrac);
}

void check_extent(int n) {
  require(n >= 0, "queue-length extent must be >= 0");
}

}  // namespace

std::vector<double> d_terms(int m, double x) {
  check_unit_interval(x);
  require(m >= 0, "polynomial degree m must be >= 0");
  const auto d = scaled_d_terms(m, x, m);
  std::vector<double> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](const ScaledReal& v) { return v.to_double(); });
  return out;
}

std::vector<double> d_cumulative(int m, double x, int k_max) {
  check_unit_interval(x);
  require(m >= 0 && k_max >= 0, "polynomial indices must be >= 0");
  const auto p = scaled_cumulative(m, x, k_max);
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [](const ScaledReal& v) { return std::min(1.0, v.to_double()); });
  return out;
}

std::vector<double> p_polynomial_table(double x, int m_max, int k_max) {
  require(std::isfinite(x) && x >= 0.0 && x < 1.0, "polynomial argument x must lie in [0, 1)");
  require(m_max >= 0 && k_max >= 0, "table extents must be >= 0");
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(m_max + 1) * static_cast<std::size_t>(k_max + 1));
  for (int m = 0; m <= m_max; ++m) {
    const auto row = d_cumulative(m, x, k_max);
    table.insert(table.end(), row.begin(), row.end());
  }
  return table;
}

PoleTriple poles_of(const ModelParams& params) {
  const DerivedConstants c = derive_constants(params);
  return {c.z0, c.z1, c.z2};
}

double r_integral(const PoleTriple& poles, int n, int m) {
  require(n >= 0 && m >= 0, "R-integral indices must be >= 0");
  require(poles.z1 < poles.z0 && poles.z1 < poles.z2 && poles.z0 > 0.0 && poles.z1 >= 0.0,
          "series needs 0 <= z1 < z0 and z1 < z2");
  if (n == 0) return 0.0;
  const int nn = n - 1;
  const double gap = poles.z2 - poles.z1;
  const double x = poles.z1 / poles.z0;
  const double b = gap / (1.0 - x);
  const auto p = scaled_cumulative(m, x, nn);

  // C(2nn - k, nn) from k = nn downwards.
  ScaledReal binom(1.0);
  ScaledReal sum;
  for (int k = nn; k >= 0; --k) {
    if (k < nn) binom *= static_cast<double>(2 * nn - k) / (nn - k);
    sum += binom * ScaledReal::pow(b, k + 1) * ScaledReal::pow(poles.z0, m - k - 1) * p[static_cast<std::size_t>(k)];
  }
  sum *= ScaledReal::pow(gap, -(2 * nn + 2));
  const double v = sum.to_double();
  return nn % 2 == 0 ? v : -v;
}

RiCondition ri_condition(const ModelParams& params) {
  const DerivedConstants c = derive_constants(params);
  require(!c.degenerate(), "the R-integral series needs 0 < nu < 1");
  return {c.series->gamma_ratio, 1.0 - c.pole_ratio, c.series->kappa};
}

RIntegralTable r_hat_table(const ModelParams& params, int n_rows, int m_cols, const RiOptions& options) {
  validate(params);
  check_extent(n_rows);
  check_extent(m_cols);
  require(use_series(params, options), "the R-integral table needs 0 < nu < 1");
  const EngineSetup setup = engine_setup(params, options);
  SeriesEngine engine(setup.z0, setup.x, setup.constants, n_rows, m_cols);

  RIntegralTable t;
  t.n_rows = n_rows;
  t.m_cols = m_cols;
  t.constants = setup.constants;
  t.z0 = setup.z0;
  t.x = setup.x;
  t.r_hat.resize(static_cast<std::size_t>(n_rows + 1) * static_cast<std::size_t>(m_cols + 1));
  for (int n = 0; n <= n_rows; ++n) {
    auto w = engine.weights(n);
    for (int m = 0; m <= m_cols; ++m) {
      t.r_hat[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_cols + 1) + static_cast<std::size_t>(m)] =
          engine.r_hat(w, m);
    }
  }
  t.p_scaled.reserve(static_cast<std::size_t>(m_cols + 1) * static_cast<std::size_t>(n_rows + 1));
  for (int m = 0; m <= m_cols; ++m) {
    const auto& col = engine.column(m);
    t.p_scaled.insert(t.p_scaled.end(), col.begin(), col.end());
  }
  return t;
}

JointPmf joint_ri(const ModelParams& params, int n_max, int m_max, const RiOptions& options) {
  validate(params);
  check_extent(n_max);
  check_extent(m_max);
  JointPmf joint(n_max, m_max, Method::ri);
  if (!use_series(params, options)) {
    if (params.nu == 1.0) {
      for (int m = 0; m <= m_max; ++m) joint(0, m) = geometric_pmf(params.r, m);
    } else {
      for (int n = 0; n <= n_max; ++n) joint(n, 0) = geometric_pmf(params.r, n);
    }
    return joint;
  }

  const EngineSetup setup = engine_setup(params, options);
  const double r_hi = params.nu == 1.0 ? params.r : params.r_hi();
  const double prefactor = (1.0 - params.r) / params.r;
  SeriesEngine engine(setup.z0, setup.x, setup.constants, n_max, n_max + m_max + 3);
  std::vector<double> rh(static_cast<std::size_t>(m_max) + 4);
  for (int n = 0; n <= n_max; ++n) {
    const auto w = engine.weights(n);
    for (int j = 0; j < static_cast<int>(rh.size()); ++j) rh[static_cast<std::size_t>(j)] = engine.r_hat(w, n + j);
    for (int m = 0; m <= m_max; ++m) {
      const auto um = static_cast<std::size_t>(m);
      const double d_hi = rh[um + 3] - rh[um + 2];
      const double d_lo = rh[um + 1] - rh[um];
      joint(n, m) = prefactor * (d_hi - r_hi * d_lo);
    }
  }
  joint.clamp = clamp_roundoff(joint.data());
  return joint;
}

PmfVector lo_marginal_ri(const ModelParams& params, int n_max, const RiOptions& options) {
  validate(params);
  check_extent(n_max);
  PmfVector out;
  out.kind = PmfKind::lo_marginal;
  out.method = Method::ri;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (!use_series(params, options)) {
    if (params.nu == 1.0) {
      out.values[0] = 1.0;
    } else {
      for (int n = 0; n <= n_max; ++n) out.values[static_cast<std::size_t>(n)] = geometric_pmf(params.r, n);
    }
    return out;
  }

  const EngineSetup setup = engine_setup(params, options);
  const double r_hi = params.nu == 1.0 ? params.r : params.r_hi();
  const double prefactor = (1.0 - params.r) / params.r;
  SeriesEngine engine(setup.z0, setup.x, setup.constants, n_max, n_max + 2);
  for (int n = 0; n <= n_max; ++n) {
    const auto w = engine.weights(n);
    out.values[static_cast<std::size_t>(n)] = -prefactor * (engine.r_hat(w, n + 2) - r_hi * engine.r_hat(w, n));
  }
  out.clamp = clamp_roundoff(out.values);
  return out;
}

PmfVector xlo_ri(const ModelParams& params, int n_max, const RiOptions& options) {
  validate(params);
  check_extent(n_max);
  PmfVector out;
  out.kind = PmfKind::xlo;
  out.method = Method::ri;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (!use_series(params, options)) {
    if (params.nu == 1.0) {
      out.values[0] = 1.0 - params.r;
    } else {
      for (int n = 0; n <= n_max; ++n) out.values[static_cast<std::size_t>(n)] = geometric_pmf(params.r, n);
    }
    return out;
  }

  const EngineSetup setup = engine_setup(params, options);
  const double r_hi = params.nu == 1.0 ? params.r : params.r_hi();
  const double prefactor = (1.0 - params.r) / params.r;
  SeriesEngine engine(setup.z0, setup.x, setup.constants, n_max, n_max + 3);
  for (int n = 0; n <= n_max; ++n) {
    const auto w = engine.weights(n);
    double rh[4];
    for (int j = 0; j < 4; ++j) rh[j] = engine.r_hat(w, n + j);
    out.values[static_cast<std::size_t>(n)] = prefactor * ((rh[3] - rh[2]) - r_hi * (rh[1] - rh[0]));
  }
  out.clamp = clamp_roundoff(out.values);
  return out;
}

double r_seed_m0(const PoleTriple& poles, int n) {
  require(n >= 0, "seed index must be >= 0");
  const double a = poles.z1 - poles.z0;
  const double c = poles.z1 - poles.z2;
  const double y = a / c;
  // p_n(y) = sum_k C(k + n, k) y^k
  double term = 1.0;
  double p = 1.0;
  for (int k = 1; k <= n; ++k) {
    term *= static_cast<double>(k + n) / k * y;
    p += term;
  }
  const double v = p / std::pow(a * c, n + 1);
  return n % 2 == 0 ? v : -v;
}

double r_seed_m1(const PoleTriple& poles, int n) {
  require(n >= 0, "seed index must be >= 0");
  const double c = poles.z1 - poles.z2;
  double binom = 1.0;
  for (int k = 1; k <= n; ++k) binom *= static_cast<double>(n + k) / k;
  const double lead = binom / std::pow(c, 2 * n + 1);
  return (n % 2 == 0 ? lead : -lead) + poles.z0 * r_seed_m0(poles, n);
}

BackwardDiagnostic backwards_recurrence_diagnostic(const ModelParams& params, int n_max, int m_max) {
  validate(params);
  require(!params.single_class(), "the backwards recurrence needs 0 < nu < 1");
  require(n_max >= 1 && m_max >= 1, "diagnostic extents must be >= 1");
  const PoleTriple poles = poles_of(params);
  const double sum = poles.z1 + poles.z2;
  const double prod = params.r_hi();

  BackwardDiagnostic d;
  d.n_max = n_max;
  d.m_max = m_max;
  const auto size = static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(m_max + 1);
  d.backward.assign(size, 0.0);
  d.series.assign(size, 0.0);
  d.digits.assign(size, 16.0);
  auto idx = [&](int n, int m) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max + 1) + static_cast<std::size_t>(m);
  };

  for (int n = 1; n <= n_max; ++n) {
    d.backward[idx(n, 0)] = r_seed_m0(poles, n - 1);
    d.backward[idx(n, 1)] = r_seed_m1(poles, n - 1);
    for (int m = 2; m <= m_max; ++m) {
      d.backward[idx(n, m)] =
          d.backward[idx(n - 1, m - 2)] - prod * d.backward[idx(n, m - 2)] + sum * d.backward[idx(n, m - 1)];
    }
  }

  const RIntegralTable table = r_hat_table(params, n_max - 1, m_max);
  const double neg_r_lo = -params.r_lo();
  for (int n = 1; n <= n_max; ++n) {
    const double unscale = std::pow(neg_r_lo, n - 1);
    for (int m = 0; m <= m_max; ++m) {
      const double s = table(n - 1, m) / unscale;
      const double b = d.backward[idx(n, m)];
      d.series[idx(n, m)] = s;
      double digits = 16.0;
      if (s != 0.0) {
        const double rel = std::fabs(b - s) / std::fabs(s);
        if (!std::isfinite(rel)) {
          digits = 0.0;
        } else if (rel > 0.0) {
          digits = std::clamp(-std::log10(rel), 0.0, 16.0);
        }
      } else if (b != 0.0) {
        digits = 0.0;
      }
      d.digits[idx(n, m)] = digits;
      if (digits < d.min_digits) {
        d.min_digits = digits;
        d.worst_n = n;
        d.worst_m = m;
      }
    }
  }
  return d;
}

double limiting_r_value(const ModelParams& params, int n, int m) {
  validate(params);
  require(n >= 1 && m >= 0, "limit needs n >= 1 and m >= 0");
  const double r = params.r;

  if (params.nu == 1.0) {
    const int nn = n - 1;
    const auto p = scaled_cumulative(m, r, nn);
    ScaledReal binom(1.0);
    ScaledReal sum;
    for (int k = nn; k >= 0; --k) {
      if (k < nn) binom *= static_cast<double>(2 * nn - k) / (nn - k);
      sum += binom * p[static_cast<std::size_t>(k)];
    }
    sum *= ScaledReal::pow(1.0 - r, -(2 * nn + 2));
    const double v = sum.to_double();
    return nn % 2 == 0 ? v : -v;
  }

  require(params.nu > 0.0 && params.nu <= kSmallHifracBand,
          "limiting values are only defined for nu = 1 or 0 < nu <= " + std::to_string(kSmallHifracBand));
  const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
  if (m > n) return 0.0;
  if (m == n) return sign * (1.0 - std::pow(1.0 + r, -n));
  return sign / std::pow(params.nu, n - m);
}

}  // namespace npq
