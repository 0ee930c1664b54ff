#include "npq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "npq/chebyshev.hpp"
#include "npq/quad_recurrence.hpp"

namespace npq {

namespace {

class MopAccumulator {
 public:
  void add(double computed, double reference, int n, int m) {
    ++points_;
    if (!(computed > 0.0)) {
      if (nonpositive_++ == 0) {
        worst_ = std::numeric_limits<double>::infinity();
        worst_n_ = n;
        worst_m_ = m;
      }
      return;
    }
    const double d = std::fabs(std::log(computed / reference));
    if (nonpositive_ == 0 && (d > worst_ || worst_n_ < 0)) {
      worst_ = d;
      worst_n_ = n;
      worst_m_ = m;
    }
  }

  MopReport finish(double p_lim, int n_lim) const {
    if (points_ == 0) throw ValidationError("no reference values above p_lim in the compared range");
    MopReport rep;
    rep.p_lim = p_lim;
    rep.n_lim = n_lim;
    rep.points = points_;
    rep.nonpositive = nonpositive_;
    rep.worst_n = worst_n_;
    rep.worst_m = worst_m_;
    if (nonpositive_ > 0) {
      rep.xi = 0.0;
    } else if (worst_ == 0.0) {
      rep.xi = kMopCap;
    } else {
      rep.xi = std::clamp(-std::log10(worst_), 0.0, kMopCap);
    }
    rep.passed = rep.xi >= rep.threshold;
    return rep;
  }

 private:
  double worst_ = 0.0;
  int worst_n_ = -1;
  int worst_m_ = -1;
  std::size_t points_ = 0;
  std::size_t nonpositive_ = 0;
};

MopReport stamp(MopReport rep, const std::string& name, const ModelParams& params, Method method, double threshold) {
  rep.test_name = name;
  rep.method = method;
  rep.r = params.r;
  rep.nu = params.nu;
  rep.threshold = threshold;
  rep.passed = rep.xi >= threshold;
  return rep;
}

/// Largest k <= n_lim with term(k) > p_lim, or -1.
template <class Term>
int last_above(Term term, double p_lim, int n_lim) {
  int last = -1;
  for (int k = 0; k <= n_lim; ++k) {
    if (term(k) > p_lim) last = k;
  }
  return last;
}

int last_above(const std::vector<double>& v, double p_lim, int n_lim) {
  const int hi = std::min(n_lim, static_cast<int>(v.size()) - 1);
  return last_above([&](int k) { return v[static_cast<std::size_t>(k)]; }, p_lim, hi);
}

PmfVector make_vector(std::vector<double> values, PmfKind kind, Method method) {
  PmfVector v;
  v.values = std::move(values);
  v.kind = kind;
  v.method = method;
  return v;
}

struct BatteryPlan {
  double p_agg, p_xhi, p_xlo, p_nn;
  int k_agg, m_xhi, n_xlo, n_nn, m_nn;
};

BatteryPlan plan_battery(const ModelParams& params, const PmfVector& f_lo, const TestOptions& o) {
  BatteryPlan b{};
  const int lim = o.n_lim;
  b.p_agg = o.p_lim.value_or(kDefaultPlim);
  b.p_xhi = o.p_lim.value_or(kXhiPlim);
  b.p_xlo = o.p_lim.value_or(kDefaultPlim);
  b.p_nn = o.p_lim.value_or(kDefaultPlim);
  b.k_agg = std::max(0, last_above([&](int k) { return agg_exact(params.r, k); }, b.p_agg, lim));
  b.m_xhi = std::max(0, last_above([&](int m) { return xhi_exact(params, m); }, b.p_xhi, lim));
  const double r_lo = params.r_lo();
  b.n_xlo = std::max(
      0, last_above([&](int n) { return n == 0 ? 1.0 - params.r : r_lo * f_lo[static_cast<std::size_t>(n - 1)]; },
                    b.p_xlo, lim));
  b.n_nn = std::max(0, last_above(f_lo.values, b.p_nn, lim));
  b.m_nn = std::max(0, last_above([&](int m) { return hi_marginal_exact(params, m); }, b.p_nn, lim));
  return b;
}

MopReport run_agg(const ModelParams& params, const JointPmf& joint, const BatteryPlan& b, const TestOptions& o) {
  const auto sums = anti_diagonal_sums(joint);
  std::vector<double> computed(sums.begin(), sums.begin() + b.k_agg + 1);
  std::vector<double> exact(computed.size());
  for (int k = 0; k <= b.k_agg; ++k) exact[static_cast<std::size_t>(k)] = agg_exact(params.r, k);
  return mop(make_vector(std::move(computed), PmfKind::aggregate, joint.method),
             make_vector(std::move(exact), PmfKind::aggregate, Method::exact), b.p_agg, o.n_lim);
}

MopReport run_xhi(const ModelParams& params, const JointPmf& joint, const BatteryPlan& b, const TestOptions& o) {
  std::vector<double> computed(static_cast<std::size_t>(b.m_xhi) + 1), exact(computed.size());
  for (int m = 0; m <= b.m_xhi; ++m) {
    computed[static_cast<std::size_t>(m)] = joint(0, m);
    exact[static_cast<std::size_t>(m)] = xhi_exact(params, m);
  }
  auto rep = mop(make_vector(std::move(computed), PmfKind::xhi, joint.method),
                 make_vector(std::move(exact), PmfKind::xhi, Method::exact), b.p_xhi, o.n_lim);
  rep.worst_m = rep.worst_n;
  rep.worst_n = 0;
  return rep;
}

MopReport run_xlo(const ModelParams& params, const JointPmf& joint, const PmfVector& f_lo, const BatteryPlan& b,
                  const TestOptions& o) {
  std::vector<double> computed(static_cast<std::size_t>(b.n_xlo) + 1), reference(computed.size());
  for (int n = 0; n <= b.n_xlo; ++n) {
    computed[static_cast<std::size_t>(n)] = joint(n, 0);
    reference[static_cast<std::size_t>(n)] =
        n == 0 ? 1.0 - params.r : params.r_lo() * f_lo[static_cast<std::size_t>(n - 1)];
  }
  return mop(make_vector(std::move(computed), PmfKind::xlo, joint.method),
             make_vector(std::move(reference), PmfKind::xlo, f_lo.method), b.p_xlo, o.n_lim, 1);
}

MopReport run_nn(const ModelParams& params, const JointPmf& joint, const BatteryPlan& b, const TestOptions& o) {
  const double r = params.r, r_lo = params.r_lo(), r_hi = params.r_hi();
  JointPmf nn(b.n_nn, b.m_nn, joint.method), ref(b.n_nn, b.m_nn, joint.method);
  for (int n = 1; n <= b.n_nn; ++n) {
    for (int m = 1; m <= b.m_nn; ++m) {
      nn(n, m) = (joint(n, m + 1) + r_lo * joint(n - 1, m) + r_hi * joint(n, m - 1)) / (1.0 + r);
      ref(n, m) = joint(n, m);
    }
  }
  return mop(nn, ref, b.p_nn, o.n_lim, 1);
}

bool is_battery_test(const std::string& t) { return t == "agg" || t == "xhi" || t == "xlo" || t == "nn"; }

}  // namespace

MopReport mop(const PmfVector& computed, const PmfVector& reference, double p_lim, int n_lim, int first) {
  if (computed.size() != reference.size()) throw DomainError("mop: computed and reference lengths differ");
  MopAccumulator acc;
  const int hi = std::min(n_lim, static_cast<int>(reference.size()) - 1);
  for (int k = std::max(first, 0); k <= hi; ++k) {
    const double ref = reference[static_cast<std::size_t>(k)];
    if (ref > p_lim) acc.add(computed[static_cast<std::size_t>(k)], ref, k, -1);
  }
  return acc.finish(p_lim, n_lim);
}

MopReport mop(const JointPmf& computed, const JointPmf& reference, double p_lim, int n_lim, int first) {
  if (computed.rows() != reference.rows() || computed.cols() != reference.cols()) {
    throw DomainError("mop: computed and reference shapes differ");
  }
  MopAccumulator acc;
  const int n_hi = std::min(n_lim, reference.n_max());
  const int m_hi = std::min(n_lim, reference.m_max());
  for (int n = std::max(first, 0); n <= n_hi; ++n) {
    for (int m = std::max(first, 0); m <= m_hi; ++m) {
      const double ref = reference(n, m);
      if (ref > p_lim) acc.add(computed(n, m), ref, n, m);
    }
  }
  return acc.finish(p_lim, n_lim);
}

JointPmf joint_by_method(const ModelParams& params, Method method, int n_max, int m_max, const RiOptions& ri) {
  switch (method) {
    case Method::qr:
      return joint_qr(params, n_max, m_max);
    case Method::ri:
      return joint_ri(params, n_max, m_max, ri);
    case Method::cheb:
      return joint_cheb(params, n_max, m_max);
    default:
      throw DomainError("joint engine must be qr, ri or cheb");
  }
}

PmfVector lo_marginal_by_method(const ModelParams& params, Method method, int n_max, const RiOptions& ri) {
  switch (method) {
    case Method::qr:
    case Method::cheb:
      return lo_marginal_qr(params, n_max);
    case Method::ri:
      return lo_marginal_ri(params, n_max, ri);
    default:
      throw DomainError("marginal engine must be qr, ri or cheb");
  }
}

std::vector<MopReport> consistency_battery(const ModelParams& params, Method method,
                                           const std::vector<std::string>& tests, const TestOptions& options) {
  for (const auto& t : tests) {
    if (!is_battery_test(t)) throw DomainError("unknown consistency test '" + t + "'");
  }
  if (options.n_lim < 1) throw DomainError("n_lim must be >= 1");
  const auto f_lo = lo_marginal_by_method(params, method, options.n_lim, options.ri);
  const auto b = plan_battery(params, f_lo, options);

  int n_max = 0, m_max = 0;
  for (const auto& t : tests) {
    if (t == "agg") n_max = std::max(n_max, b.k_agg), m_max = std::max(m_max, b.k_agg);
    if (t == "xhi") m_max = std::max(m_max, b.m_xhi);
    if (t == "xlo") n_max = std::max(n_max, b.n_xlo);
    if (t == "nn") n_max = std::max(n_max, b.n_nn), m_max = std::max(m_max, b.m_nn + 1);
  }
  const auto joint = joint_by_method(params, method, n_max, m_max, options.ri);

  std::vector<MopReport> out;
  for (const auto& t : tests) {
    MopReport rep;
    if (t == "agg") rep = run_agg(params, joint, b, options);
    if (t == "xhi") rep = run_xhi(params, joint, b, options);
    if (t == "xlo") rep = run_xlo(params, joint, f_lo, b, options);
    if (t == "nn") rep = run_nn(params, joint, b, options);
    out.push_back(stamp(rep, t, params, method, options.threshold));
  }
  return out;
}

MopReport aggregation_test(const ModelParams& params, Method method, const TestOptions& options) {
  return consistency_battery(params, method, {"agg"}, options).front();
}
MopReport xhi_test(const ModelParams& params, Method method, const TestOptions& options) {
  return consistency_battery(params, method, {"xhi"}, options).front();
}
MopReport xlo_test(const ModelParams& params, Method method, const TestOptions& options) {
  return consistency_battery(params, method, {"xlo"}, options).front();
}
MopReport nn_test(const ModelParams& params, Method method, const TestOptions& options) {
  return consistency_battery(params, method, {"nn"}, options).front();
}

MopReport quadratic_test(const ModelParams& params, const TestOptions& options) {
  const int lim = options.n_lim;
  if (lim < 1) throw DomainError("n_lim must be >= 1");
  const double p_lim = options.p_lim.value_or(kDefaultPlim);
  const auto qr = joint_qr(params, lim, lim);
  const auto ri = joint_ri(params, lim, lim, options.ri);
  auto rep = stamp(mop(ri, qr, p_lim, lim), "qr", params, Method::ri, options.threshold);

  QuadraticExtent e;
  e.p_min = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= lim; ++n) {
    for (int m = 0; m <= lim; ++m) {
      const double v = qr(n, m);
      if (v > p_lim) {
        e.n_lo = std::max(e.n_lo, n);
        e.n_hi = std::max(e.n_hi, m);
        e.p_min = std::min(e.p_min, v);
      }
    }
  }
  rep.extent = e;
  return rep;
}

std::vector<std::pair<double, double>> standard_grid() {
  std::vector<std::pair<double, double>> g;
  for (double r : {0.5, 0.75, 0.9, 0.95, 0.99, 0.999, 0.9999}) {
    for (int i = 1; i <= 19; ++i) g.emplace_back(r, i / 20.0);
  }
  return g;
}

std::vector<MopReport> validation_sweep(const std::vector<std::pair<double, double>>& grid,
                                        const std::vector<Method>& methods, const std::vector<std::string>& tests,
                                        const SweepOptions& options) {
  std::vector<std::string> battery;
  for (const auto& t : tests) {
    if (is_battery_test(t)) {
      battery.push_back(t);
    } else if (t != "qr" && t != "oracle" && t != "mc") {
      throw DomainError("unknown test '" + t + "'");
    }
  }
  for (const auto& [r, nu] : grid) ModelParams::make(r, nu);

  // One job per grid point keeps each point's records contiguous.
  auto job = [&](std::size_t i) {
    const auto params = ModelParams::make(grid[i].first, grid[i].second);
    std::vector<MopReport> recs;
    for (const auto& t : tests) {
      if (is_battery_test(t)) {
        if (t != battery.front()) continue;
        for (Method m : methods) {
          auto b = consistency_battery(params, m, battery, options.test);
          recs.insert(recs.end(), b.begin(), b.end());
        }
      } else if (t == "qr") {
        recs.push_back(quadratic_test(params, options.test));
      } else if (t == "oracle") {
        recs.push_back(oracle_test(params, 20, options.oracle));
      } else {
        recs.push_back(mc_test(params, options.mc));
      }
    }
    return recs;
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::vector<MopReport>> slots(grid.size());
  std::vector<std::future<void>> running;
  std::size_t next = 0;
  auto launch = [&] {
    const std::size_t i = next++;
    running.push_back(std::async(std::launch::async, [&, i] { slots[i] = job(i); }));
  };
  while (next < grid.size() || !running.empty()) {
    while (next < grid.size() && running.size() < threads) launch();
    running.front().get();
    running.erase(running.begin());
  }

  std::vector<MopReport> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace npq
