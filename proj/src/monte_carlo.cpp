#include <cmath>
#include <random>

#include "npq/quad_recurrence.hpp"
#include "npq/validation.hpp"

namespace npq {

namespace {

struct BatchStats {
  std::vector<double> cell_time;  // grid x grid
  std::vector<double> agg_time;   // grid
  double busy_time = 0.0;
};

double std_error(const std::vector<double>& x) {
  const auto b = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= b;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (b - 1.0) / b);
}

}  // namespace

McResult monte_carlo(const ModelParams& params, const McOptions& o) {
  validate(params);
  if (o.n_servers < 1) throw DomainError("simulation needs at least one server");
  if (o.n_events < 100'000) throw DomainError("simulation needs at least 1e5 events");
  if (o.batches < 2) throw DomainError("batch means need at least two batches");
  if (o.grid < 1) throw DomainError("occupancy grid must be >= 1");
  if (!(o.warmup_fraction >= 0.0 && o.warmup_fraction < 1.0)) throw DomainError("warm-up fraction must lie in [0, 1)");

  const int g = o.grid;
  const int servers = o.n_servers;
  const double lambda = params.r * servers;  // unit service rate
  const double lambda_hi = params.nu * lambda;

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  McResult out;
  out.seed = o.seed;
  out.warmup_events = static_cast<std::int64_t>(o.warmup_fraction * static_cast<double>(o.n_events));
  out.events = o.n_events;
  const std::int64_t measured = o.n_events - out.warmup_events;
  const std::int64_t per_batch = measured / o.batches;

  std::vector<BatchStats> batches(static_cast<std::size_t>(o.batches));
  for (auto& b : batches) {
    b.cell_time.assign(static_cast<std::size_t>(g) * g, 0.0);
    b.agg_time.assign(static_cast<std::size_t>(g), 0.0);
  }
  double overflow = 0.0;

  int busy = 0, n = 0, m = 0;
  for (std::int64_t e = 0; e < o.n_events; ++e) {
    const double total = lambda + busy;
    const std::int64_t j = e - out.warmup_events;
    if (j >= 0 && busy == servers) {
      // expected sojourn in place of a sampled one: same mean, less noise
      const double dt = 1.0 / total;
      auto& b = batches[static_cast<std::size_t>(std::min<std::int64_t>(j / per_batch, o.batches - 1))];
      b.busy_time += dt;
      if (n < g && m < g) {
        b.cell_time[static_cast<std::size_t>(n) * g + m] += dt;
      } else {
        overflow += dt;
      }
      if (n + m < g) b.agg_time[static_cast<std::size_t>(n + m)] += dt;
    }
    const double u = unit(rng) * total;
    if (u < lambda) {
      if (busy < servers) {
        ++busy;
      } else if (u < lambda_hi) {
        ++m;
      } else {
        ++n;
      }
    } else if (m > 0) {
      --m;
    } else if (n > 0) {
      --n;
    } else {
      --busy;
    }
  }

  out.estimate = JointPmf(g - 1, g - 1, Method::monte_carlo);
  out.std_error = JointPmf(g - 1, g - 1, Method::monte_carlo);
  out.aggregate.assign(static_cast<std::size_t>(g), 0.0);
  out.aggregate_error.assign(static_cast<std::size_t>(g), 0.0);
  for (const auto& b : batches) out.busy_time += b.busy_time;
  if (!(out.busy_time > 0.0)) return out;
  out.overflow = overflow / out.busy_time;

  std::vector<double> ratio(batches.size());
  auto fill = [&](auto time_of, double& estimate, double& error) {
    double total = 0.0;
    for (std::size_t i = 0; i < batches.size(); ++i) {
      const double t = time_of(batches[i]);
      total += t;
      ratio[i] = batches[i].busy_time > 0.0 ? t / batches[i].busy_time : 0.0;
    }
    estimate = total / out.busy_time;
    error = std_error(ratio);
  };
  for (int i = 0; i < g; ++i) {
    for (int k = 0; k < g; ++k) {
      const auto idx = static_cast<std::size_t>(i) * g + k;
      fill([idx](const BatchStats& b) { return b.cell_time[idx]; }, out.estimate(i, k), out.std_error(i, k));
    }
    const auto ui = static_cast<std::size_t>(i);
    fill([ui](const BatchStats& b) { return b.agg_time[ui]; }, out.aggregate[ui], out.aggregate_error[ui]);
  }
  return out;
}

MopReport mc_test(const ModelParams& params, const McOptions& options, double cell_floor, double z_max) {
  const auto sim = monte_carlo(params, options);
  const int e = options.grid - 1;
  const auto exact = joint_qr(params, e, e);

  double worst = 0.0;
  int worst_n = -1, worst_m = -1;
  std::size_t points = 0;
  auto score = [&](double est, double err, double ref, int n, int m) {
    if (!(ref > cell_floor)) return;
    ++points;
    const double diff = std::fabs(est - ref);
    const double z = err > 0.0 ? diff / err : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (z > worst || worst_n < 0) worst = z, worst_n = n, worst_m = m;
  };
  for (int n = 0; n <= e; ++n) {
    for (int m = 0; m <= e; ++m) score(sim.estimate(n, m), sim.std_error(n, m), exact(n, m), n, m);
  }
  for (int k = 0; k <= e; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    score(sim.aggregate[uk], sim.aggregate_error[uk], agg_exact(params.r, k), k, -1);
  }
  if (points == 0) throw ValidationError("no cells above the simulation floor");

  auto rep = mop(sim.estimate, exact, cell_floor, e);
  rep.test_name = "mc";
  rep.method = Method::monte_carlo;
  rep.r = params.r;
  rep.nu = params.nu;
  rep.points = points;
  rep.worst_n = worst_n;
  rep.worst_m = worst_m;
  rep.threshold = z_max;
  rep.worst_z = worst;
  rep.seed = options.seed;
  rep.passed = worst <= z_max;
  return rep;
}

}  // namespace npq
