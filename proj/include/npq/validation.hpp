#pragma once

// Validation battery: log-space agreement measures between computed and
// reference distributions, the consistency tests built on them, a truncated
// CTMC oracle and a discrete-event simulator of the multi-server queue.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "npq/model.hpp"
#include "npq/pmf.hpp"
#include "npq/r_integral.hpp"

namespace npq {

/// Raised when a measure has nothing to measure.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMopCap = 16.0;
inline constexpr double kDefaultPlim = 1e-20;
inline constexpr double kXhiPlim = 1e-30;
inline constexpr int kDefaultNlim = 1000;
inline constexpr double kDefaultThreshold = 8.0;
inline constexpr double kOracleTolerance = 1e-10;

/// Smallest rectangle [0, n_lo] x [0, n_hi] holding every point above p_lim.
struct QuadraticExtent {
  int n_hi = 0;
  int n_lo = 0;
  double p_min = 0.0;
};

struct MopReport {
  std::string test_name;
  Method method = Method::qr;
  double r = 0.0;
  double nu = 0.0;
  double xi = kMopCap;
  int worst_n = -1;
  int worst_m = -1;  // -1 for one-dimensional tests
  int n_lim = kDefaultNlim;
  double p_lim = kDefaultPlim;
  std::size_t points = 0;
  std::size_t nonpositive = 0;
  double threshold = kDefaultThreshold;
  bool passed = false;
  std::optional<QuadraticExtent> extent;
  std::optional<double> max_abs_diff;  // oracle
  std::optional<double> worst_z;       // monte carlo
  std::optional<std::uint64_t> seed;
};

/// Xi = -max log10|ln f - ln f_ref| over k in [first, n_lim] with f_ref(k) > p_lim,
/// clamped to [0, 16]. Nonpositive computed values at qualifying points give Xi = 0.
MopReport mop(const PmfVector& computed, const PmfVector& reference, double p_lim, int n_lim, int first = 0);

/// Same over the grid [first, n_lim]^2 clipped to the common shape.
MopReport mop(const JointPmf& computed, const JointPmf& reference, double p_lim, int n_lim, int first = 0);

struct TestOptions {
  int n_lim = kDefaultNlim;
  std::optional<double> p_lim;  // per-test default when unset
  double threshold = kDefaultThreshold;
  RiOptions ri{.series_at_unit_hifrac = true};
};

/// Joint and low marginal by engine. cheb takes its marginal from qr.
JointPmf joint_by_method(const ModelParams& params, Method method, int n_max, int m_max, const RiOptions& ri = {});
PmfVector lo_marginal_by_method(const ModelParams& params, Method method, int n_max, const RiOptions& ri = {});

MopReport aggregation_test(const ModelParams& params, Method method, const TestOptions& options = {});
MopReport xhi_test(const ModelParams& params, Method method, const TestOptions& options = {});
MopReport xlo_test(const ModelParams& params, Method method, const TestOptions& options = {});
MopReport nn_test(const ModelParams& params, Method method, const TestOptions& options = {});

/// ri against qr on [0, n_lim]^2, with the extent of the qr mass above p_lim.
MopReport quadratic_test(const ModelParams& params, const TestOptions& options = {});

/// agg, xhi, xlo and nn from one joint evaluation; names select and order the tests.
std::vector<MopReport> consistency_battery(const ModelParams& params, Method method,
                                           const std::vector<std::string>& tests, const TestOptions& options = {});

/// r in {0.5, ..., 0.9999} x nu in {0.05, ..., 0.95}.
std::vector<std::pair<double, double>> standard_grid();

struct OracleOptions {
  double tail_bound = 1e-14;
  int max_truncation = 400;
  std::optional<int> truncation;  // overrides the tail rule
};

struct OracleResult {
  int truncation = 0;
  JointPmf joint;  // wait-conditional, (K + 1) x (K + 1)
  double truncation_bound = 0.0;  // r^(K+1)
  double idle_probability = 0.0;
  double residual = 0.0;  // ||A pi - b||_inf
  double condition_estimate = 0.0;  // 1-norm estimate of cond(A)
};

/// Smallest K with r^K < tail_bound, capped at max_truncation.
int oracle_truncation(double r, const OracleOptions& options = {});

/// Stationary law of the single-server chain truncated at K in each queue.
OracleResult ctmc_oracle(const ModelParams& params, const OracleOptions& options = {});

/// Oracle against qr and ri on n, m <= extent; passes when max |diff| <= kOracleTolerance.
MopReport oracle_test(const ModelParams& params, int extent = 20, const OracleOptions& options = {});

struct McOptions {
  int n_servers = 1;
  std::int64_t n_events = 1'000'000;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;
  int batches = 50;
  int grid = 100;  // occupancy tracked for n, m < grid
};

struct McResult {
  JointPmf estimate;   // wait-conditional time fractions
  JointPmf std_error;  // batch-means standard errors
  std::vector<double> aggregate;
  std::vector<double> aggregate_error;
  std::int64_t events = 0;
  std::int64_t warmup_events = 0;
  double busy_time = 0.0;
  double overflow = 0.0;  // busy-time fraction outside the tracked grid
  std::uint64_t seed = 0;
};

/// Event-driven simulation of the N-server non-preemptive two-class queue.
McResult monte_carlo(const ModelParams& params, const McOptions& options);

/// Cells with exact probability above cell_floor, and the aggregate law, within z_max standard errors of qr.
MopReport mc_test(const ModelParams& params, const McOptions& options, double cell_floor = 1e-3, double z_max = 3.0);

struct SweepOptions {
  TestOptions test;
  OracleOptions oracle;
  McOptions mc;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Runs the named tests (agg, xhi, xlo, nn, qr, oracle, mc) over grid x methods.
/// qr, oracle and mc ignore the method and run once per grid point. Records come
/// back in grid order; within a point, test order, with the consistency tests
/// grouped by method at the position of the first of them.
std::vector<MopReport> validation_sweep(const std::vector<std::pair<double, double>>& grid,
                                        const std::vector<Method>& methods, const std::vector<std::string>& tests,
                                        const SweepOptions& options = {});

}  // namespace npq
