#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "npq/quad_recurrence.hpp"
#include "npq/validation.hpp"

namespace npq {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Solver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

double column_norm1(const SparseMatrix& a) {
  double best = 0.0;
  for (int j = 0; j < a.outerSize(); ++j) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) s += std::fabs(it.value());
    best = std::max(best, s);
  }
  return best;
}

// Hager's estimate of ||A^-1||_1 from a few solves with A and A^T.
double inverse_norm1_estimate(Solver& lu, Eigen::Index size) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    estimate = y.lpNorm<1>();
    const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lu.transpose().solve(xi);
    Eigen::Index j = 0;
    const double z_max = z.cwiseAbs().maxCoeff(&j);
    if (z_max <= z.dot(x)) break;
    x.setZero();
    x(j) = 1.0;
  }
  return estimate;
}

}  // namespace

int oracle_truncation(double r, const OracleOptions& options) {
  if (options.truncation) {
    if (*options.truncation < 1) throw DomainError("oracle truncation must be >= 1");
    return *options.truncation;
  }
  if (!(options.tail_bound > 0.0 && options.tail_bound < 1.0)) throw DomainError("tail bound must lie in (0, 1)");
  const int k = static_cast<int>(std::floor(std::log(options.tail_bound) / std::log(r))) + 1;
  return std::clamp(k, 1, options.max_truncation);
}

OracleResult ctmc_oracle(const ModelParams& params, const OracleOptions& options) {
  validate(params);
  const int k = oracle_truncation(params.r, options);
  const int side = k + 1;
  const Eigen::Index size = 1 + static_cast<Eigen::Index>(side) * side;
  auto state = [side](int n, int m) { return 1 + n * side + m; };
  const double r_hi = params.r_hi(), r_lo = params.r_lo();

  // Column i of A = Q^T holds the outflow of state i; row 0 becomes sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(size) * 4);
  auto flow = [&](int from, int to, double rate) {
    if (rate == 0.0) return;
    if (to != 0) t.emplace_back(to, from, rate);
    if (from != 0) t.emplace_back(from, from, -rate);
  };
  flow(0, state(0, 0), params.r);
  for (int n = 0; n <= k; ++n) {
    for (int m = 0; m <= k; ++m) {
      const int s = state(n, m);
      if (n < k) flow(s, state(n + 1, m), r_lo);
      if (m < k) flow(s, state(n, m + 1), r_hi);
      if (m > 0) {
        flow(s, state(n, m - 1), 1.0);
      } else if (n > 0) {
        flow(s, state(n - 1, 0), 1.0);
      } else {
        flow(s, 0, 1.0);
      }
    }
  }
  for (Eigen::Index j = 0; j < size; ++j) t.emplace_back(0, static_cast<int>(j), 1.0);

  SparseMatrix a(size, size);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  b(0) = 1.0;

  Solver lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw ValidationError("oracle factorization failed: " + lu.lastErrorMessage());
  const Eigen::VectorXd pi = lu.solve(b);

  OracleResult out;
  out.truncation = k;
  out.residual = (a * pi - b).lpNorm<Eigen::Infinity>();
  out.condition_estimate = column_norm1(a) * inverse_norm1_estimate(lu, size);
  if (!std::isfinite(out.condition_estimate) || !pi.allFinite()) {
    throw ValidationError("oracle solve is singular (condition estimate " + std::to_string(out.condition_estimate) +
                          ")");
  }
  out.idle_probability = pi(0);
  out.truncation_bound = std::pow(params.r, k + 1);
  out.joint = JointPmf(k, k, Method::oracle);
  const double busy = 1.0 - pi(0);
  for (int n = 0; n <= k; ++n) {
    for (int m = 0; m <= k; ++m) out.joint(n, m) = std::max(0.0, pi(state(n, m))) / busy;
  }
  return out;
}

MopReport oracle_test(const ModelParams& params, int extent, const OracleOptions& options) {
  if (extent < 0) throw DomainError("oracle extent must be >= 0");
  const auto oracle = ctmc_oracle(params, options);
  const int e = std::min(extent, oracle.truncation);
  const auto qr = joint_qr(params, e, e);
  const auto ri = joint_ri(params, e, e);
  JointPmf window(e, e, Method::oracle);
  double diff = 0.0;
  for (int n = 0; n <= e; ++n) {
    for (int m = 0; m <= e; ++m) {
      window(n, m) = oracle.joint(n, m);
      diff = std::max({diff, std::fabs(oracle.joint(n, m) - qr(n, m)), std::fabs(oracle.joint(n, m) - ri(n, m))});
    }
  }
  auto rep = mop(window, qr, kDefaultPlim, e);
  rep.test_name = "oracle";
  rep.method = Method::oracle;
  rep.r = params.r;
  rep.nu = params.nu;
  rep.threshold = kOracleTolerance;
  rep.max_abs_diff = diff;
  rep.passed = diff <= kOracleTolerance;
  return rep;
}

}  // namespace npq
