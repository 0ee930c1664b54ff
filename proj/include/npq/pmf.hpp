#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace npq {

/// Which engine produced a distribution.
enum class Method { exact, qr, ri, cheb, oracle, monte_carlo };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

enum class PmfKind { lo_marginal, hi_marginal, xlo, xhi, aggregate };

std::string_view to_string(PmfKind kind);

/// Round-off tolerance below zero that is silently clamped to zero.
inline constexpr double kNegativeClampLimit = 1e-18;

/// Bookkeeping for entries that came out negative.
struct ClampStats {
  std::size_t clamped = 0;    ///< tiny negatives set to zero
  std::size_t negative = 0;   ///< negatives beyond the clamp limit, left in place
};

/// Clamps round-off negatives in place and reports what happened.
ClampStats clamp_roundoff(std::span<double> values);

/// A finite prefix f(0..n_max) of a one-dimensional PMF.
struct PmfVector {
  std::vector<double> values;
  PmfKind kind = PmfKind::lo_marginal;
  bool conditional = true;  // wait-conditional when true
  Method method = Method::exact;
  ClampStats clamp;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Dense matrix f(n, m): n indexes the low-priority queue, m the high one.
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(int n_max, int m_max, Method method = Method::exact);

  int n_max() const { return rows_ - 1; }
  int m_max() const { return cols_ - 1; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int n, int m) { return data_[index(n, m)]; }
  double operator()(int n, int m) const { return data_[index(n, m)]; }

  std::span<double> row(int n) { return {data_.data() + index(n, 0), static_cast<std::size_t>(cols_)}; }
  std::span<const double> row(int n) const {
    return {data_.data() + index(n, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Method method = Method::exact;
  bool conditional = true;
  ClampStats clamp;

 private:
  std::size_t index(int n, int m) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(m);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Sum along the anti-diagonal n + m = k for k = 0..n_max. Cells beyond m_max
/// count as zero, so callers truncating m must make that tail negligible.
std::vector<double> anti_diagonal_sums(const JointPmf& joint);

}  // namespace npq
