#include "npq/pmf.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace npq {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::qr: return "qr";
    case Method::ri: return "ri";
    case Method::cheb: return "cheb";
    case Method::oracle: return "oracle";
    case Method::monte_carlo: return "mc";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "qr") return Method::qr;
  if (text == "ri") return Method::ri;
  if (text == "cheb") return Method::cheb;
  if (text == "exact") return Method::exact;
  if (text == "oracle") return Method::oracle;
  if (text == "mc") return Method::monte_carlo;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::string_view to_string(PmfKind kind) {
  switch (kind) {
    case PmfKind::lo_marginal: return "lo_marginal";
    case PmfKind::hi_marginal: return "hi_marginal";
    case PmfKind::xlo: return "xlo";
    case PmfKind::xhi: return "xhi";
    case PmfKind::aggregate: return "aggregate";
  }
  return "unknown";
}

ClampStats clamp_roundoff(std::span<double> values) {
  ClampStats stats;
  for (double& v : values) {
    if (v < 0.0) {
      if (v >= -kNegativeClampLimit) {
        v = 0.0;
        ++stats.clamped;
      } else {
        ++stats.negative;
      }
    }
  }
  return stats;
}

JointPmf::JointPmf(int n_max, int m_max, Method method_tag)
    : method(method_tag), rows_(n_max + 1), cols_(m_max + 1) {
  if (n_max < 0 || m_max < 0) throw std::invalid_argument("JointPmf extents must be non-negative");
  data_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
}

std::vector<double> anti_diagonal_sums(const JointPmf& joint) {
  const int k_max = joint.n_max();
  std::vector<double> sums(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    double s = 0.0;
    for (int n = std::max(0, k - joint.m_max()); n <= k; ++n) s += joint(n, k - n);
    sums[static_cast<std::size_t>(k)] = s;
  }
  return sums;
}

}  // namespace npq
