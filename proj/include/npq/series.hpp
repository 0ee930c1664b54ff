#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace npq {

/// Power-series product: c(n) = sum_{k=0}^{n} a(k) b(n-k), length n1 + n2 + 1.
template <class Real>
std::vector<Real> convolve(std::span<const Real> a, std::span<const Real> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Real> c(a.size() + b.size() - 1, Real(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

/// First n_max + 1 coefficients of the product. Missing inputs count as zero.
template <class Real>
std::vector<Real> convolve_truncated(std::span<const Real> a, std::span<const Real> b, std::size_t n_max) {
  std::vector<Real> c(n_max + 1, Real(0));
  if (a.empty() || b.empty()) return c;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::size_t k_lo = n >= b.size() ? n - (b.size() - 1) : 0;
    const std::size_t k_hi = std::min(n, a.size() - 1);
    Real s(0);
    for (std::size_t k = k_lo; k <= k_hi; ++k) s += a[k] * b[n - k];
    c[n] = s;
  }
  return c;
}

template <class Real>
std::vector<Real> convolve(const std::vector<Real>& a, const std::vector<Real>& b) {
  return convolve<Real>(std::span<const Real>(a), std::span<const Real>(b));
}

template <class Real>
std::vector<Real> convolve_truncated(const std::vector<Real>& a, const std::vector<Real>& b, std::size_t n_max) {
  return convolve_truncated<Real>(std::span<const Real>(a), std::span<const Real>(b), n_max);
}

}  // namespace npq
