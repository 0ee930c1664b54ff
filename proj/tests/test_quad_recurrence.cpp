#include <doctest.h>

#include <cmath>
#include <vector>

#include "npq/quad_recurrence.hpp"
#include "npq/series.hpp"
#include "oracles.hpp"

using namespace npq;

namespace {

double neglog_err(double a, double b) {
  const double d = std::fabs(std::log(a) - std::log(b));
  return d == 0.0 ? 16.0 : std::min(16.0, -std::log10(d));
}

}  // namespace

TEST_CASE("convolution") {
  const std::vector<double> one{1.0};
  const std::vector<double> x{0.3, -2.0, 5.0};
  CHECK(convolve(one, x) == x);
  CHECK(convolve(std::vector<double>{1, 1}, std::vector<double>{1, 1}) == std::vector<double>{1, 2, 1});
  CHECK(convolve_truncated(std::vector<double>{1, 1}, std::vector<double>{1, 1}, 1) == std::vector<double>{1, 2});
  CHECK(convolve_truncated(std::vector<double>{1, 1}, std::vector<double>{1, 1}, 4) == std::vector<double>{1, 2, 1, 0, 0});
  CHECK(convolve(std::vector<double>{}, x).empty());
}

TEST_CASE("scaled recurrence state") {
  const double r = 0.8;
  const double r_lo = 0.8 * 0.6;
  const auto s = scaled_lo_recurrence(r, r_lo, 10, r_lo);
  CHECK(s.c1 == 1.0);
  const double d2 = (1 - r) * (1 - r) + 4 * r_lo;
  CHECK(s.root_gap * s.root_gap == doctest::Approx(d2).epsilon(1e-15));
  CHECK(s.f_tilde[0] == doctest::Approx(2.0 / (1 - r + std::sqrt(d2))).epsilon(1e-15));
  CHECK(s.f_tilde[0] > 0.0);
}

TEST_CASE("low marginal leading term") {
  for (double r : {0.3, 0.9, 0.999}) {
    for (double nu : {0.1, 0.5, 0.95}) {
      const auto p = ModelParams::make(r, nu);
      const auto f = lo_marginal_qr(p, 0);
      const double d = std::sqrt((1 - r) * (1 - r) + 4 * p.r_lo());
      CHECK(f[0] == doctest::Approx((1 - r) * 2 / (1 - r + d)).epsilon(1e-15));
    }
  }
}

TEST_CASE("low marginal single-class ends") {
  const auto hi_only = lo_marginal_qr(ModelParams::make(0.7, 1.0), 5);
  CHECK(hi_only[0] == 1.0);
  for (int n = 1; n <= 5; ++n) CHECK(hi_only[static_cast<std::size_t>(n)] == 0.0);
  const auto lo_only = lo_marginal_qr(ModelParams::make(0.7, 0.0), 5);
  for (int n = 0; n <= 5; ++n) CHECK(lo_only[static_cast<std::size_t>(n)] == (1.0 - 0.7) * std::pow(0.7, n));
}

TEST_CASE("low marginal against Cauchy coefficients of its PGF") {
  for (auto [r, nu] : {std::pair{0.9, 0.5}, std::pair{0.5, 0.2}, std::pair{0.75, 0.9}}) {
    const auto p = ModelParams::make(r, nu);
    auto pgf = [&](oracle::cplx z) { return (1.0 - r) / (oracle::lambda_root(r, nu, z, +1) - r); };
    const auto ref = oracle::cauchy_coefficients(pgf, 25, 0.8);
    const auto f = lo_marginal_qr(p, 25);
    for (int n = 0; n <= 25; ++n) {
      CAPTURE(n);
      CHECK(f[static_cast<std::size_t>(n)] == doctest::Approx(ref[static_cast<std::size_t>(n)]).epsilon(1e-11));
    }
  }
}

TEST_CASE("lambda Taylor coefficients") {
  const auto p = ModelParams::make(0.9, 0.5);
  const auto plus = lambda_taylor(p, 30, RootSign::plus);
  const auto minus = lambda_taylor(p, 30, RootSign::minus);
  CHECK(plus.coeffs[0] + minus.coeffs[0] == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(plus.coeffs[0] * minus.coeffs[0] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(plus.coeffs[1] + minus.coeffs[1] == doctest::Approx(-p.r_lo()).epsilon(1e-14));
  for (std::size_t k = 2; k < plus.coeffs.size(); ++k) CHECK(std::fabs(plus.coeffs[k] + minus.coeffs[k]) <= 1e-14);

  const auto prod = convolve(plus.coeffs, minus.coeffs);
  CHECK(prod[0] == doctest::Approx(0.45).epsilon(1e-13));
  for (std::size_t k = 1; k <= 30; ++k) CHECK(std::fabs(prod[k]) <= 1e-13);

  for (int sign : {+1, -1}) {
    auto f = [&](oracle::cplx z) { return oracle::lambda_root(0.9, 0.5, z, sign); };
    const auto ref = oracle::cauchy_coefficients(f, 3, 0.5);
    const auto& got = sign > 0 ? plus.coeffs : minus.coeffs;
    for (int k = 0; k <= 3; ++k) CHECK(got[static_cast<std::size_t>(k)] == doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-9));
  }

  // Central differences of lambda at p = 0 for the first derivatives.
  const double h = 1e-4;
  auto lam = [](double pp) { return oracle::lambda_root(0.9, 0.5, pp, -1).real(); };
  const double d1 = (lam(h) - lam(-h)) / (2 * h);
  const double d2 = (lam(h) - 2 * lam(0) + lam(-h)) / (h * h) / 2;
  CHECK(minus.coeffs[1] == doctest::Approx(d1).epsilon(1e-7));
  CHECK(minus.coeffs[2] == doctest::Approx(d2).epsilon(1e-5));
}

TEST_CASE("lambda Taylor single-class ends") {
  const auto a = lambda_taylor(ModelParams::make(0.6, 1.0), 3, RootSign::minus);
  CHECK(a.coeffs == std::vector<double>{0.6, 0, 0, 0});
  const auto b = lambda_taylor(ModelParams::make(0.6, 0.0), 3, RootSign::plus);
  CHECK(b.coeffs == std::vector<double>{1.6, -0.6, 0, 0});
}

TEST_CASE("joint single-class ends") {
  const auto j = joint_qr(ModelParams::make(0.8, 1.0), 4, 6);
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 6; ++m) CHECK(j(n, m) == (n == 0 ? (1.0 - 0.8) * std::pow(0.8, m) : 0.0));
  const auto k = joint_qr(ModelParams::make(0.8, 0.0), 4, 6);
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 6; ++m) CHECK(k(n, m) == (m == 0 ? (1.0 - 0.8) * std::pow(0.8, n) : 0.0));
}

TEST_CASE("joint identities") {
  for (auto [r, nu] : {std::pair{0.9, 0.5}, std::pair{0.75, 0.9}, std::pair{0.99, 0.3}, std::pair{0.5, 0.05}}) {
    CAPTURE(r);
    CAPTURE(nu);
    const auto p = ModelParams::make(r, nu);
    const int n_max = 150;
    const auto j = joint_qr(p, n_max, n_max);
    CHECK(j(0, 0) == doctest::Approx(1.0 - r).epsilon(1e-14));
    CHECK(j.clamp.negative == 0);

    const auto agg = anti_diagonal_sums(j);
    for (int k = 0; k <= n_max; ++k) {
      const double ref = (1 - r) * std::pow(r, k);
      if (ref > 1e-20) CHECK(neglog_err(agg[static_cast<std::size_t>(k)], ref) >= 8.0);
      CHECK(agg[static_cast<std::size_t>(k)] <= ref + 1e-12);
    }

    const auto lo = lo_marginal_qr(p, n_max);
    for (int n = 1; n <= n_max; ++n) {
      const double ref = p.r_lo() * lo[static_cast<std::size_t>(n - 1)];
      if (ref > 1e-20) CHECK(neglog_err(j(n, 0), ref) >= 10.0);
    }

    double partial = 0.0;
    for (std::size_t n = 0; n < lo.size(); ++n) {
      CHECK(lo[n] >= 0.0);
      partial += lo[n];
    }
    CHECK(partial <= 1.0 + 1e-12);
  }
}

TEST_CASE("row sums approach the low marginal from below") {
  const auto p = ModelParams::make(0.8, 0.6);
  const auto j = joint_qr(p, 30, 200);
  const auto lo = lo_marginal_qr(p, 30);
  for (int n = 0; n <= 30; ++n) {
    double s = 0.0;
    double prev = -1.0;
    for (int m = 0; m <= 200; ++m) {
      s += j(n, m);
      CHECK(s >= prev);
      prev = s;
    }
    CHECK(s == doctest::Approx(lo[static_cast<std::size_t>(n)]).epsilon(1e-12));
  }
}

TEST_CASE("scale factor does not change the answer") {
  const auto p = ModelParams::make(0.9, 0.7);
  const auto a = lo_marginal_qr(p, 200);
  const auto b = lo_marginal_qr(p, 200, QrOptions{1.0});
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (std::isfinite(b[n]) && b[n] > 0) CHECK(b[n] == doctest::Approx(a[n]).epsilon(1e-12));
  }
  const auto ja = joint_qr(p, 40, 40);
  const auto jb = joint_qr(p, 40, 40, QrOptions{1.0});
  for (int n = 0; n <= 40; ++n)
    for (int m = 0; m <= 40; ++m) CHECK(jb(n, m) == doctest::Approx(ja(n, m)).epsilon(1e-12));
  CHECK_THROWS_AS(lo_marginal_qr(p, 5, QrOptions{0.0}), DomainError);
}

TEST_CASE("wait-conditional output does not depend on the server count") {
  const auto a = joint_qr(ModelParams::make(0.9, 0.4, 1), 30, 30);
  const auto b = joint_qr(ModelParams::make(0.9, 0.4, 17), 30, 30);
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}
