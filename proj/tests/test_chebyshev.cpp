#include <doctest.h>

#include <boost/multiprecision/mpfr.hpp>
#include <cmath>

#include "npq/chebyshev.hpp"
#include "npq/quad_recurrence.hpp"
#include "npq/r_integral.hpp"
#include "oracles.hpp"

using namespace npq;

namespace {

double neglog_err(double a, double b) {
  const double d = std::fabs(std::log(a) - std::log(b));
  return d == 0.0 ? 16.0 : std::min(16.0, -std::log10(d));
}

double horner(const std::vector<double>& c, double p) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * p + *it;
  return s;
}

using Big = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<200>>;

Big horner_big(const std::vector<Big>& c, const Big& p) {
  Big s(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * p + *it;
  return s;
}

double worst_agreement(const JointPmf& a, const JointPmf& b, int n_lim, int m_lim, double p_lim = 1e-20) {
  double worst = 16.0;
  for (int n = 0; n <= n_lim; ++n)
    for (int m = 0; m <= m_lim; ++m)
      if (b(n, m) > p_lim) worst = std::min(worst, a(n, m) > 0 ? neglog_err(a(n, m), b(n, m)) : 0.0);
  return worst;
}

}  // namespace

TEST_CASE("first alpha and beta polynomials") {
  const auto params = ModelParams::make(0.9, 0.6);
  const double r1 = params.r_hi();
  for (double p : {-0.5, 0.0, 0.4, 1.0}) {
    CHECK(alpha_beta(0, p, params) == std::pair{0.0, 1.0});
    CHECK(alpha_beta(1, p, params) == std::pair{1.0, 0.0});
    const auto [a2, b2] = alpha_beta(2, p, params);
    CHECK(a2 == doctest::Approx(1 + 0.9 - params.r_lo() * p).epsilon(1e-15));
    CHECK(b2 == doctest::Approx(-r1).epsilon(1e-15));
  }
  const auto alpha = alpha_polynomials(0.9, r1, params.r_lo(), 3, 10);
  CHECK(alpha[0] == std::vector<double>{0.0});
  CHECK(alpha[1] == std::vector<double>{1.0});
  CHECK(alpha[2][0] == doctest::Approx(1.9));
  CHECK(alpha[2][1] == doctest::Approx(-params.r_lo()));
}

TEST_CASE("powers of lambda_1 reduce to alpha lambda_1 + beta") {
  const auto params = ModelParams::make(0.9, 0.6);
  for (int m : {2, 3, 7, 15}) {
    for (double p : {0.0, 0.4, 1.0, -0.7}) {
      const double lam = oracle::lambda_root(0.9, 0.6, p, -1).real();
      const auto [a, b] = alpha_beta(m, p, params);
      CHECK(a * lam + b == doctest::Approx(std::pow(lam, m)).epsilon(1e-11));
      // Same values from the coefficient vectors.
      const auto alpha = alpha_polynomials(0.9, params.r_hi(), params.r_lo(), m, m);
      CHECK(horner(alpha[static_cast<std::size_t>(m)], p) == doctest::Approx(a).epsilon(1e-12));
      CHECK(-params.r_hi() * horner(alpha[static_cast<std::size_t>(m) - 1], p) == doctest::Approx(b).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(alpha_beta(2, 0.1, ModelParams::make(0.5, 0.0)), DomainError);
  CHECK(alpha_beta(1, 0.1, ModelParams::make(0.5, 0.0)) == std::pair{1.0, 0.0});
}

TEST_CASE("Pell identity for Chebyshev polynomials") {
  for (double x : {1.0, 1.01, 1.3, 2.0, 3.7}) {
    for (int n = 0; n <= 20; ++n) {
      const auto [t, u] = chebyshev_tu(n, x);
      const double lhs = t * t - (x * x - 1) * u * u;
      CHECK(lhs == doctest::Approx(1.0).epsilon(1e-11 * std::max(1.0, t * t)));
    }
  }
}

TEST_CASE("A and B polynomials") {
  const auto params = ModelParams::make(0.8, 0.45);
  const double r = params.r;
  const double r1 = params.r_hi();
  const double r2 = params.r_lo();

  const auto ab0 = ab_polynomials(0, params);
  REQUIRE(ab0.a_coeffs.size() == 1);
  CHECK(ab0.a_coeffs[0] == doctest::Approx(1 - r).epsilon(1e-15));
  REQUIRE(ab0.b_coeffs.size() == 2);
  CHECK(std::fabs(ab0.b_coeffs[0]) < 1e-16);
  CHECK(ab0.b_coeffs[1] == doctest::Approx(r2).epsilon(1e-15));

  // Double precision holds the identity while the coefficients are modest.
  for (int m = 0; m <= 12; ++m) {
    const auto ab = ab_polynomials(m, params);
    CHECK(ab.a_coeffs.size() == static_cast<std::size_t>(m) + 1);
    CHECK(ab.b_coeffs.size() == static_cast<std::size_t>(m) + 2);
    CHECK(std::fabs(horner(ab.a_coeffs, 1.0) + horner(ab.b_coeffs, 1.0) - (1 - r1) * std::pow(r1, m)) <= 1e-12);
  }

  // The full sums need the cancellation resolved.
  const Big br(r), br1(r1), br2(r2);
  const auto t = ab_table<Big>(br, br1, br2, 300, 301);
  Big sum_a(0), sum_b(0);
  for (int m = 0; m <= 300; ++m) {
    const Big a1 = horner_big(t.a[static_cast<std::size_t>(m)], Big(1));
    const Big b1 = horner_big(t.b[static_cast<std::size_t>(m)], Big(1));
    const Big expected = (1 - br1) * pow(br1, m);
    CHECK(static_cast<double>(abs(a1 + b1 - expected)) <= 1e-12);
    if (m <= 100) CHECK(static_cast<double>(abs(a1 + b1 - expected)) <= 1e-12 * static_cast<double>(expected));
    sum_a += a1;
    sum_b += b1;
  }
  CHECK(sum_a.convert_to<double>() == doctest::Approx((1 - r) / (1 - r1)).epsilon(1e-12));
  CHECK(sum_b.convert_to<double>() == doctest::Approx((r - r1) / (1 - r1)).epsilon(1e-12));
}

TEST_CASE("A and B partial sums off p = 1") {
  // For 1 < p < 1/r both roots are below 1 and the m-th terms decay like lambda_2(p)^m.
  const auto params = ModelParams::make(0.9, 0.5);
  const double p = 1.1;
  const double lam = oracle::lambda_root(0.9, 0.5, p, +1).real();
  REQUIRE(lam < 1.0);
  const int m_max = 200;
  const auto t = ab_table<Big>(Big(params.r), Big(params.r_hi()), Big(params.r_lo()), m_max, m_max + 1);
  Big sum_a(0), sum_b(0);
  for (int m = 0; m <= m_max; ++m) {
    sum_a += horner_big(t.a[static_cast<std::size_t>(m)], Big(p));
    sum_b += horner_big(t.b[static_cast<std::size_t>(m)], Big(p));
  }
  const double envelope = 10.0 * std::pow(lam, m_max + 1) / (1 - lam);
  CHECK(std::fabs(sum_a.convert_to<double>()) <= envelope);
  CHECK(std::fabs(sum_b.convert_to<double>() - 1.0) <= envelope);
}

TEST_CASE("convolutional joint in double for small m") {
  const auto params = ModelParams::make(0.9, 0.5);
  const auto lo = lo_marginal_qr(params, 40);
  const auto conv = joint_via_convolution(params, 40, 10, lo);
  const auto qr = joint_qr(params, 40, 10);
  CHECK(worst_agreement(conv, qr, 40, 10) >= 8.0);
  for (int n = 1; n <= 40; ++n) CHECK(conv(n, 0) == doctest::Approx(params.r_lo() * lo[static_cast<std::size_t>(n) - 1]).epsilon(1e-13));
  CHECK(conv(0, 0) == doctest::Approx(1 - 0.9).epsilon(1e-14));
  for (int m = 0; m <= 10; ++m) {
    const auto ab = ab_polynomials(m, params);
    CHECK(conv(0, m) == doctest::Approx(ab.a_coeffs[0] + ab.b_coeffs[0] * lo[0]).epsilon(1e-13));
  }
  const auto lo_only = joint_via_convolution(ModelParams::make(0.6, 0.0), 5, 5, lo_marginal_qr(ModelParams::make(0.6, 0.0), 5));
  CHECK(lo_only(3, 0) == doctest::Approx(0.4 * 0.216));
  CHECK(lo_only(3, 2) == 0.0);
}

TEST_CASE("multiprecision convolutional joint") {
  const auto params = ModelParams::make(0.9, 0.5);
  const auto cheb = joint_cheb(params, 200, 200);
  const auto qr = joint_qr(params, 200, 200);
  CHECK(worst_agreement(cheb, qr, 50, 50) >= 12.0);
  CHECK(worst_agreement(cheb, qr, 200, 200) >= 8.0);
  const auto ri = joint_ri(params, 200, 200);
  CHECK(worst_agreement(cheb, ri, 200, 200) >= 8.0);

  const auto hi = joint_cheb(ModelParams::make(0.8, 1.0), 3, 6);
  for (int m = 0; m <= 6; ++m) CHECK(hi(0, m) == geometric_pmf(0.8, m));
  CHECK(hi(2, 3) == 0.0);
}

TEST_CASE("three engines agree across the grid") {
  for (double r : {0.5, 0.9, 0.99}) {
    for (double nu : {0.05, 0.5, 0.95}) {
      CAPTURE(r);
      CAPTURE(nu);
      const auto params = ModelParams::make(r, nu);
      const auto qr = joint_qr(params, 40, 40);
      const auto ri = joint_ri(params, 40, 40);
      const auto cheb = joint_cheb(params, 40, 40);
      CHECK(worst_agreement(cheb, qr, 40, 40) >= 8.0);
      CHECK(worst_agreement(ri, cheb, 40, 40) >= 8.0);
    }
  }
}
