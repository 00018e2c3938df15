#include <doctest.h>

#include <cmath>
#include <numeric>

#include "maxdd/quadrature.hpp"

using namespace maxdd;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of l0^a l1^b l2^c l3^d over the reference tet divided by its volume
// 1/6: 6 a! b! c! d! / (a+b+c+d+3)!.
double monomial_average(int a, int b, int c, int d) {
  return 6.0 * factorial(a) * factorial(b) * factorial(c) * factorial(d) / factorial(a + b + c + d + 3);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre on [0,1] integrates x^p exactly up to 2q-1") {
    for (int q = 1; q <= 8; ++q) {
      const auto rule = gauss_legendre(q);
      REQUIRE(rule.size() == static_cast<std::size_t>(q));
      for (int p = 0; p <= 2 * q - 1; ++p) {
        double s = 0.0;
        for (const auto& pt : rule) s += pt.w * std::pow(pt.x, p);
        CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
      }
    }
    CHECK_THROWS(gauss_legendre(0));
  }

  TEST_CASE("tet rule is exact for barycentric monomials up to its degree") {
    for (int degree : {1, 2, 4, 6, 8}) {
      const auto rule = tet_quadrature(degree);
      double wsum = 0.0;
      for (const auto& q : rule) {
        wsum += q.w;
        CHECK(q.barycentric[0] + q.barycentric[1] + q.barycentric[2] + q.barycentric[3] ==
              doctest::Approx(1.0).epsilon(1e-14));
        for (double l : q.barycentric) CHECK(l >= 0.0);
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b)
          for (int c = 0; a + b + c <= degree; ++c) {
            const int d = degree - a - b - c;
            double s = 0.0;
            for (const auto& q : rule)
              s += q.w * std::pow(q.barycentric[0], a) * std::pow(q.barycentric[1], b) *
                   std::pow(q.barycentric[2], c) * std::pow(q.barycentric[3], d);
            CHECK(s == doctest::Approx(monomial_average(a, b, c, d)).epsilon(1e-12));
          }
    }
  }
}
