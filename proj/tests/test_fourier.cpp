#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vp/fourier.hpp"

using namespace vp;

TEST_CASE("grid transform round trip") {
  Grid g(64);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Fourier f(12);
  f.a0 = u(rng);
  for (int k = 1; k <= 12; ++k) f.set(k, u(rng), u(rng));
  VecX s = g.to_samples(f);
  Fourier f2 = g.to_fourier(s, 12);
  CHECK(std::abs(f2.a0 - f.a0) < 1e-13);
  for (int k = 1; k <= 12; ++k) {
    CHECK(std::abs(f2.cosc(k) - f.cosc(k)) < 1e-13);
    CHECK(std::abs(f2.sinc(k) - f.sinc(k)) < 1e-13);
  }
}

TEST_CASE("derivative and antiderivative") {
  Fourier f(5);
  f.set(3, 0.7, -0.2);
  Fourier d = f.derivative();
  CHECK(d.cosc(3) == doctest::Approx(-0.6));
  CHECK(d.sinc(3) == doctest::Approx(-2.1));
  Fourier p = d.antiderivative();
  CHECK(p.cosc(3) == doctest::Approx(0.7));
  CHECK(p.sinc(3) == doctest::Approx(-0.2));
}

TEST_CASE("log kernel quadrature reproduces Fourier multipliers") {
  // integral of log(4 sin^2((8-8')/2)) cos(k8') d8' = -(2pi/k) cos(k8)
  Grid g(48);
  const MatX& R = g.log_weights();
  for (int k : {1, 2, 5, 11}) {
    VecX c(g.size()), out(g.size());
    for (int i = 0; i < g.size(); ++i) c[i] = std::cos(k * g.theta(i));
    out = R * c;
    for (int i = 0; i < g.size(); ++i)
      CHECK(out[i] == doctest::Approx(-(two_pi / k) * std::cos(k * g.theta(i))).epsilon(1e-12));
  }
  // constant integrates to zero
  VecX ones = VecX::Ones(g.size());
  CHECK((R * ones).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("log kernel quadrature against a Bessel-series reference") {
  // smooth non-bandlimited integrand: f(t) = exp(cos t). With
  // exp(cos t) = I_0(1) + 2 sum I_k(1) cos kt the exact integral at 8 = 0 is
  // -4 pi sum_{k>=1} I_k(1)/k.
  Grid g(64);
  const MatX& R = g.log_weights();
  VecX f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = std::exp(std::cos(g.theta(i)));
  double got = (R * f)(0);
  auto bessel_i = [](int k) {
    double term = std::pow(0.5, k), sum = 0;
    for (int m = 1; m <= k; ++m) term /= m;
    for (int m = 0; m < 40; ++m) {
      sum += term;
      term *= 0.25 / ((m + 1.0) * (m + 1.0 + k));
    }
    return sum;
  };
  double ref = 0;
  for (int k = 1; k <= 40; ++k) ref -= 4 * pi * bessel_i(k) / k;
  CHECK(got == doctest::Approx(ref).epsilon(1e-12));
}
