#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vp/induction.hpp"

using namespace vp;

namespace {

VecXc coef_with(int M, int m, cplx v) {
  VecXc c = VecXc::Zero(M + 1);
  c[m] = v;
  return c;
}

PatchSystem single_patch(double mu, double r, Vec2 center, const VecXc& beta,
                         SystemOptions opts = {}) {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  return make_patch_system(ev, VecX::Constant(1, mu), {PatchShape(r, center, beta)}, opts);
}

}  // namespace

TEST_CASE("gauss-legendre exactness") {
  VecX x, w;
  gauss_legendre01(8, x, w);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
  double s = 0;
  for (int i = 0; i < 8; ++i) s += w[i] * std::pow(x[i], 13);
  CHECK(s == doctest::Approx(1.0 / 14.0).epsilon(1e-13));
}

TEST_CASE("self stream vanishes on the circle") {
  Fourier h = self_stream_h(VecXc::Zero(9), 64);
  CHECK(h.max_abs() < 1e-12);
}

TEST_CASE("dh0 closed forms") {
  Fourier a3(4);
  a3.set(3, 1.0, 0.0);
  Fourier out = dh0_apply(a3);
  CHECK(out.sinc(2) == doctest::Approx(-1.0 / two_pi));
  CHECK(std::abs(out.cosc(2)) < 1e-15);

  Fourier b3(4);
  b3.set(3, 0.0, 1.0);
  out = dh0_apply(b3);
  CHECK(out.cosc(2) == doctest::Approx(1.0 / two_pi));

  Fourier a4(5);
  a4.set(4, 1.0, 0.0);
  out = dh0_apply(a4);
  CHECK(out.sinc(3) == doctest::Approx(-1.0 / pi));
}

TEST_CASE("dh0 matches finite differences of the self stream") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  int M = 10;
  Fourier alpha(M);
  for (int m = 3; m <= M; ++m) alpha.set(m, u(rng) / (m * m), u(rng) / (m * m));
  VecXc beta = VecXc::Zero(M + 1);
  for (int m = 3; m <= M; ++m) beta[m] = cplx(alpha.cosc(m), -alpha.sinc(m));

  double eps = 1e-4;
  Fourier hp = self_stream_h(VecXc(eps * beta), 96);
  Fourier ref = dh0_apply(alpha);
  for (int k = 2; k <= M - 1; ++k) {
    CHECK(hp.cosc(k) / eps == doctest::Approx(ref.cosc(k)).epsilon(1e-5).scale(1.0));
    CHECK(hp.sinc(k) / eps == doctest::Approx(ref.sinc(k)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("self stream rotation equivariance") {
  VecXc beta = coef_with(10, 3, cplx(0.05, 0.02));
  beta[5] = cplx(-0.01, 0.015);
  double phi = 0.73;
  VecXc rot = beta;
  for (int m = 3; m <= 10; ++m) rot[m] *= std::exp(cplx(0, (1.0 - m) * phi));
  Fourier h0 = self_stream_h(beta, 96);
  Fourier h1 = self_stream_h(rot, 96);
  // h1(8) = h0(8 - phi)
  for (double t : {0.0, 0.9, 2.2, 4.8})
    CHECK(h1.eval(t) == doctest::Approx(h0.eval(t - phi)).epsilon(1e-10).scale(1.0));
}

TEST_CASE("quadrature convergence guard accepts smooth shapes") {
  VecXc beta = coef_with(8, 3, cplx(0.05, 0.0));
  CHECK_NOTHROW((void)self_stream_h(beta, 64, true));
}

TEST_CASE("centered circular patch is steady") {
  auto sys = single_patch(2 * pi, 0.2, Vec2::Zero(), VecXc::Zero(9));
  auto phi = stream_on_boundary(sys);
  CHECK(phi[0].max_abs() <= 1e-10);
}

TEST_CASE("off-center circular patch: mode-1 content matches the energy gradient") {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  double mu = 1.0;
  Vec2 x0(0.3, 0.0);
  VortexConfig cfg;
  cfg.ev = ev;
  cfg.mu = VecX::Constant(1, mu);
  cfg.X = VecX(2);
  cfg.X << x0.x(), x0.y();
  cfg.rho = 0.01;
  VecX gH = grad_hessian(cfg).first;

  for (double r : {0.02, 0.01}) {
    auto sys = single_patch(mu, r, x0, VecXc::Zero(9));
    auto phi = stream_on_boundary(sys);
    // phi ~ -(r a1/mu) (i e^{i8}) . grad H: A1 = -r Hy/mu, B1 = +r Hx/mu
    double A1 = phi[0].cosc(1), B1 = phi[0].sinc(1);
    CHECK(A1 == doctest::Approx(-r * gH[1] / mu).epsilon(5 * r));
    CHECK(B1 == doctest::Approx(r * gH[0] / mu).epsilon(5 * r));
  }
}

TEST_CASE("residual scaling: non-self part halves with r at fixed shape") {
  VecXc beta = coef_with(8, 4, cplx(0.03, -0.01));
  double mu = 1.0;
  auto norm_nonself = [&](double r) {
    auto sys = single_patch(mu, r, Vec2(0.25, 0.1), beta);
    auto phi = stream_on_boundary(sys);
    Fourier h = self_stream_h(beta, sys.grid->size());
    Fourier diff = phi[0];
    diff += (-mu) * h;
    return diff.l2norm();
  };
  double n1 = norm_nonself(0.04), n2 = norm_nonself(0.02);
  CHECK(n1 / n2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("velocity field of a centered patch") {
  double mu = 1.7, r = 0.2;
  auto sys = single_patch(mu, r, Vec2::Zero(), VecXc::Zero(9));
  // outside the patch: tangential speed mu/(2 pi rho); the image term vanishes
  // exactly for the centered circular patch
  for (double rho : {0.4, 0.7}) {
    auto u = velocity_field(sys, {Vec2(rho, 0)});
    CHECK(std::abs(u[0].x()) < 1e-10);
    CHECK(u[0].y() == doctest::Approx(mu / (two_pi * rho)).epsilon(1e-9));
  }
  // inside: solid-body u_theta = mu rho / (2 pi r^2)
  auto ui = velocity_field(sys, {Vec2(0.05, 0)});
  CHECK(ui[0].y() == doctest::Approx(mu * 0.05 / (two_pi * r * r)).epsilon(1e-8));
  CHECK(std::abs(ui[0].x()) < 1e-10);
  // slip condition on the domain boundary
  for (double t : {0.3, 2.1}) {
    Vec2 p(0.999 * std::cos(t), 0.999 * std::sin(t));
    auto ub = velocity_field(sys, {p});
    CHECK(std::abs(ub[0].dot(p) / p.norm()) < 1e-7);
  }
  // interface guard
  CHECK_THROWS_AS((void)velocity_field(sys, {Vec2(r + 1e-8, 0)}), Error);
}

TEST_CASE("zero-strength patch leaves only circulation harmonics") {
  auto ev = build_green_evaluator(DomainSpec::annulus(0.3, 2.0));
  auto sys =
      make_patch_system(ev, VecX::Zero(1), {PatchShape(0.05, Vec2(0.65, 0), VecXc::Zero(9))});
  Vec2 p(-0.6, 0.1);
  auto u = velocity_field(sys, {p});
  // pure circulation flow: u = c1 J grad H1 with H1 = log|x|/log a
  double a = 0.3;
  double c1 = ev.circulation_coeffs()[0];
  Vec2 gradH1 = p / (p.squaredNorm() * std::log(a));
  Vec2 ref(-c1 * gradH1.y(), c1 * gradH1.x());
  CHECK((u[0] - ref).norm() < 1e-10);
}

TEST_CASE("patch energy: Rankine oracle in a huge disk") {
  double R = 1000.0, mu = 1.3, r = 0.15;
  auto ev = build_green_evaluator(DomainSpec::disk(R));
  auto sys = make_patch_system(ev, VecX::Constant(1, mu),
                               {PatchShape(r, Vec2::Zero(), VecXc::Zero(9))});
  double Ep = patch_energy(sys);
  // 1-D radial oracle: E = (1/2) int |grad Psi|^2 with the Rankine profile
  int nq = 200000;
  double E1d = 0;
  for (int i = 0; i < nq; ++i) {
    double rho = R * (i + 0.5) / nq;
    double up = (rho < r) ? mu * rho / (two_pi * r * r) : mu / (two_pi * rho);
    E1d += 0.5 * up * up * two_pi * rho * (R / nq);
  }
  CHECK(Ep == doctest::Approx(E1d).epsilon(1e-4));
  // closed form: E = (mu^2/4pi)(log(R/r) + 1/4)
  double closed = mu * mu / (2 * two_pi) * (std::log(R / r) + 0.25);
  CHECK(Ep == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("patch energy permutation symmetry and point-vortex limit") {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  VecX mu(2);
  mu << 1.0, -1.0;
  double d = std::sqrt(std::sqrt(5.0) - 2.0);
  VecX X(4);
  X << d, 0, -d, 0;

  auto make = [&](double r, bool swapped) {
    std::vector<PatchShape> shapes;
    VecX mm(2);
    for (int j = 0; j < 2; ++j) {
      int jj = swapped ? 1 - j : j;
      shapes.emplace_back(r, Vec2(X[2 * jj], X[2 * jj + 1]), VecXc::Zero(9));
      mm[j] = mu[jj];
    }
    return make_patch_system(ev, mm, shapes);
  };
  double E1 = patch_energy(make(0.02, false));
  double E2 = patch_energy(make(0.02, true));
  CHECK(E1 == doctest::Approx(E2).epsilon(1e-13));

  // Richardson limit: E_p - sum self-energies -> H(X)
  VortexConfig cfg;
  cfg.ev = ev;
  cfg.mu = mu;
  cfg.X = X;
  cfg.rho = 0.05;
  double H = hamiltonian(cfg);
  auto D = [&](double r) {
    double self = 0;
    for (int j = 0; j < 2; ++j)
      self += -(mu[j] * mu[j] / (2 * two_pi)) * (std::log(r) - 0.25);
    return patch_energy(make(r, false)) - self;
  };
  double D1 = D(0.01), D2 = D(0.005);
  double extrap = (4 * D2 - D1) / 3.0;
  CHECK(std::abs(extrap - H) < 1e-4);
}

TEST_CASE("cross-patch terms are quadrature-converged at wide separation") {
  // two patches separated by many radii: order doubling is a no-op
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  VecX mu(2);
  mu << 1, -1;
  SystemOptions opts;
  opts.check_quadrature = true;
  std::vector<PatchShape> shapes{PatchShape(0.04, Vec2(0.45, 0), VecXc::Zero(9)),
                                 PatchShape(0.04, Vec2(-0.45, 0), VecXc::Zero(9))};
  auto sys = make_patch_system(ev, mu, shapes, opts);
  CHECK_NOTHROW((void)stream_on_boundary(sys));
}

TEST_CASE("overlap and containment guards") {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  VecX mu(2);
  mu << 1, 1;
  std::vector<PatchShape> shapes{PatchShape(0.2, Vec2(0.1, 0), VecXc::Zero(9)),
                                 PatchShape(0.2, Vec2(0.35, 0), VecXc::Zero(9))};
  CHECK_THROWS_AS((void)make_patch_system(ev, mu, shapes), Error);
  std::vector<PatchShape> outside{PatchShape(0.3, Vec2(0.9, 0), VecXc::Zero(9))};
  CHECK_THROWS_AS((void)make_patch_system(ev, VecX::Constant(1, 1.0), outside), Error);
}
