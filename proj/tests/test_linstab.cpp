#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vp/contour.hpp"
#include "vp/linstab.hpp"

using namespace vp;

namespace {

SteadyState centered_circle(double mu, double r, int M) {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  SteadyOptions opts;
  opts.M = M;
  return solve_steady(ev, VecX::Constant(1, mu), {VecX::Constant(1, r)}, VecX::Zero(2), 1e-11,
                      opts);
}

SteadyState dipole_state(double r, int M) {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  VecX mu(2);
  mu << 1, -1;
  double d = std::sqrt(std::sqrt(5.0) - 2.0);
  VecX X0(4);
  X0 << d, 0, -d, 0;
  SteadyOptions opts;
  opts.M = M;
  opts.symmetric_axis = true;
  return solve_steady(ev, mu, {VecX::Constant(2, r)}, X0, 1e-10, opts);
}

// finite difference of the conjugated boundary dynamics
VecX fd_generator_apply(const SteadyState& st, const ModeBasis& basis, const VecX& v,
                        double eps = 1e-6) {
  auto shift = [&](double s) {
    RawTangent t = conjugate_to_raw(st, basis, s * v);
    VecX X = st.X + t.Xdot;
    auto shapes = st.shapes();
    std::vector<PatchShape> pert;
    for (size_t j = 0; j < shapes.size(); ++j) {
      int Mbig = std::max<int>(shapes[j].order(), static_cast<int>(t.bdot[j].size()) - 1);
      VecXc c = VecXc::Zero(Mbig + 1);
      for (int m = 3; m <= shapes[j].order(); ++m) c[m] = shapes[j].c(m);
      for (int m = 3; m < static_cast<int>(t.bdot[j].size()); ++m) c[m] += t.bdot[j][m];
      pert.emplace_back(shapes[j].r(), Vec2(X[2 * j], X[2 * j + 1]), c);
    }
    PatchSystem psys = make_patch_system(st.ev, st.mu, pert);
    PatchTangent rt = contour_rhs(psys);
    RawTangent rr;
    rr.Xdot = rt.Xdot;
    rr.bdot = rt.bdot;
    return conjugate_from_raw(st, basis, rr);
  };
  return (shift(eps) - shift(-eps)) / (2 * eps);
}

}  // namespace

TEST_CASE("single patch: closed-form diagonal and Kelvin spectrum") {
  double mu = 2 * pi;
  for (double r : {0.05, 0.025}) {
    auto st = centered_circle(mu, r, 10);
    auto sys = assemble_L(st);
    // L diagonal on mode k: mu^2 (k-1) / (2 pi k r^2)
    for (int k = 2; k <= 5; ++k) {
      double pred = mu * mu * (k - 1) / (two_pi * k * r * r);
      double got = sys.L(sys.basis.alpha_index(0, k, 0), sys.basis.alpha_index(0, k, 0));
      CHECK(got == doctest::Approx(pred).epsilon(3 * r));
    }
    // y block approximates -D2H
    Eigen::Matrix2d yblk = sys.L.topLeftCorner(2, 2);
    CHECK((yblk + sys.D2H).norm() < 0.1 * r * sys.D2H.norm() + 1e-8);

    auto rep = spectrum_classify(sys, st.radii);
    CHECK(rep.verdict == "stable");
    CHECK(rep.pairing_defect < 1e-8);
    CHECK(rep.fast_real_rel < 1e-8);
    // slow pair +- i mu/(2 pi) = +- i
    CHECK(rep.slow_dev < 5 * r);
    // fast magnitudes at the Kelvin frequencies
    VecX mags(rep.eigenvalues.size());
    for (int i = 0; i < mags.size(); ++i) mags[i] = std::abs(rep.eigenvalues[i]);
    std::sort(mags.data(), mags.data() + mags.size());
    for (int k = 2; k <= 5; ++k) {
      double pred = mu * (k - 1) / (two_pi * r * r);
      CHECK(mags[2 * (k - 1)] == doctest::Approx(pred).epsilon(5 * r));
      CHECK(mags[2 * (k - 1) + 1] == doctest::Approx(pred).epsilon(5 * r));
    }
  }
}

TEST_CASE("single patch: r-halving scales the fast spectrum by 4") {
  double mu = 2 * pi;
  auto s1 = centered_circle(mu, 0.1, 8);
  auto s2 = centered_circle(mu, 0.05, 8);
  auto r1 = spectrum_classify(assemble_L(s1), s1.radii);
  auto r2 = spectrum_classify(assemble_L(s2), s2.radii);
  CHECK(r2.fast_min_abs / r1.fast_min_abs == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("hamiltonian structure of the assembled system") {
  auto st = dipole_state(0.04, 8);
  auto sys = assemble_L(st);
  CHECK((sys.L - sys.L.transpose()).norm() <= 1e-10 * sys.L.norm());
  CHECK((sys.Jmat + sys.Jmat.transpose()).norm() == 0.0);
  CHECK(std::abs(sys.A.trace()) < 1e-10 * sys.A.cwiseAbs().maxCoeff());
  CHECK((assemble_A(sys) - sys.A).norm() == 0.0);

  auto rep = spectrum_classify(sys, st.radii);
  CHECK(rep.pairing_defect < 1e-8);
  CHECK(rep.fast_real_rel < 1e-8);
  CHECK(rep.slow_dev < 1e-3);

  // quadratic-form conservation under the flow
  MatX E = expm(sys.A, 1.0);
  CHECK((E.transpose() * sys.L * E - sys.L).norm() <= 1e-8 * sys.L.norm());
}

TEST_CASE("linearization matches the boundary dynamics") {
  auto st = dipole_state(0.05, 8);
  auto sys = assemble_L(st);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    VecX v = VecX::Zero(sys.basis.dim());
    for (int j = 0; j < 2; ++j) {
      v[sys.basis.y_index(j, 0)] = u(rng);
      v[sys.basis.y_index(j, 1)] = u(rng);
      for (int k = 2; k <= sys.basis.M - 2; ++k) {
        v[sys.basis.alpha_index(j, k, 0)] = u(rng);
        v[sys.basis.alpha_index(j, k, 1)] = u(rng);
      }
    }
    v /= v.norm();
    VecX fd = fd_generator_apply(st, sys.basis, v);
    VecX Av = sys.A * v;
    CHECK((fd - Av).norm() <= 1e-5 * Av.norm());
  }
}

TEST_CASE("invariant graphs: decoupled for the circle, O(r) for the pair") {
  auto st0 = centered_circle(2 * pi, 0.1, 8);
  auto sys0 = assemble_L(st0);
  auto sp0 = invariant_split(sys0, st0.radii);
  CHECK(sp0.S0.norm() < 1e-12);
  CHECK(sp0.SY.norm() < 1e-12);

  auto s1 = dipole_state(0.04, 8);
  auto s2 = dipole_state(0.02, 8);
  auto p1 = invariant_split(assemble_L(s1), s1.radii);
  auto p2 = invariant_split(assemble_L(s2), s2.radii);
  CHECK(p1.norm_S0 < 0.5);
  CHECK(p1.invariance_S0 < 1e-8);
  CHECK(p1.invariance_SY < 1e-8);
  CHECK(p1.norm_S0 / p2.norm_S0 == doctest::Approx(2.0).epsilon(0.25));
  CHECK(p1.norm_SY / p2.norm_SY == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("positivity on the oscillatory graph") {
  auto st = centered_circle(2 * pi, 0.1, 8);
  auto sys = assemble_L(st);
  auto sp = invariant_split(sys, st.radii);
  auto pos = positivity_on_ZY(sys, sp.SY);
  CHECK(pos.positive);
  // smallest normalized value sits at mode 2: mu^2/(4 pi)
  double mu = 2 * pi;
  CHECK(pos.min_quadratic == doctest::Approx(mu * mu / (4 * pi)).epsilon(0.05));

  auto st2 = dipole_state(0.03, 8);
  auto sys2 = assemble_L(st2);
  auto sp2 = invariant_split(sys2, st2.radii);
  auto pos2 = positivity_on_ZY(sys2, sp2.SY);
  CHECK(pos2.positive);
  CHECK(pos2.min_quadratic > 0.1 * 1.0 / (4 * pi));  // margin vs the single-patch value

  // tiny symmetric perturbations do not move the minimum
  LinearizedSystem nudged = sys2;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  MatX P = MatX::Zero(sys2.L.rows(), sys2.L.cols());
  for (int i = 0; i < P.rows(); ++i)
    for (int j = 0; j <= i; ++j) P(i, j) = P(j, i) = 1e-12 * u(rng);
  nudged.L += P;
  auto pos3 = positivity_on_ZY(nudged, sp2.SY);
  CHECK(std::abs(pos3.min_quadratic - pos2.min_quadratic) < 1e-10);
}

TEST_CASE("unstable configuration: three collinear vortices") {
  auto ev = build_green_evaluator(DomainSpec::disk(1.0));
  VecX mu(3);
  mu << 1, -1, 1;
  VecX X0(6);
  X0 << 0.65, 0, 0, 0, -0.65, 0;
  SteadyOptions opts;
  opts.M = 8;
  opts.symmetric_axis = true;
  auto st = solve_steady(ev, mu, {VecX::Constant(3, 0.03)}, X0, 1e-9, opts);
  auto sys = assemble_L(st, 0, 1e-8);
  auto rep = spectrum_classify(sys, st.radii);
  CHECK(rep.verdict == "unstable-trichotomy");

  // the unstable point-vortex eigenvalue reappears in the full spectrum
  Eigen::EigenSolver<MatX> esb(sys.B0);
  double lb = 0;
  for (int i = 0; i < 6; ++i) lb = std::max(lb, esb.eigenvalues()[i].real());
  CHECK(lb > 0.1);
  double best = 1e300;
  for (int i = 0; i < rep.eigenvalues.size(); ++i)
    best = std::min(best, std::abs(rep.eigenvalues[i] - cplx(lb, 0)));
  CHECK(best < 10 * st.radii.maxCoeff());
}

TEST_CASE("assembly rejects unconverged states") {
  auto st = centered_circle(2 * pi, 0.1, 8);
  st.residual_norm = 1e-3;
  CHECK_THROWS_AS((void)assemble_L(st), Error);
}
