#include "vp/linstab.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace vp {

VecX ModeBasis::mr_diag(const VecX& radii) const {
  VecX d(dim());
  for (int j = 0; j < N; ++j) {
    d[y_index(j, 0)] = radii[j];
    d[y_index(j, 1)] = radii[j];
    for (int k = 2; k <= M; ++k) {
      d[alpha_index(j, k, 0)] = radii[j];
      d[alpha_index(j, k, 1)] = radii[j];
    }
  }
  return d;
}

namespace {

double op_norm(const MatX& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(A);
  return svd.singularValues()(0);
}

}  // namespace

LinearizedSystem assemble_L(const SteadyState& state, int M, double steady_tol) {
  require(state.residual_norm <= steady_tol, ErrorCode::NotSteady,
          "linearization requires a solved steady state");
  int N = static_cast<int>(state.mu.size());
  if (M <= 0) M = state.M;

  LinearizedSystem sys;
  sys.basis = ModeBasis{N, M};
  sys.mu = state.mu;
  sys.radii = state.radii;

  SystemOptions quad;
  quad.ntheta = 4 * (M + 2);
  PatchSystem ps = state.system(quad);
  const Grid& grid = *ps.grid;
  int ng = grid.size();
  double wt = two_pi / ng;

  // multiplication weight mu_j |dG|^{-1} dPsi/dn on each boundary
  auto grads = boundary_stream_gradient(ps);
  std::vector<VecX> W(N);
  for (int j = 0; j < N; ++j) {
    W[j].resize(ng);
    for (int i = 0; i < ng; ++i) {
      cplx nv = ps.zdg[j][i];
      // (grad Psi . n) / |dGamma/dz|, n the unit outward normal
      W[j][i] = (std::conj(nv) * grads[j][i]).real() / std::norm(nv);
    }
  }

  // grid kernel: K[(j,i),(k,i')] acting on samples of f
  int gdim = N * ng;
  MatX K = MatX::Zero(gdim, gdim);
  const MatX& R = grid.log_weights();
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < ng; ++i) K(j * ng + i, j * ng + i) += state.mu[j] * W[j][i];
    for (int k = 0; k < N; ++k) {
      double fac = -state.mu[j] * state.mu[k] / (pi * state.radii[j] * state.radii[k]);
      for (int i = 0; i < ng; ++i) {
        Vec2 x = to_vec(ps.gb[j][i]);
        RegSource src = ps.ev.reg_source(x, 0);
        for (int ip = 0; ip < ng; ++ip) {
          double G0;
          cplx d = ps.gb[j][i] - ps.gb[k][ip];
          double smooth = src.value(to_vec(ps.gb[k][ip]));
          for (int l = 1; l <= ps.ev.num_inner(); ++l)
            for (int m = 1; m <= ps.ev.num_inner(); ++m)
              smooth += ps.ev.circulation_matrix_inv()(l - 1, m - 1) *
                        ps.ev.harmonic_measure(l, x) *
                        ps.ev.harmonic_measure(m, to_vec(ps.gb[k][ip]));
          if (j == k) {
            // split the periodic log singularity
            double S = (i == ip)
                           ? std::log(std::abs(ps.zdg[j][i]))
                           : std::log(std::abs(d) /
                                      std::abs(std::exp(cplx(0, grid.theta(i))) -
                                               std::exp(cplx(0, grid.theta(ip)))));
            K(j * ng + i, k * ng + ip) +=
                fac * (wt * (smooth - S / two_pi) - R(i, ip) / (2.0 * two_pi));
          } else {
            G0 = -std::log(std::abs(d)) / two_pi + smooth;
            K(j * ng + i, k * ng + ip) += fac * wt * G0;
          }
        }
      }
    }
  }

  // sampling matrix of the mode basis
  int dim = sys.basis.dim();
  MatX S = MatX::Zero(gdim, dim);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < ng; ++i) {
      double th = grid.theta(i);
      S(j * ng + i, sys.basis.y_index(j, 0)) = std::cos(th);
      S(j * ng + i, sys.basis.y_index(j, 1)) = std::sin(th);
      for (int k = 2; k <= M; ++k) {
        S(j * ng + i, sys.basis.alpha_index(j, k, 0)) = std::cos(k * th);
        S(j * ng + i, sys.basis.alpha_index(j, k, 1)) = std::sin(k * th);
      }
    }

  sys.L = (2.0 / ng) * S.transpose() * K * S;

  sys.Jmat = MatX::Zero(dim, dim);
  for (int j = 0; j < N; ++j) {
    sys.Jmat(sys.basis.y_index(j, 0), sys.basis.y_index(j, 1)) = 1.0 / state.mu[j];
    sys.Jmat(sys.basis.y_index(j, 1), sys.basis.y_index(j, 0)) = -1.0 / state.mu[j];
    for (int k = 2; k <= M; ++k) {
      sys.Jmat(sys.basis.alpha_index(j, k, 0), sys.basis.alpha_index(j, k, 1)) =
          k / state.mu[j];
      sys.Jmat(sys.basis.alpha_index(j, k, 1), sys.basis.alpha_index(j, k, 0)) =
          -k / state.mu[j];
    }
  }
  sys.A = sys.Jmat * sys.L;

  // compare against the point-vortex linearization at the r -> 0 critical
  // configuration; at symmetric configurations this keeps the rotation mode
  // exactly on the imaginary axis
  VortexConfig cfg;
  cfg.ev = state.ev;
  cfg.mu = state.mu;
  cfg.X = state.X;
  cfg.rho = 1e-6;
  try {
    CriticalOptions copts;
    copts.symmetric_axis = state.symmetric;
    auto crit = find_critical(cfg, state.X, 1e-12, copts);
    sys.D2H = crit.hessian;
  } catch (const Error&) {
    sys.D2H = grad_hessian(cfg).second;
  }
  sys.B0 = lambda_inv_J(state.mu) * sys.D2H;
  return sys;
}

MatX assemble_A(const LinearizedSystem& sys) {
  require(sys.L.rows() == sys.basis.dim(), ErrorCode::DimensionMismatch, "system not assembled");
  return sys.Jmat * sys.L;
}

SpectrumReport spectrum_classify(const LinearizedSystem& sys, const VecX& radii) {
  SpectrumReport rep;
  Eigen::EigenSolver<MatX> es(sys.A);
  require(es.info() == Eigen::Success, ErrorCode::EigSolverFailure, "eigensolver failed");
  int dim = sys.basis.dim();
  int twoN = 2 * sys.basis.N;
  rep.eigenvalues = es.eigenvalues();

  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(rep.eigenvalues[a]) < std::abs(rep.eigenvalues[b]);
  });
  rep.cls.assign(dim, 1);
  for (int i = 0; i < twoN; ++i) rep.cls[order[i]] = 0;

  // largest relative magnitude gap near position 2N
  rep.gap_position = twoN;
  double best = 0;
  for (int i = std::max(1, twoN - 2); i <= std::min(dim - 1, twoN + 2); ++i) {
    double lo = std::abs(rep.eigenvalues[order[i - 1]]);
    double hi = std::abs(rep.eigenvalues[order[i]]);
    double ratio = (lo > 0) ? hi / lo : 1e300;
    if (ratio > best) {
      best = ratio;
      rep.gap_position = i;
    }
  }
  rep.gap_ratio = std::abs(rep.eigenvalues[order[twoN]]) /
                  std::max(std::abs(rep.eigenvalues[order[twoN - 1]]), 1e-300);

  rep.fast_min_abs = std::abs(rep.eigenvalues[order[twoN]]);
  for (int i = twoN; i < dim; ++i) {
    cplx l = rep.eigenvalues[order[i]];
    rep.fast_real_rel = std::max(rep.fast_real_rel, std::abs(l.real()) / std::abs(l));
  }

  // closure under l -> -l
  for (int i = 0; i < dim; ++i) {
    double bestd = 1e300;
    for (int k = 0; k < dim; ++k)
      bestd = std::min(bestd, std::abs(rep.eigenvalues[i] + rep.eigenvalues[k]));
    rep.pairing_defect = std::max(
        rep.pairing_defect, bestd / std::max(1.0, std::abs(rep.eigenvalues[i])));
  }

  // slow block against the point-vortex linearization
  Eigen::EigenSolver<MatX> esb(sys.B0);
  for (int i = 0; i < twoN; ++i) {
    cplx lb = esb.eigenvalues()[i];
    double bestd = 1e300;
    for (int k = 0; k < twoN; ++k)
      bestd = std::min(bestd, std::abs(lb - rep.eigenvalues[order[k]]));
    rep.slow_dev = std::max(rep.slow_dev, bestd);
  }

  // verdict per the Hamiltonian perturbation clauses
  double b0scale = 0;
  for (int i = 0; i < twoN; ++i) b0scale = std::max(b0scale, std::abs(esb.eigenvalues()[i]));
  bool off_axis = false;
  for (int i = 0; i < twoN; ++i)
    if (std::abs(esb.eigenvalues()[i].real()) > 1e-7 * std::max(1.0, b0scale)) off_axis = true;
  Eigen::SelfAdjointEigenSolver<MatX> esh(0.5 * (sys.D2H + sys.D2H.transpose()));
  double hmin = esh.eigenvalues().minCoeff(), hmax = esh.eigenvalues().maxCoeff();
  double hscale = std::max(std::abs(hmin), std::abs(hmax));
  bool definite = (hmin > 1e-10 * hscale) || (hmax < -1e-10 * hscale);
  if (off_axis) {
    rep.verdict = "unstable-trichotomy";
  } else if (definite) {
    rep.verdict = "stable";
  } else {
    // strong stability: B0 spectrum on iR\{0} with D2H definite on each
    // real 2-dim eigenspace
    bool strong = true;
    Eigen::MatrixXcd V = esb.eigenvectors();
    std::vector<bool> used(twoN, false);
    for (int i = 0; i < twoN && strong; ++i) {
      cplx l = esb.eigenvalues()[i];
      if (std::abs(l) <= 1e-6 * std::max(1.0, b0scale)) {
        strong = false;  // zero modes (e.g. a rotational symmetry) are not covered
        break;
      }
      if (l.imag() <= 0) continue;  // handle each conjugate pair once
      VecX re = V.col(i).real(), im = V.col(i).imag();
      MatX base(re.size(), 2);
      base.col(0) = re;
      base.col(1) = im;
      MatX Q = base.transpose() * sys.D2H * base;
      Eigen::SelfAdjointEigenSolver<MatX> esq(0.5 * (Q + Q.transpose()));
      double qmin = esq.eigenvalues().minCoeff(), qmax = esq.eigenvalues().maxCoeff();
      double qs = std::max(std::abs(qmin), std::abs(qmax));
      if (!(qmin > 1e-9 * qs || qmax < -1e-9 * qs)) strong = false;
    }
    rep.verdict = strong ? "strongly-stable" : "inconclusive";
  }
  (void)radii;
  return rep;
}

InvariantSplit invariant_split(const LinearizedSystem& sys, const VecX& radii) {
  int twoN = 2 * sys.basis.N;
  int na = sys.basis.alpha_dim();
  MatX Ayy = sys.A.topLeftCorner(twoN, twoN);
  MatX Aya = sys.A.topRightCorner(twoN, na);
  MatX Aay = sys.A.bottomLeftCorner(na, twoN);
  MatX Aaa = sys.A.bottomRightCorner(na, na);
  Eigen::PartialPivLU<MatX> lu(Aaa);
  Eigen::PartialPivLU<MatX> luT(MatX(Aaa.transpose()));

  InvariantSplit out;
  out.S0 = MatX::Zero(na, twoN);
  out.SY = MatX::Zero(twoN, na);
  double tol = 1e-14;
  int it = 0;
  double dprev = -1;
  for (; it < 500; ++it) {
    MatX S0n = lu.solve(out.S0 * (Ayy + Aya * out.S0) - Aay);
    double d = (S0n - out.S0).norm();
    if (dprev > 0 && d > 0) out.contraction = d / dprev;
    dprev = d;
    out.S0 = S0n;
    require(out.S0.allFinite() && out.S0.norm() < 1e6, ErrorCode::FixedPointDiverged,
            "graph fixed point diverged");
    if (d <= tol * std::max(1.0, out.S0.norm())) break;
  }
  require(it < 500, ErrorCode::FixedPointDiverged, "graph fixed point stalled");
  int it2 = 0;
  for (; it2 < 500; ++it2) {
    MatX rhs = Ayy * out.SY + Aya - out.SY * Aay * out.SY;
    MatX SYn = luT.solve(rhs.transpose()).transpose();
    double d = (SYn - out.SY).norm();
    out.SY = SYn;
    require(out.SY.allFinite() && out.SY.norm() < 1e6, ErrorCode::FixedPointDiverged,
            "co-graph fixed point diverged");
    if (d <= tol * std::max(1.0, out.SY.norm())) break;
  }
  require(it2 < 500, ErrorCode::FixedPointDiverged, "co-graph fixed point stalled");
  out.iterations = std::max(it, it2);

  VecX mr = sys.basis.mr_diag(radii);
  VecX mra = mr.tail(na), mry = mr.head(twoN);
  out.norm_S0 = op_norm(mra.cwiseInverse().asDiagonal() * out.S0);
  out.norm_SY = op_norm(out.SY * mra.cwiseInverse().asDiagonal());

  MatX V(twoN + na, twoN);
  V.topRows(twoN) = MatX::Identity(twoN, twoN);
  V.bottomRows(na) = out.S0;
  MatX AV = sys.A * V;
  out.invariance_S0 = (AV.bottomRows(na) - out.S0 * AV.topRows(twoN)).norm() /
                      std::max(1.0, AV.norm());
  MatX Wm(twoN + na, na);
  Wm.topRows(twoN) = out.SY;
  Wm.bottomRows(na) = MatX::Identity(na, na);
  MatX AW = sys.A * Wm;
  out.invariance_SY =
      (AW.topRows(twoN) - out.SY * AW.bottomRows(na)).norm() / std::max(1.0, AW.norm());
  return out;
}

PositivityReport positivity_on_ZY(const LinearizedSystem& sys, const MatX& SY) {
  int twoN = 2 * sys.basis.N;
  int na = sys.basis.alpha_dim();
  MatX Wm(twoN + na, na);
  Wm.topRows(twoN) = SY;
  Wm.bottomRows(na) = MatX::Identity(na, na);
  MatX Q = Wm.transpose() * sys.L * Wm;
  VecX mra = sys.basis.mr_diag(sys.radii).tail(na);
  MatX B = mra.cwiseAbs2().cwiseInverse().asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> ges(0.5 * (Q + Q.transpose()), B);
  PositivityReport rep;
  rep.min_quadratic = ges.eigenvalues().minCoeff();
  rep.delta = rep.min_quadratic;
  rep.positive = rep.min_quadratic > 0;
  return rep;
}

// The conjugated variable f_j represents the variation whose actual weighted
// normal velocity is r_j f_j; with that normalization the conjugated generator
// is exactly Jmat * L.
RawTangent conjugate_to_raw(const SteadyState& state, const ModeBasis& basis, const VecX& v) {
  int N = basis.N;
  RawTangent t;
  t.Xdot = VecX::Zero(2 * N);
  t.bdot.resize(N);
  auto shapes = state.shapes();
  for (int j = 0; j < N; ++j) {
    double r = state.radii[j];
    Fourier f(basis.M);
    f.set(1, v[basis.y_index(j, 0)], v[basis.y_index(j, 1)]);
    for (int k = 2; k <= basis.M; ++k)
      f.set(k, v[basis.alpha_index(j, k, 0)], v[basis.alpha_index(j, k, 1)]);
    auto q = q_apply(r, shapes[j].coef(), f, basis.M + 2);
    t.Xdot[2 * j] = r * q.y.x();
    t.Xdot[2 * j + 1] = r * q.y.y();
    t.bdot[j] = r * q.alpha;
  }
  return t;
}

VecX conjugate_from_raw(const SteadyState& state, const ModeBasis& basis, const RawTangent& t) {
  int N = basis.N;
  VecX v = VecX::Zero(basis.dim());
  auto shapes = state.shapes();
  for (int j = 0; j < N; ++j) {
    double r = state.radii[j];
    Fourier f = q_invert(r, shapes[j].coef(), Vec2(t.Xdot[2 * j], t.Xdot[2 * j + 1]),
                         t.bdot[j]);
    v[basis.y_index(j, 0)] = f.cosc(1) / r;
    v[basis.y_index(j, 1)] = f.sinc(1) / r;
    for (int k = 2; k <= basis.M; ++k) {
      v[basis.alpha_index(j, k, 0)] = f.cosc(k) / r;
      v[basis.alpha_index(j, k, 1)] = f.sinc(k) / r;
    }
  }
  return v;
}

MatX expm(const MatX& A, double t) {
  Eigen::EigenSolver<MatX> es(A);
  require(es.info() == Eigen::Success, ErrorCode::EigSolverFailure, "eigensolver failed");
  Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::VectorXcd d = es.eigenvalues();
  Eigen::MatrixXcd E = V * (t * d.array()).exp().matrix().asDiagonal() * V.inverse();
  return E.real();
}

}  // namespace vp
