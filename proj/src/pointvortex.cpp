#include "vp/pointvortex.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace vp {

void VortexConfig::validate() const {
  require(X.size() == 2 * mu.size(), ErrorCode::DimensionMismatch, "X must have length 2N");
  for (int j = 0; j < count(); ++j) {
    require(mu[j] != 0.0, ErrorCode::DimensionMismatch, "vortex strengths must be nonzero");
    require(ev.contains(pos(j), rho), ErrorCode::LeftDomain,
            "vortex too close to the boundary");
    for (int k = 0; k < j; ++k)
      require((pos(j) - pos(k)).norm() > rho, ErrorCode::CollidingVortices,
              "vortex pair closer than the separation margin");
  }
}

namespace {

Deriv2 log_dist(const Vec2& d, int order) {
  // value/grad/hess of log|d| as a function of d
  Deriv2 out;
  double r2 = d.squaredNorm();
  out.v = 0.5 * std::log(r2);
  if (order >= 1) out.g = d / r2;
  if (order >= 2)
    out.H = Eigen::Matrix2d::Identity() / r2 - 2.0 * d * d.transpose() / (r2 * r2);
  return out;
}

}  // namespace

RegEval g0_bundle(const GreenEvaluator& ev, const Vec2& x, const Vec2& y, int order) {
  RegEval out = ev.reg_pair(x, y, order);
  Deriv2 ld = log_dist(x - y, order);
  out.v -= ld.v / two_pi;
  if (order >= 1) {
    out.gx -= ld.g / two_pi;
    out.gy += ld.g / two_pi;
  }
  if (order >= 2) {
    out.Hxx -= ld.H / two_pi;
    out.Hyy -= ld.H / two_pi;
    out.Hxy += ld.H / two_pi;
  }
  int n = ev.num_inner();
  if (n > 0) {
    const MatX& Ninv = ev.circulation_matrix_inv();
    std::vector<Deriv2> hx(n), hy(n);
    for (int l = 0; l < n; ++l) {
      hx[l] = ev.harm(l + 1, x, order);
      hy[l] = ev.harm(l + 1, y, order);
    }
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        double w = Ninv(l, m);
        out.v += w * hx[l].v * hy[m].v;
        if (order >= 1) {
          out.gx += w * hx[l].g * hy[m].v;
          out.gy += w * hx[l].v * hy[m].g;
        }
        if (order >= 2) {
          out.Hxx += w * hx[l].H * hy[m].v;
          out.Hyy += w * hx[l].v * hy[m].H;
          out.Hxy += w * hx[l].g * hy[m].g.transpose();
        }
      }
  }
  return out;
}

Deriv2 robin_g(const GreenEvaluator& ev, const Vec2& x, int order) {
  RegEval re = ev.reg_pair(x, x, order);
  Deriv2 out;
  out.v = 0.5 * re.v;
  if (order >= 1) out.g = 0.5 * (re.gx + re.gy);
  if (order >= 2) out.H = 0.5 * (re.Hxx + re.Hyy + re.Hxy + re.Hxy.transpose());
  int n = ev.num_inner();
  if (n > 0) {
    const MatX& Ninv = ev.circulation_matrix_inv();
    std::vector<Deriv2> h(n);
    for (int l = 0; l < n; ++l) h[l] = ev.harm(l + 1, x, order);
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        double w = 0.5 * Ninv(l, m);
        out.v += w * h[l].v * h[m].v;
        if (order >= 1) out.g += w * (h[l].g * h[m].v + h[l].v * h[m].g);
        if (order >= 2)
          out.H += w * (h[l].H * h[m].v + h[l].v * h[m].H + h[l].g * h[m].g.transpose() +
                        h[m].g * h[l].g.transpose());
      }
  }
  return out;
}

namespace {

void check_collisions(const VortexConfig& cfg, const VecX& X) {
  int N = cfg.count();
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < j; ++k) {
      Vec2 d(X[2 * j] - X[2 * k], X[2 * j + 1] - X[2 * k + 1]);
      require(d.norm() > 1e-12, ErrorCode::CollidingVortices, "vortices collided");
    }
}

double hamiltonian_at(const VortexConfig& cfg, const VecX& X) {
  check_collisions(cfg, X);
  const GreenEvaluator& ev = cfg.ev;
  int N = cfg.count();
  int n = ev.num_inner();
  const VecX& c = ev.circulation_coeffs();
  double H = 0;
  for (int j = 0; j < N; ++j) {
    Vec2 xj(X[2 * j], X[2 * j + 1]);
    for (int l = 0; l < n; ++l) H -= c[l] * cfg.mu[j] * ev.harmonic_measure(l + 1, xj);
    H += cfg.mu[j] * cfg.mu[j] * robin_g(ev, xj, 0).v;
    for (int k = 0; k < j; ++k) {
      Vec2 xk(X[2 * k], X[2 * k + 1]);
      H += cfg.mu[j] * cfg.mu[k] * g0_bundle(ev, xj, xk, 0).v;
    }
  }
  return H;
}

std::pair<VecX, MatX> grad_hessian_at(const VortexConfig& cfg, const VecX& X) {
  check_collisions(cfg, X);
  const GreenEvaluator& ev = cfg.ev;
  int N = cfg.count();
  int n = ev.num_inner();
  const VecX& c = ev.circulation_coeffs();
  VecX grad = VecX::Zero(2 * N);
  MatX hess = MatX::Zero(2 * N, 2 * N);

  for (int j = 0; j < N; ++j) {
    Vec2 xj(X[2 * j], X[2 * j + 1]);
    Vec2 gj = Vec2::Zero();
    Eigen::Matrix2d Hj = Eigen::Matrix2d::Zero();
    for (int l = 0; l < n; ++l) {
      Deriv2 h = ev.harm(l + 1, xj, 2);
      gj -= c[l] * cfg.mu[j] * h.g;
      Hj -= c[l] * cfg.mu[j] * h.H;
    }
    Deriv2 g = robin_g(ev, xj, 2);
    gj += cfg.mu[j] * cfg.mu[j] * g.g;
    Hj += cfg.mu[j] * cfg.mu[j] * g.H;
    for (int k = 0; k < N; ++k) {
      if (k == j) continue;
      Vec2 xk(X[2 * k], X[2 * k + 1]);
      RegEval g0 = g0_bundle(ev, xj, xk, 2);
      double w = cfg.mu[j] * cfg.mu[k];
      gj += w * g0.gx;
      Hj += w * g0.Hxx;
      if (k < j) hess.block<2, 2>(2 * j, 2 * k) = w * g0.Hxy;
    }
    grad.segment<2>(2 * j) = gj;
    hess.block<2, 2>(2 * j, 2 * j) = Hj;
  }
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k)
      hess.block<2, 2>(2 * j, 2 * k) = hess.block<2, 2>(2 * k, 2 * j).transpose();
  return {grad, hess};
}

bool inside_sigma_rho(const VortexConfig& cfg, const VecX& X) {
  int N = cfg.count();
  for (int j = 0; j < N; ++j) {
    Vec2 xj(X[2 * j], X[2 * j + 1]);
    if (!cfg.ev.contains(xj, cfg.rho)) return false;
    for (int k = 0; k < j; ++k)
      if ((xj - Vec2(X[2 * k], X[2 * k + 1])).norm() <= cfg.rho) return false;
  }
  return true;
}

}  // namespace

double hamiltonian(const VortexConfig& cfg) {
  cfg.validate();
  return hamiltonian_at(cfg, cfg.X);
}

std::pair<VecX, MatX> grad_hessian(const VortexConfig& cfg) {
  cfg.validate();
  return grad_hessian_at(cfg, cfg.X);
}

MatX lambda_inv_J(const VecX& mu) {
  int N = static_cast<int>(mu.size());
  MatX M = MatX::Zero(2 * N, 2 * N);
  for (int j = 0; j < N; ++j) {
    M(2 * j, 2 * j + 1) = -1.0 / mu[j];
    M(2 * j + 1, 2 * j) = 1.0 / mu[j];
  }
  return M;
}

CriticalPointReport find_critical(const VortexConfig& cfg0, const VecX& X0, double tol,
                                  const CriticalOptions& opts) {
  VortexConfig cfg = cfg0;
  cfg.X = X0;
  cfg.validate();
  int N = cfg.count();

  // In the symmetric mode all vortices sit on the x axis and only their
  // abscissae vary; this removes the rotational zero mode of symmetric domains.
  auto unpack = [&](const VecX& p) {
    if (!opts.symmetric_axis) return p;
    VecX X = VecX::Zero(2 * N);
    for (int j = 0; j < N; ++j) X[2 * j] = p[j];
    return X;
  };
  if (opts.symmetric_axis)
    for (int j = 0; j < N; ++j)
      require(std::abs(X0[2 * j + 1]) < 1e-13, ErrorCode::DimensionMismatch,
              "symmetric mode expects on-axis start");

  VecX X = X0;
  CriticalPointReport rep;
  int dim = opts.symmetric_axis ? N : 2 * N;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    auto [g, Hfull] = grad_hessian_at(cfg, X);
    double gn = g.norm();
    if (gn <= tol) {
      rep.X_star = X;
      rep.grad_norm = gn;
      rep.hessian = Hfull;
      rep.iterations = iter;
      Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (Hfull + Hfull.transpose()));
      rep.hessian_eigs = es.eigenvalues();
      double scale = std::max(1.0, rep.hessian_eigs.cwiseAbs().maxCoeff());
      rep.nondegenerate = rep.hessian_eigs.cwiseAbs().minCoeff() > opts.nondeg_tol * scale;
      if (rep.hessian_eigs.minCoeff() > 0)
        rep.definite = 1;
      else if (rep.hessian_eigs.maxCoeff() < 0)
        rep.definite = -1;
      else
        rep.definite = 0;
      return rep;
    }
    require(iter < opts.max_iter, ErrorCode::NoConvergence, "critical point search stalled");

    VecX gr(dim);
    MatX Hr(dim, dim);
    if (opts.symmetric_axis) {
      for (int a = 0; a < N; ++a) {
        gr[a] = g[2 * a];
        for (int b = 0; b < N; ++b) Hr(a, b) = Hfull(2 * a, 2 * b);
      }
    } else {
      gr = g;
      Hr = Hfull;
    }
    VecX step = Hr.partialPivLu().solve(-gr);
    require(step.allFinite(), ErrorCode::DegenerateCritical, "singular Hessian in Newton step");

    double s = 1.0;
    VecX Xn;
    for (;;) {
      Xn = X + unpack(s * step);
      if (inside_sigma_rho(cfg, Xn)) {
        double gn2 = grad_hessian_at(cfg, Xn).first.norm();
        if (gn2 <= (1.0 - 1e-4 * s) * gn || gn2 <= tol) break;
      }
      s *= 0.5;
      require(s > 1e-12, ErrorCode::LeftDomain, "line search exited the admissible set");
    }
    X = Xn;
    require(inside_sigma_rho(cfg, X), ErrorCode::LeftDomain, "iterate left the admissible set");
  }
  fail(ErrorCode::NoConvergence, "unreachable");
}

PvTrajectory integrate_pv(const VortexConfig& cfg0, const VecX& X0, double T, double dt) {
  require(dt != 0, ErrorCode::DimensionMismatch, "dt must be nonzero");
  VortexConfig cfg = cfg0;
  cfg.X = X0;
  cfg.validate();
  int N = cfg.count();
  MatX LJ = lambda_inv_J(cfg.mu);

  auto velocity = [&](const VecX& X) -> VecX { return LJ * grad_hessian_at(cfg, X).first; };

  PvTrajectory traj;
  VecX X = X0;
  int steps = static_cast<int>(std::round(T / std::abs(dt)));
  traj.t.reserve(steps + 1);
  traj.X.reserve(steps + 1);
  traj.H.reserve(steps + 1);
  traj.t.push_back(0);
  traj.X.push_back(X);
  traj.H.push_back(hamiltonian_at(cfg, X));
  for (int s = 1; s <= steps; ++s) {
    // implicit midpoint: Xm = X + dt/2 V(Xm), X' = 2 Xm - X
    VecX Xm = X + 0.5 * dt * velocity(X);
    bool converged = false;
    for (int it = 0; it < 25; ++it) {
      auto [g, H] = grad_hessian_at(cfg, Xm);
      VecX F = Xm - X - 0.5 * dt * (LJ * g);
      if (F.norm() < 1e-14 * std::max(1.0, X.norm())) {
        converged = true;
        break;
      }
      MatX J = MatX::Identity(2 * N, 2 * N) - 0.5 * dt * LJ * H;
      VecX delta = J.partialPivLu().solve(-F);
      require(delta.allFinite(), ErrorCode::NewtonSubstepFailure, "midpoint Newton diverged");
      Xm += delta;
    }
    require(converged, ErrorCode::NewtonSubstepFailure, "midpoint Newton did not converge");
    X = 2.0 * Xm - X;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < j; ++k) {
        Vec2 d(X[2 * j] - X[2 * k], X[2 * j + 1] - X[2 * k + 1]);
        require(d.norm() > cfg.rho / 10.0, ErrorCode::CollisionDetected,
                "vortex separation fell below rho/10");
      }
    traj.t.push_back(s * dt);
    traj.X.push_back(X);
    traj.H.push_back(hamiltonian_at(cfg, X));
  }
  return traj;
}

}  // namespace vp
