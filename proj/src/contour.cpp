#include "vp/contour.hpp"

#include <cmath>

namespace vp {

PatchTangent contour_rhs(const PatchSystem& sys) {
  int N = sys.count();
  auto phi = stream_on_boundary(sys);
  PatchTangent t;
  t.Xdot = VecX::Zero(2 * N);
  t.bdot.resize(N);
  for (int j = 0; j < N; ++j) {
    const PatchShape& s = sys.shapes[j];
    auto q = q_apply(s.r(), s.coef(), phi[j], s.order());
    t.Xdot[2 * j] = q.y.x();
    t.Xdot[2 * j + 1] = q.y.y();
    t.bdot[j] = q.alpha;
  }
  return t;
}

namespace {

struct Flat {
  int N, M;
  VecX radii;
  int dim() const { return 2 * N + 2 * N * (M - 2); }

  VecX pack(const VecX& X, const std::vector<VecXc>& beta) const {
    VecX u(dim());
    u.head(2 * N) = X;
    int off = 2 * N;
    for (int j = 0; j < N; ++j)
      for (int m = 3; m <= M; ++m) {
        u[off++] = beta[j][m].real();
        u[off++] = beta[j][m].imag();
      }
    return u;
  }
  void unpack(const VecX& u, VecX& X, std::vector<VecXc>& beta) const {
    X = u.head(2 * N);
    int off = 2 * N;
    beta.assign(N, VecXc::Zero(M + 1));
    for (int j = 0; j < N; ++j)
      for (int m = 3; m <= M; ++m) {
        beta[j][m] = cplx(u[off], u[off + 1]);
        off += 2;
      }
  }
  std::vector<PatchShape> shapes(const VecX& u) const {
    VecX X;
    std::vector<VecXc> beta;
    unpack(u, X, beta);
    std::vector<PatchShape> out;
    out.reserve(N);
    for (int j = 0; j < N; ++j)
      out.emplace_back(radii[j], Vec2(X[2 * j], X[2 * j + 1]), beta[j]);
    return out;
  }
};

}  // namespace

Trajectory evolve(const GreenEvaluator& ev, const VecX& mu, const std::vector<PatchShape>& init,
                  double T, double dt, const EvolveOptions& opts) {
  int N = static_cast<int>(init.size());
  int M = 0;
  double rmin = 1e300, mumax = 0;
  for (const auto& s : init) {
    M = std::max(M, s.order());
    rmin = std::min(rmin, s.r());
  }
  for (int j = 0; j < N; ++j) mumax = std::max(mumax, std::abs(mu[j]));
  // resolve the fastest retained oscillation frequency
  double dt_bound = 0.1 * two_pi * rmin * rmin / (mumax * (M - 1));
  require(dt > 0 && dt <= opts.dt_safety * dt_bound, ErrorCode::StepTooLarge,
          "time step does not resolve the fastest retained mode");

  Flat flat;
  flat.N = N;
  flat.M = M;
  flat.radii.resize(N);
  for (int j = 0; j < N; ++j) flat.radii[j] = init[j].r();

  SystemOptions quad = opts.quad;

  auto system_of = [&](const VecX& u) {
    try {
      return make_patch_system(ev, mu, flat.shapes(u), quad);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PatchOverlap)
        fail(ErrorCode::PatchCollision, "patches collided during evolution");
      if (e.code() == ErrorCode::NonConformal)
        fail(ErrorCode::StepTooLarge, "conformality lost mid-step");
      throw;
    }
  };
  auto f = [&](const VecX& u) {
    PatchTangent t = contour_rhs(system_of(u));
    VecX du(flat.dim());
    du.head(2 * N) = t.Xdot;
    int off = 2 * N;
    for (int j = 0; j < N; ++j)
      for (int m = 3; m <= M; ++m) {
        du[off++] = t.bdot[j][m].real();
        du[off++] = t.bdot[j][m].imag();
      }
    return du;
  };

  VecX Xi(2 * N);
  std::vector<VecXc> betai(N);
  for (int j = 0; j < N; ++j) {
    Xi[2 * j] = init[j].center().x();
    Xi[2 * j + 1] = init[j].center().y();
    betai[j] = VecXc::Zero(M + 1);
    for (int m = 3; m <= init[j].order(); ++m) betai[j][m] = init[j].c(m);
  }
  VecX u = flat.pack(Xi, betai);

  int steps = static_cast<int>(std::round(T / dt));
  int estride = opts.energy_stride > 0 ? opts.energy_stride : 8 * opts.save_stride;

  // spectral-tail monitor: a non-decaying top mode means the retained band no
  // longer resolves the dynamics; abort instead of filtering
  auto check_tail = [&](const VecX& uu) {
    VecX X;
    std::vector<VecXc> beta;
    flat.unpack(uu, X, beta);
    for (int j = 0; j < N; ++j) {
      double top = std::abs(beta[j][M]);
      double peak = 0;
      for (int mm = 3; mm <= M; ++mm) peak = std::max(peak, std::abs(beta[j][mm]));
      require(top < 1e-6 || top < 0.3 * peak, ErrorCode::StepTooLarge,
              "spectral tail piled up at the truncation order");
    }
  };

  Trajectory traj;
  auto record = [&](int step, const VecX& uu) {
    if (step % opts.save_stride != 0 && step != steps) return;
    VecX X;
    std::vector<VecXc> beta;
    flat.unpack(uu, X, beta);
    traj.t.push_back(step * dt);
    traj.X.push_back(X);
    traj.beta.push_back(beta);
    auto shp = flat.shapes(uu);
    VecX aerr(N);
    for (int j = 0; j < N; ++j)
      aerr[j] = std::abs(shp[j].area() - pi * flat.radii[j] * flat.radii[j]);
    traj.area_drift.push_back(aerr);
    PatchSystem sys = system_of(uu);
    double imp = 0;
    for (int j = 0; j < N; ++j)
      for (int q = 0; q < sys.gq[j].size(); ++q)
        imp += sys.w_mu[j][q] * std::norm(sys.gq[j][q]);
    traj.angular_impulse.push_back(imp);
    if (step % estride == 0 || step == steps) {
      traj.Ep.push_back(patch_energy(sys));
      traj.Ep_t.push_back(step * dt);
    }
  };

  record(0, u);
  for (int s = 1; s <= steps; ++s) {
    if (opts.scheme == Scheme::Rk4) {
      VecX k1 = f(u);
      VecX k2 = f(u + 0.5 * dt * k1);
      VecX k3 = f(u + 0.5 * dt * k2);
      VecX k4 = f(u + dt * k3);
      u += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    } else {
      VecX um = u + 0.5 * dt * f(u);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        VecX next = u + 0.5 * dt * f(um);
        double d = (next - um).norm();
        um = next;
        if (d <= 1e-13 * std::max(1.0, u.norm())) {
          ok = true;
          break;
        }
      }
      require(ok, ErrorCode::NewtonSubstepFailure, "midpoint iteration did not converge");
      u = 2.0 * um - u;
    }
    check_tail(u);
    record(s, u);
  }
  return traj;
}

}  // namespace vp
