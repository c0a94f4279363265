#include "vp/steady.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace vp {

double ResidualSplit::norm() const {
  double s = y_part.squaredNorm();
  for (const auto& f : shape_part)
    for (int k = 2; k <= f.modes(); ++k)
      s += f.cosc(k) * f.cosc(k) + f.sinc(k) * f.sinc(k);
  return std::sqrt(s);
}

namespace {

std::vector<PatchShape> shapes_of(const VecX& X, const std::vector<VecXc>& beta,
                                  const VecX& radii) {
  int N = static_cast<int>(radii.size());
  std::vector<PatchShape> out;
  out.reserve(N);
  for (int j = 0; j < N; ++j) {
    VecXc actual = radii[j] * beta[j];
    for (int m = 0; m < std::min<int>(3, actual.size()); ++m) actual[m] = 0;
    out.emplace_back(radii[j], Vec2(X[2 * j], X[2 * j + 1]), actual);
  }
  return out;
}

void guard_separation(const GreenEvaluator& ev, const VecX& X, const VecX& radii) {
  int N = static_cast<int>(radii.size());
  for (int j = 0; j < N; ++j) {
    Vec2 xj(X[2 * j], X[2 * j + 1]);
    require(ev.contains(xj, 2.5 * radii[j]), ErrorCode::PatchOverlap,
            "patch radius exceeds the boundary clearance");
    for (int k = 0; k < j; ++k) {
      double d = (xj - Vec2(X[2 * k], X[2 * k + 1])).norm();
      require(d > 2.5 * (radii[j] + radii[k]), ErrorCode::PatchOverlap,
              "patch radii exceed the pair separation");
    }
  }
}

}  // namespace

ResidualSplit residual_F(const GreenEvaluator& ev, const VecX& mu, const VecX& X,
                         const std::vector<VecXc>& beta, const VecX& radii,
                         const SystemOptions& opts) {
  int N = static_cast<int>(radii.size());
  guard_separation(ev, X, radii);
  PatchSystem sys = make_patch_system(ev, mu, shapes_of(X, beta, radii), opts);
  auto phi = stream_on_boundary(sys);
  ResidualSplit out;
  out.radii = radii;
  out.y_part.resize(2 * N);
  out.shape_part.resize(N);
  for (int j = 0; j < N; ++j) {
    Fourier F = (1.0 / radii[j]) * phi[j];
    out.y_part[2 * j] = F.cosc(1);
    out.y_part[2 * j + 1] = F.sinc(1);
    F.set(1, 0.0, 0.0);
    out.shape_part[j] = F;
  }
  return out;
}

std::vector<PatchShape> SteadyState::shapes() const { return shapes_of(X, beta, radii); }

PatchSystem SteadyState::system(SystemOptions opts) const {
  return make_patch_system(ev, mu, shapes(), opts);
}

namespace {

// Packing of the Newton unknowns and residual components. In the symmetric
// (x-axis-even) mode only the even coefficients survive: center abscissae and
// Re c_m unknowns against sin-mode residuals.
struct Packing {
  int N, M, Mres;
  bool symmetric;
  int unknowns() const {
    return symmetric ? N * (1 + (M - 2)) : 2 * N + 2 * N * (M - 2);
  }
  int residuals() const { return unknowns(); }

  void unpack(const VecX& u, VecX& X, std::vector<VecXc>& beta) const {
    for (int j = 0; j < N; ++j) {
      if (symmetric) {
        X[2 * j] = u[j];
        X[2 * j + 1] = 0;
      } else {
        X[2 * j] = u[2 * j];
        X[2 * j + 1] = u[2 * j + 1];
      }
    }
    int off = symmetric ? N : 2 * N;
    for (int j = 0; j < N; ++j) {
      beta[j] = VecXc::Zero(M + 1);
      for (int m = 3; m <= M; ++m) {
        if (symmetric) {
          beta[j][m] = cplx(u[off], 0.0);
          off += 1;
        } else {
          beta[j][m] = cplx(u[off], u[off + 1]);
          off += 2;
        }
      }
    }
  }

  VecX pack_state(const VecX& X, const std::vector<VecXc>& beta) const {
    VecX u(unknowns());
    for (int j = 0; j < N; ++j) {
      if (symmetric) {
        u[j] = X[2 * j];
      } else {
        u[2 * j] = X[2 * j];
        u[2 * j + 1] = X[2 * j + 1];
      }
    }
    int off = symmetric ? N : 2 * N;
    for (int j = 0; j < N; ++j)
      for (int m = 3; m <= M; ++m) {
        if (symmetric) {
          u[off++] = beta[j][m].real();
        } else {
          u[off++] = beta[j][m].real();
          u[off++] = beta[j][m].imag();
        }
      }
    return u;
  }

  // residual components: mode-1 pair (or sin only) then shape modes 2..Mres
  VecX pack_residual(const ResidualSplit& F) const {
    VecX v(residuals());
    int off = 0;
    for (int j = 0; j < N; ++j) {
      if (symmetric) {
        v[off++] = F.y_part[2 * j + 1];
      } else {
        v[off++] = F.y_part[2 * j];
        v[off++] = F.y_part[2 * j + 1];
      }
    }
    for (int j = 0; j < N; ++j)
      for (int k = 2; k <= Mres; ++k) {
        if (symmetric) {
          v[off++] = F.shape_part[j].sinc(k);
        } else {
          v[off++] = F.shape_part[j].cosc(k);
          v[off++] = F.shape_part[j].sinc(k);
        }
      }
    return v;
  }
};

}  // namespace

SteadyState solve_steady(const GreenEvaluator& ev, const VecX& mu,
                         const std::vector<VecX>& radii_schedule, const VecX& X0, double tol,
                         const SteadyOptions& opts) {
  require(!radii_schedule.empty(), ErrorCode::DimensionMismatch, "empty radii schedule");
  int N = static_cast<int>(mu.size());
  int M = opts.M;
  Packing pk{N, M, M - 1, opts.symmetric_axis};

  // seed at the critical point-vortex configuration
  VortexConfig cfg;
  cfg.ev = ev;
  cfg.mu = mu;
  cfg.X = X0;
  cfg.rho = 0.02 * ev.diameter();
  CriticalOptions copts;
  copts.symmetric_axis = opts.symmetric_axis;
  auto crit = find_critical(cfg, X0, 1e-12, copts);
  if (opts.symmetric_axis) {
    // nondegeneracy within the even sector
    MatX Hr(N, N);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) Hr(a, b) = crit.hessian(2 * a, 2 * b);
    Eigen::SelfAdjointEigenSolver<MatX> es(Hr);
    require(es.eigenvalues().cwiseAbs().minCoeff() >
                opts.nondeg_tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()),
            ErrorCode::DegenerateCritical, "critical point degenerate in the even sector");
  } else {
    require(crit.nondegenerate, ErrorCode::DegenerateCritical,
            "critical configuration is degenerate");
  }

  SteadyState st;
  st.ev = ev;
  st.mu = mu;
  st.M = M;
  st.symmetric = opts.symmetric_axis;
  st.X = crit.X_star;
  st.beta.assign(N, VecXc::Zero(M + 1));

  SystemOptions quad = opts.quad;
  if (quad.ntheta <= 0) quad.ntheta = 4 * (M + 2);

  // analytic block operator diag(Lambda^-1 J D2H(X*), mu_j Dh(0)) used as a
  // row preconditioner for the Newton systems
  MatX B0 = lambda_inv_J(mu) * crit.hessian;
  MatX P = MatX::Zero(pk.unknowns(), pk.unknowns());
  {
    int off = opts.symmetric_axis ? N : 2 * N;
    if (opts.symmetric_axis) {
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) P(a, b) = B0(2 * a + 1, 2 * b);
      int col = off;
      for (int j = 0; j < N; ++j)
        for (int m = 3; m <= M; ++m) {
          int row = off + j * (M - 2) + (m - 3);  // sin-mode m-1 residual slot
          P(row, col) = -mu[j] * (m - 2) / two_pi;
          ++col;
        }
    } else {
      P.topLeftCorner(2 * N, 2 * N) = B0;
      int col = off;
      for (int j = 0; j < N; ++j)
        for (int m = 3; m <= M; ++m) {
          int base = off + j * 2 * (M - 2) + 2 * (m - 3);
          P(base + 1, col) = -mu[j] * (m - 2) / two_pi;  // Re c_m -> sin row
          P(base, col + 1) = -mu[j] * (m - 2) / two_pi;  // Im c_m -> cos row
          col += 2;
        }
    }
  }
  Eigen::PartialPivLU<MatX> Plu(P);

  VecX u = pk.pack_state(st.X, st.beta);
  for (const VecX& radii : radii_schedule) {
    require(static_cast<int>(radii.size()) == N, ErrorCode::DimensionMismatch,
            "radii entry has wrong length");
    auto eval = [&](const VecX& uu) {
      VecX X(2 * N);
      std::vector<VecXc> beta(N);
      pk.unpack(uu, X, beta);
      return pk.pack_residual(residual_F(ev, mu, X, beta, radii, quad));
    };

    VecX F = eval(u);
    ContinuationRecord rec;
    rec.radii = radii;
    int it = 0;
    for (; it < opts.max_newton && F.norm() > tol; ++it) {
      int dim = pk.unknowns();
      MatX Jac(dim, dim);
      parallel_for(dim, [&](int i) {
        double h = opts.fd_step * std::max(1.0, std::abs(u[i]));
        VecX up = u, um = u;
        up[i] += h;
        um[i] -= h;
        Jac.col(i) = (eval(up) - eval(um)) / (2 * h);
      });
      MatX Js = Plu.solve(Jac);
      VecX Fs = Plu.solve(F);
      VecX delta = Js.partialPivLu().solve(-Fs);
      require(delta.allFinite(), ErrorCode::DegenerateCritical, "singular steady Jacobian");
      double s = 1.0;
      VecX Fn;
      for (;;) {
        Fn = eval(u + s * delta);
        if (Fn.norm() <= (1.0 - 1e-4 * s) * F.norm() || Fn.norm() <= tol) break;
        s *= 0.5;
        require(s > 1e-10, ErrorCode::NoConvergence, "steady line search stalled");
      }
      u += s * delta;
      F = Fn;
    }
    require(F.norm() <= tol, ErrorCode::NoConvergence,
            "steady Newton did not reach tolerance");
    rec.newton_iters = it;
    rec.residual_norm = F.norm();
    pk.unpack(u, st.X, st.beta);
    double bn = 0;
    for (int j = 0; j < N; ++j) bn += st.beta[j].squaredNorm();
    rec.beta_norm = std::sqrt(bn);
    st.history.push_back(rec);
    st.radii = radii;
    st.residual_norm = F.norm();
  }

  double m3 = 0;
  for (int j = 0; j < N; ++j) m3 = std::max(m3, std::abs(st.beta[j][3]));
  st.mode3_amplitude = m3;

  auto rep = verify_steady(st);
  st.boundary_stream_osc = rep.stream_osc;
  return st;
}

VerifyReport verify_steady(const SteadyState& state, double osc_tol) {
  VerifyReport rep;
  rep.osc_tol = osc_tol;
  int N = static_cast<int>(state.mu.size());

  // independent dense-grid evaluation of the boundary stream values
  SystemOptions fine;
  fine.ntheta = 8 * (state.M + 2);
  fine.nrad = 24;
  PatchSystem sys = state.system(fine);
  auto vals = boundary_stream_values(sys);
  rep.stream_osc.resize(N);
  rep.area_error.resize(N);
  rep.budget_error.resize(N);
  auto shapes = state.shapes();
  for (int j = 0; j < N; ++j) {
    double mean = vals[j].mean();
    rep.stream_osc[j] = (vals[j].array() - mean).abs().maxCoeff();
    rep.area_error[j] =
        std::abs(shapes[j].area() - pi * state.radii[j] * state.radii[j]);
    rep.budget_error[j] = std::abs(sys.w_mu[j].sum() - state.mu[j]);
  }
  rep.residual_norm = state.residual_norm;
  rep.steady_ok = rep.stream_osc.maxCoeff() <= osc_tol;
  rep.area_ok = rep.area_error.maxCoeff() <= rep.area_tol;
  rep.budget_ok = rep.budget_error.maxCoeff() <= rep.budget_tol;
  return rep;
}

}  // namespace vp
