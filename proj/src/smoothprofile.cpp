#include "vp/smoothprofile.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "vp/induction.hpp"

namespace vp {

namespace {

constexpr double j0_sq = 5.783185962946785;  // first Dirichlet eigenvalue of the unit disk

// Chebyshev collocation on [-1,1] with N+1 points, N odd so no node at 0.
struct Cheb {
  int N;
  VecX x;   // nodes cos(k pi / N)
  MatX D;   // differentiation matrix
  Cheb(int N_) : N(N_), x(N + 1), D(MatX::Zero(N + 1, N + 1)) {
    for (int k = 0; k <= N; ++k) x[k] = std::cos(pi * k / N);
    auto c = [&](int k) { return (k == 0 || k == N) ? 2.0 : 1.0; };
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j)
        if (i != j)
          D(i, j) = (c(i) / c(j)) * ((i + j) % 2 ? -1.0 : 1.0) / (x[i] - x[j]);
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  }

  int half() const { return (N + 1) / 2; }

  // parity-folded operator acting on the positive nodes for azimuthal mode m:
  // u(-rho, 8) = (-1)^m u(rho, 8)
  MatX fold(const MatX& M, int m) const {
    int n = half();
    MatX A(n, n);
    double s = (m % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = M(i, j) + s * M(i, N - j);
    return A;
  }
};

// barycentric interpolation on arbitrary nodes
struct Bary {
  VecX x, w;
  explicit Bary(const VecX& nodes) : x(nodes), w(nodes.size()) {
    for (int i = 0; i < x.size(); ++i) {
      double p = 1.0;
      for (int j = 0; j < x.size(); ++j)
        if (j != i) p *= (x[i] - x[j]);
      w[i] = 1.0 / p;
    }
  }
  double eval(const VecX& v, double t) const {
    double num = 0, den = 0;
    for (int i = 0; i < x.size(); ++i) {
      double d = t - x[i];
      if (std::abs(d) < 1e-14) return v[i];
      num += w[i] / d * v[i];
      den += w[i] / d;
    }
    return num / den;
  }
};

cplx tilde_at(const VecXc& beta, cplx z) {
  cplx acc = 0;
  for (int m = static_cast<int>(beta.size()) - 1; m >= 3; --m) acc = acc * z + beta[m];
  return acc * z * z * z;
}

cplx dtilde_at(const VecXc& beta, cplx z) {
  cplx acc = 0;
  for (int m = static_cast<int>(beta.size()) - 1; m >= 3; --m)
    acc = acc * z + double(m) * beta[m];
  return acc * z * z;
}

}  // namespace

double ProfileSpec::eval(double r) const {
  int n = static_cast<int>(rho.size());
  VecX nodes(2 * n), vals(2 * n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = rho[i];
    vals[i] = psi[i];
    nodes[n + i] = -rho[i];
    vals[n + i] = psi[i];
  }
  return Bary(nodes).eval(vals, r);
}

ProfileSpec radial_ground_state(const ProfileParams& params, double guess_amplitude, int n_r,
                                int max_modes) {
  require(params.kappa > 0, ErrorCode::DegenerateLinearization,
          "a linear profile pins lambda to a disk eigenvalue and is degenerate");
  require(params.lambda > 0 && params.lambda < j0_sq, ErrorCode::NoSolutionInWindow,
          "lambda must sit below the first Dirichlet eigenvalue of the disk");

  int N = 2 * n_r - 1;
  Cheb cheb(N);
  int n = cheb.half();
  VecX rho = cheb.x.head(n);
  MatX L0 = cheb.fold(MatX(cheb.D * cheb.D), 0) +
            rho.cwiseInverse().asDiagonal() * cheb.fold(cheb.D, 0);

  ProfileSpec p;
  p.params = params;
  p.rho = rho;
  VecX psi(n);
  for (int i = 0; i < n; ++i) psi[i] = -guess_amplitude * (1.0 - rho[i] * rho[i]);

  for (int it = 0;; ++it) {
    VecX R = L0 * psi;
    for (int i = 0; i < n; ++i) R[i] -= p.f(psi[i]);
    R[0] = psi[0];  // Dirichlet at rho = 1
    if (R.cwiseAbs().maxCoeff() < 1e-12) break;
    require(it < 50, ErrorCode::NoSolutionInWindow, "radial Newton did not converge");
    MatX J = L0;
    for (int i = 0; i < n; ++i) J(i, i) -= p.fp(psi[i]);
    J.row(0).setZero();
    J(0, 0) = 1.0;
    VecX d = J.partialPivLu().solve(-R);
    require(d.allFinite(), ErrorCode::DegenerateLinearization, "singular radial linearization");
    psi += d;
  }
  p.psi = psi;
  p.psi0 = p.eval(0.0);
  require(p.psi0 < -1e-6, ErrorCode::NoSolutionInWindow, "converged to the trivial solution");
  for (int i = 1; i < n; ++i)
    require(psi[i] < 0, ErrorCode::NoSolutionInWindow, "solution is not negative inside");

  // off-grid residual of the interpolant: spectral in n_r
  {
    int nn = 2 * n;
    VecX nodes(nn), vals(nn);
    for (int i = 0; i < n; ++i) {
      nodes[i] = rho[i];
      vals[i] = psi[i];
      nodes[n + i] = -rho[i];
      vals[n + i] = psi[i];
    }
    Bary b(nodes);
    VecX d1 = cheb.fold(cheb.D, 0) * psi;
    VecX d2 = cheb.fold(MatX(cheb.D * cheb.D), 0) * psi;
    VecX n1(nn), v1(nn), v2(nn);
    for (int i = 0; i < n; ++i) {
      n1[i] = rho[i];
      v1[i] = d1[i];
      v2[i] = d2[i];
      n1[n + i] = -rho[i];
      v1[n + i] = -d1[i];  // odd extension of the first derivative
      v2[n + i] = d2[i];
    }
    Bary b1(n1);
    double worst = 0;
    for (int s = 1; s < 160; ++s) {
      double r = s / 160.0;
      double val = b.eval(vals, r);
      double res = b1.eval(v2, r) + b1.eval(v1, r) / r - p.f(val);
      worst = std::max(worst, std::abs(res));
    }
    p.ode_residual = worst;
  }

  // nondegeneracy of Delta - f'(psi*) across azimuthal modes
  double margin = 1e300;
  MatX D2 = cheb.D * cheb.D;
  for (int m = 0; m <= max_modes; ++m) {
    MatX T = cheb.fold(D2, m) + rho.cwiseInverse().asDiagonal() * cheb.fold(cheb.D, m);
    for (int i = 0; i < n; ++i) {
      T(i, i) -= double(m) * double(m) / (rho[i] * rho[i]);
      T(i, i) -= p.fp(psi[i]);
    }
    MatX Ti = T.bottomRightCorner(n - 1, n - 1);  // Dirichlet at rho = 1
    Eigen::EigenSolver<MatX> es(Ti);
    margin = std::min(margin, es.eigenvalues().cwiseAbs().minCoeff());
  }
  p.nondeg_margin = margin;
  p.modes_checked = max_modes;
  require(margin > 1e-6, ErrorCode::DegenerateLinearization,
          "linearized radial operator is near-singular");
  return p;
}

double DiskField::eval(cplx z) const {
  int n_r = static_cast<int>(rho.size());
  int n_t = static_cast<int>(theta.size());
  double r = std::abs(z);
  double th = std::arg(z);
  // per-mode radial profiles with the proper parity extension
  double out = 0;
  VecX nodes(2 * n_r);
  for (int i = 0; i < n_r; ++i) {
    nodes[i] = rho[i];
    nodes[n_r + i] = -rho[i];
  }
  Bary b(nodes);
  for (int m = 0; m <= n_t / 2; ++m) {
    double cm = (m == 0 || 2 * m == n_t) ? 1.0 : 2.0;
    VecX vc(2 * n_r), vs(2 * n_r);
    for (int i = 0; i < n_r; ++i) {
      double ac = 0, as = 0;
      for (int k = 0; k < n_t; ++k) {
        ac += values(i, k) * std::cos(m * theta[k]);
        as += values(i, k) * std::sin(m * theta[k]);
      }
      ac *= cm / n_t;
      as *= cm / n_t;
      double s = (m % 2 == 0) ? 1.0 : -1.0;
      vc[i] = ac;
      vs[i] = as;
      vc[n_r + i] = s * ac;
      vs[n_r + i] = s * as;
    }
    out += b.eval(vc, r) * std::cos(m * th) + b.eval(vs, r) * std::sin(m * th);
  }
  return out;
}

DiskField solve_profile_on_disk(const ProfileSpec& profile, const VecXc& beta, int n_t,
                                const DiskField* seed) {
  int n_r = static_cast<int>(profile.rho.size());
  int N = 2 * n_r - 1;
  Cheb cheb(N);
  VecX rho = cheb.x.head(n_r);

  DiskField F;
  F.rho = rho;
  F.theta.resize(n_t);
  for (int k = 0; k < n_t; ++k) F.theta[k] = two_pi * k / n_t;

  // weight |1 + dTilde|^2 on the tensor grid
  MatX W(n_r, n_t);
  for (int i = 0; i < n_r; ++i)
    for (int k = 0; k < n_t; ++k) {
      cplx z = rho[i] * std::exp(cplx(0, F.theta[k]));
      W(i, k) = std::norm(1.0 + dtilde_at(beta, z));
    }

  // real-space Laplacian through per-mode folded radial operators
  int dim = n_r * n_t;
  MatX Lap = MatX::Zero(dim, dim);
  MatX D2 = cheb.D * cheb.D;
  for (int m = 0; m <= n_t / 2; ++m) {
    MatX Lm = cheb.fold(D2, m) + rho.cwiseInverse().asDiagonal() * cheb.fold(cheb.D, m);
    for (int i = 0; i < n_r; ++i) Lm(i, i) -= double(m) * double(m) / (rho[i] * rho[i]);
    double cm = (m == 0 || 2 * m == n_t) ? 1.0 : 2.0;
    for (int i = 0; i < n_t; ++i)
      for (int j = 0; j < n_t; ++j) {
        double P = cm / n_t * std::cos(m * (F.theta[i] - F.theta[j]));
        if (P == 0.0) continue;
        for (int a = 0; a < n_r; ++a)
          for (int b = 0; b < n_r; ++b) Lap(a * n_t + i, b * n_t + j) += Lm(a, b) * P;
      }
  }

  VecX u(dim);
  for (int i = 0; i < n_r; ++i)
    for (int k = 0; k < n_t; ++k)
      u[i * n_t + k] = seed ? seed->values(i, k) : profile.eval(rho[i]);

  double best = 1e300;
  int stalled = 0;
  for (int it = 0;; ++it) {
    VecX R = Lap * u;
    for (int i = 0; i < n_r; ++i)
      for (int k = 0; k < n_t; ++k) {
        int g = i * n_t + k;
        if (i == 0)
          R[g] = u[g];  // Dirichlet ring
        else
          R[g] -= W(i, k) * profile.f(u[g]);
      }
    F.residual = R.cwiseAbs().maxCoeff();
    if (F.residual < 1e-12) break;
    // quadratic convergence ends at the rounding floor of the stiff operator
    stalled = (F.residual > 0.25 * best) ? stalled + 1 : 0;
    best = std::min(best, F.residual);
    if (stalled >= 2 && F.residual < 1e-9) break;
    require(it < 40, ErrorCode::NewtonDiverged, "disk profile Newton did not converge");
    MatX J = Lap;
    for (int i = 0; i < n_r; ++i)
      for (int k = 0; k < n_t; ++k) {
        int g = i * n_t + k;
        if (i == 0) {
          J.row(g).setZero();
          J(g, g) = 1.0;
        } else {
          J(g, g) -= W(i, k) * profile.fp(u[g]);
        }
      }
    VecX d = J.partialPivLu().solve(-R);
    require(d.allFinite(), ErrorCode::DegenerateLinearization,
            "singular linearization in the disk profile solve");
    u += d;
  }
  F.values.resize(n_r, n_t);
  for (int i = 0; i < n_r; ++i)
    for (int k = 0; k < n_t; ++k) F.values(i, k) = u[i * n_t + k];
  return F;
}

namespace {

struct SmoothSelfData {
  // quadrature of the normalized distorted vorticity at unit scale
  VecX wq;        // rho * glw * (2pi/n_t) * |1+dTilde|^2 f(psi)
  VecX gvals;     // plain density values |1+dTilde|^2 f(psi)
  VecXc zq;       // nodes
  double mass;    // sum wq (before normalization)
  int nring, nth;
  VecX ringr, ringw;
};

SmoothSelfData smooth_density(const ProfileSpec& profile, const VecXc& beta,
                              const DiskField& field, int nring, int nth) {
  SmoothSelfData d;
  d.nring = nring;
  d.nth = nth;
  VecX gr, gw;
  gauss_legendre01(nring, gr, gw);
  d.ringr = gr;
  d.ringw = gw;
  d.wq.resize(nring * nth);
  d.gvals.resize(nring * nth);
  d.zq.resize(nring * nth);
  for (int a = 0; a < nring; ++a)
    for (int k = 0; k < nth; ++k) {
      cplx z = gr[a] * std::exp(cplx(0, two_pi * k / nth));
      int g = a * nth + k;
      d.zq[g] = z;
      d.gvals[g] = std::norm(1.0 + dtilde_at(beta, z)) * profile.f(field.eval(z));
      d.wq[g] = d.gvals[g] * gr[a] * gw[a] * (two_pi / nth);
    }
  d.mass = d.wq.sum();
  return d;
}

// int g(z) log|z0 - z| dmu by exact angular multipliers; the radial integral
// is split at |z0| to keep every panel smooth.
double log_potential_interior(const SmoothSelfData& den, cplx z0) {
  int nth = den.nth, nring = den.nring;
  double rho0 = std::abs(z0), th0 = std::arg(z0);
  int kmax = nth / 2;
  // angular transforms per ring: ghat_k(rho_a)
  MatXc ghat(nring, kmax + 1);
  for (int a = 0; a < nring; ++a)
    for (int k = 0; k <= kmax; ++k) {
      cplx s = 0;
      for (int q = 0; q < nth; ++q)
        s += den.gvals[a * nth + q] * std::exp(cplx(0, -k * two_pi * q / nth));
      ghat(a, k) = s / double(nth);
    }
  Bary rb(den.ringr);
  VecX pr, pw;
  gauss_legendre01(16, pr, pw);
  double total = 0;
  for (int half = 0; half < 2; ++half) {
    double lo = half ? rho0 : 0.0, hi = half ? 1.0 : rho0;
    if (hi - lo < 1e-14) continue;
    for (int a = 0; a < 16; ++a) {
      double r = lo + (hi - lo) * pr[a];
      double wrad = (hi - lo) * pw[a] * r;
      double mn = std::min(r, rho0), mx = std::max(r, rho0);
      VecX re(nring), im(nring);
      double ang = 0;
      for (int k = 0; k <= kmax; ++k) {
        for (int arr = 0; arr < nring; ++arr) {
          re[arr] = ghat(arr, k).real();
          im[arr] = ghat(arr, k).imag();
        }
        cplx gk(rb.eval(re, r), rb.eval(im, r));
        if (k == 0) {
          ang += two_pi * gk.real() * std::log(mx);
        } else {
          double fac = std::pow(mn / mx, k) / k * ((k == kmax) ? 0.5 : 1.0);
          ang -= two_pi * fac * (gk * std::exp(cplx(0, k * th0))).real();
        }
      }
      total += wrad * ang;
    }
  }
  return total;
}

// boundary values of the unit-scale weighted log potential, normalized to
// unit mass: Wbar(8_i) = (1/mass) int g(z) log|g1(e^{i8}) - g1(z)| dmu
VecX smooth_potential_boundary(const VecXc& beta, const SmoothSelfData& den, const Grid& grid) {
  int n = grid.size();
  double a1 = a1_of(beta);
  VecX out = VecX::Zero(n);
  int nth = den.nth, nring = den.nring;

  // smooth conformal correction log |(g1(e^i8)-g1(z)) / (e^i8 - z)|
  for (int i = 0; i < n; ++i) {
    cplx w = std::exp(cplx(0, grid.theta(i)));
    cplx gw = a1 * (w + tilde_at(beta, w));
    double acc = 0;
    for (int g = 0; g < den.zq.size(); ++g) {
      cplx z = den.zq[g];
      cplx gz = a1 * (z + tilde_at(beta, z));
      acc += den.wq[g] * std::log(std::abs((gw - gz) / (w - z)));
    }
    out[i] = acc;
  }
  // exact ring multipliers for log|e^{i8} - z|
  for (int a = 0; a < nring; ++a) {
    double r = den.ringr[a];
    for (int k = 1; k <= nth / 2; ++k) {
      cplx gk = 0;
      for (int q = 0; q < nth; ++q) {
        double phi = two_pi * q / nth;
        gk += den.wq[a * nth + q] * std::exp(cplx(0, -k * phi));
      }
      // sum over the ring of w * log-kernel: multiplier -pi r^k/k per unit
      // angular weight; the angular weight 2pi/nth is already inside wq
      double mult = -std::pow(r, k) / k * ((2 * k == nth) ? 0.5 : 1.0);
      for (int i = 0; i < n; ++i)
        out[i] += (gk * std::exp(cplx(0, k * grid.theta(i)))).real() * mult;
    }
  }
  return out / den.mass;
}

}  // namespace

Fourier self_stream_h_smooth(const ProfileSpec& profile, const VecXc& beta, int ntheta) {
  int Mb = static_cast<int>(beta.size()) - 1;
  int n_t = std::max(16, 4 * (Mb + 1));
  DiskField field = solve_profile_on_disk(profile, beta, n_t);
  SmoothSelfData den = smooth_density(profile, beta, field, 16, std::max(ntheta, n_t));
  Grid grid(ntheta);
  VecX Wb = smooth_potential_boundary(beta, den, grid);
  Fourier v = grid.to_fourier(Wb, ntheta / 2 - 2);
  Fourier h = v.derivative();
  h *= 1.0 / two_pi;
  h.a0 = 0;
  return h;
}

VecX dh_profile_eigs(const ProfileSpec& profile, int M, double fd_eps) {
  VecX lam(M + 1);
  lam.setZero();
  int ntheta = std::max(64, 4 * (M + 3));
  for (int m = 2; m <= M; ++m) {
    VecXc bp = VecXc::Zero(m + 2);
    bp[m + 1] = fd_eps;
    Fourier hp = self_stream_h_smooth(profile, bp, ntheta);
    VecXc bm = VecXc::Zero(m + 2);
    bm[m + 1] = -fd_eps;
    Fourier hm = self_stream_h_smooth(profile, bm, ntheta);
    Fourier D = hp;
    D += -1.0 * hm;
    D *= 1.0 / (2 * fd_eps);
    lam[m] = -D.sinc(m) / m;
    // one-band structure: everything else stays at the noise floor
    for (int k = 2; k <= D.modes() && k <= M + 2; ++k) {
      double off = (k == m) ? std::abs(D.cosc(k)) : std::hypot(D.cosc(k), D.sinc(k));
      require(off <= 1e-6 * std::max(1.0, std::abs(lam[m]) * m) + 1e-8,
              ErrorCode::QuadratureNotConverged, "unexpected band structure in Dh");
    }
  }
  return lam;
}

SmoothSteady solve_steady_smooth(const GreenEvaluator& ev, const VecX& mu,
                                 const std::vector<VecX>& radii_schedule, const VecX& X0,
                                 const ProfileSpec& profile, double tol,
                                 const SteadyOptions& opts) {
  require(!radii_schedule.empty(), ErrorCode::DimensionMismatch, "empty radii schedule");
  int N = static_cast<int>(mu.size());
  int M = opts.M;
  int n_t = std::max(16, 2 * (M + 2));

  VortexConfig cfg;
  cfg.ev = ev;
  cfg.mu = mu;
  cfg.X = X0;
  cfg.rho = 0.02 * ev.diameter();
  CriticalOptions copts;
  copts.symmetric_axis = opts.symmetric_axis;
  auto crit = find_critical(cfg, X0, 1e-12, copts);

  SystemOptions quad = opts.quad;
  if (quad.ntheta <= 0) quad.ntheta = 4 * (M + 2);

  // cached per-patch profile fields, reused as Newton seeds
  std::vector<DiskField> cache(N);
  std::vector<bool> cached(N, false);

  auto build_phi = [&](const VecX& X, const std::vector<VecXc>& beta, const VecX& radii,
                       std::vector<DiskField>* fields_out, PatchSystem* sys_out) {
    std::vector<PatchShape> shapes;
    std::vector<VecX> density(N);
    std::vector<DiskField> fields(N);
    std::vector<Fourier> selfh(N);
    for (int j = 0; j < N; ++j) {
      VecXc actual = radii[j] * beta[j];
      for (int m = 0; m < std::min<int>(3, actual.size()); ++m) actual[m] = 0;
      shapes.emplace_back(radii[j], Vec2(X[2 * j], X[2 * j + 1]), actual);
      fields[j] = solve_profile_on_disk(profile, actual, n_t, cached[j] ? &cache[j] : nullptr);
      cache[j] = fields[j];
      cached[j] = true;
    }
    PatchSystem sys;
    {
      // density samples on the shared quadrature grid of the system
      PatchSystem probe = make_patch_system(ev, mu, shapes, quad);
      VecX gr, gw;
      gauss_legendre01(quad.nrad, gr, gw);
      for (int j = 0; j < N; ++j) {
        int nq = static_cast<int>(probe.gq[j].size());
        density[j].resize(nq);
        int nth = probe.grid->size();
        for (int a = 0; a < quad.nrad; ++a)
          for (int b = 0; b < nth; ++b) {
            cplx z = gr[a] * std::exp(cplx(0, probe.grid->theta(b)));
            density[j][a * nth + b] = profile.f(fields[j].eval(z));
          }
      }
      sys = make_patch_system(ev, mu, shapes, quad, density);
    }
    auto phi = stream_on_boundary(sys);  // cross + domain terms only
    for (int j = 0; j < N; ++j) {
      VecXc actual = radii[j] * beta[j];
      for (int m = 0; m < std::min<int>(3, actual.size()); ++m) actual[m] = 0;
      SmoothSelfData den = smooth_density(profile, actual, fields[j], quad.nrad,
                                          sys.grid->size());
      VecX Wb = smooth_potential_boundary(actual, den, *sys.grid);
      Fourier v = sys.grid->to_fourier(Wb, phi[j].modes());
      Fourier hs = v.derivative();
      hs *= mu[j] / two_pi;
      phi[j] += hs;
      phi[j].a0 = 0;
    }
    if (fields_out) *fields_out = fields;
    if (sys_out) *sys_out = sys;
    return phi;
  };

  // packing identical to the patch solver
  auto pack_residual = [&](const std::vector<Fourier>& phi, const VecX& radii) {
    int per = opts.symmetric_axis ? (1 + (M - 2)) : (2 + 2 * (M - 2));
    VecX v(per * N);
    int off = 0;
    for (int j = 0; j < N; ++j) {
      Fourier F = (1.0 / radii[j]) * phi[j];
      if (opts.symmetric_axis) {
        v[off++] = F.sinc(1);
      } else {
        v[off++] = F.cosc(1);
        v[off++] = F.sinc(1);
      }
    }
    for (int j = 0; j < N; ++j) {
      Fourier F = (1.0 / radii[j]) * phi[j];
      for (int k = 2; k <= M - 1; ++k) {
        if (opts.symmetric_axis) {
          v[off++] = F.sinc(k);
        } else {
          v[off++] = F.cosc(k);
          v[off++] = F.sinc(k);
        }
      }
    }
    return v;
  };
  auto unpack = [&](const VecX& u, VecX& X, std::vector<VecXc>& beta) {
    for (int j = 0; j < N; ++j) {
      if (opts.symmetric_axis) {
        X[2 * j] = u[j];
        X[2 * j + 1] = 0;
      } else {
        X[2 * j] = u[2 * j];
        X[2 * j + 1] = u[2 * j + 1];
      }
    }
    int off = opts.symmetric_axis ? N : 2 * N;
    for (int j = 0; j < N; ++j) {
      beta[j] = VecXc::Zero(M + 1);
      for (int m = 3; m <= M; ++m) {
        if (opts.symmetric_axis) {
          beta[j][m] = cplx(u[off], 0);
          off += 1;
        } else {
          beta[j][m] = cplx(u[off], u[off + 1]);
          off += 2;
        }
      }
    }
  };

  int dim = (opts.symmetric_axis ? (1 + (M - 2)) : (2 + 2 * (M - 2))) * N;
  VecX u = VecX::Zero(dim);
  for (int j = 0; j < N; ++j) {
    if (opts.symmetric_axis)
      u[j] = crit.X_star[2 * j];
    else {
      u[2 * j] = crit.X_star[2 * j];
      u[2 * j + 1] = crit.X_star[2 * j + 1];
    }
  }

  SmoothSteady out;
  out.state.ev = ev;
  out.state.mu = mu;
  out.state.M = M;
  out.state.symmetric = opts.symmetric_axis;

  for (const VecX& radii : radii_schedule) {
    auto eval = [&](const VecX& uu) {
      VecX X(2 * N);
      std::vector<VecXc> beta(N);
      unpack(uu, X, beta);
      return pack_residual(build_phi(X, beta, radii, nullptr, nullptr), radii);
    };
    VecX F = eval(u);
    ContinuationRecord rec;
    rec.radii = radii;
    int it = 0;
    for (; it < opts.max_newton && F.norm() > tol; ++it) {
      MatX J(dim, dim);
      for (int i = 0; i < dim; ++i) {
        double h = opts.fd_step * std::max(1.0, std::abs(u[i]));
        VecX up = u, um = u;
        up[i] += h;
        um[i] -= h;
        J.col(i) = (eval(up) - eval(um)) / (2 * h);
      }
      VecX d = J.partialPivLu().solve(-F);
      require(d.allFinite(), ErrorCode::DegenerateCritical, "singular smooth steady Jacobian");
      double s = 1.0;
      VecX Fn;
      for (;;) {
        Fn = eval(u + s * d);
        if (Fn.norm() <= (1.0 - 1e-4 * s) * F.norm() || Fn.norm() <= tol) break;
        s *= 0.5;
        require(s > 1e-8, ErrorCode::NoConvergence, "smooth steady line search stalled");
      }
      u += s * d;
      F = Fn;
    }
    require(F.norm() <= tol, ErrorCode::NoConvergence, "smooth steady Newton stalled");
    rec.newton_iters = it;
    rec.residual_norm = F.norm();
    out.state.history.push_back(rec);
    out.state.radii = radii;
    out.state.residual_norm = F.norm();
  }

  VecX X(2 * N);
  std::vector<VecXc> beta(N);
  unpack(u, X, beta);
  out.state.X = X;
  out.state.beta = beta;

  PatchSystem sys;
  auto phi = build_phi(X, beta, out.state.radii, &out.psi, &sys);
  out.mass.resize(N);
  out.boundary_vorticity_max.resize(N);
  out.interior_osc.resize(N);

  // interior steadiness: Psi - psi_j constant inside each vortical domain
  for (int j = 0; j < N; ++j) {
    out.mass[j] = sys.w_mu[j].sum();
    double bmax = 0;
    for (int k = 0; k < out.psi[j].theta.size(); ++k)
      bmax = std::max(bmax, std::abs(profile.f(out.psi[j].values(0, k))));
    out.boundary_vorticity_max[j] = bmax;

    VecXc actual = out.state.radii[j] * beta[j];
    for (int m = 0; m < std::min<int>(3, actual.size()); ++m) actual[m] = 0;
    double a1 = a1_of(actual);
    double r = out.state.radii[j];
    SmoothSelfData den = smooth_density(profile, actual, out.psi[j], 24, 64);

    std::vector<cplx> samples;
    for (double rr : {0.25, 0.55, 0.8})
      for (int q = 0; q < 6; ++q) samples.push_back(rr * std::exp(cplx(0, two_pi * q / 6)));

    std::vector<double> vals;
    for (cplx z0 : samples) {
      // self term: (mu/2pi) [ log r + (1/mass) int g log|g1(z0)-g1(z)| ]
      double pot = 0;
      for (int g = 0; g < den.zq.size(); ++g) {
        cplx z = den.zq[g];
        cplx d = (a1 * (z0 + tilde_at(actual, z0))) - (a1 * (z + tilde_at(actual, z)));
        pot += den.wq[g] * std::log(std::abs(d / (z0 - z)));
      }
      pot += log_potential_interior(den, z0);
      pot = pot / den.mass + std::log(r);
      double self = mu[j] / two_pi * pot;

      // remaining stream terms evaluated at the physical point
      cplx zg = to_cplx(out.state.X.segment<2>(2 * j)) + r * a1 * (z0 + tilde_at(actual, z0));
      Vec2 xv = to_vec(zg);
      double acc = 0;
      for (int kk = 0; kk < N; ++kk) {
        if (kk == j) continue;
        for (int q = 0; q < sys.gq[kk].size(); ++q)
          acc += sys.w_mu[kk][q] / two_pi * std::log(std::abs(zg - sys.gq[kk][q]));
      }
      RegSource src = ev.reg_source(xv, 0);
      for (int kk = 0; kk < N; ++kk)
        for (int q = 0; q < sys.gq[kk].size(); ++q)
          acc -= sys.w_mu[kk][q] * src.value(to_vec(sys.gq[kk][q]));
      int n_inner = ev.num_inner();
      if (n_inner > 0) {
        VecX mom = VecX::Zero(n_inner);
        for (int l = 0; l < n_inner; ++l)
          for (int kk = 0; kk < N; ++kk)
            for (int q = 0; q < sys.gq[kk].size(); ++q)
              mom[l] += sys.w_mu[kk][q] * ev.harmonic_measure(l + 1, to_vec(sys.gq[kk][q]));
        const VecX& c = ev.circulation_coeffs();
        for (int l = 0; l < n_inner; ++l) {
          double w = c[l];
          for (int mI = 0; mI < n_inner; ++mI) w -= ev.circulation_matrix_inv()(l, mI) * mom[mI];
          acc += w * ev.harmonic_measure(l + 1, xv);
        }
      }
      double Psi = self + acc;
      double psij = mu[j] / den.mass * out.psi[j].eval(z0);
      vals.push_back(Psi - psij);
    }
    double mean = 0;
    for (double v : vals) mean += v / vals.size();
    double osc = 0;
    for (double v : vals) osc = std::max(osc, std::abs(v - mean));
    out.interior_osc[j] = osc;
  }
  return out;
}

}  // namespace vp
