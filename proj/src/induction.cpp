#include "vp/induction.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace vp {

void gauss_legendre01(int n, VecX& nodes, VecX& weights) {
  MatX J = MatX::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);  // sums to 1 on [0,1]
  }
}

namespace {

cplx unit_map(const VecXc& beta, double a1, cplx z) {
  cplx acc = 0;
  int M = static_cast<int>(beta.size()) - 1;
  for (int m = M; m >= 3; --m) acc = acc * z + beta[m];
  return a1 * (z + acc * z * z * z);
}

cplx unit_dmap(const VecXc& beta, double a1, cplx z) {
  cplx acc = 0;
  int M = static_cast<int>(beta.size()) - 1;
  for (int m = M; m >= 3; --m) acc = acc * z + double(m) * beta[m];
  return a1 * (1.0 + acc * z * z);
}

int polygon_winding(const VecXc& poly, cplx x) {
  double total = 0;
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    cplx a = poly[i] - x, b = poly[(i + 1) % n] - x;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / two_pi));
}

}  // namespace

PatchSystem make_patch_system(GreenEvaluator ev, VecX mu, std::vector<PatchShape> shapes,
                              SystemOptions opts, std::vector<VecX> density) {
  PatchSystem sys;
  sys.ev = std::move(ev);
  sys.mu = std::move(mu);
  sys.shapes = std::move(shapes);
  int N = sys.count();
  require(static_cast<int>(sys.mu.size()) == N, ErrorCode::DimensionMismatch,
          "mu length must match patch count");

  int M = 0;
  for (const auto& s : sys.shapes) M = std::max(M, s.order());
  if (opts.ntheta <= 0) opts.ntheta = 4 * (M + 2);
  sys.opts = opts;
  sys.grid = std::make_shared<Grid>(opts.ntheta);

  VecX rad, radw;
  gauss_legendre01(opts.nrad, rad, radw);

  sys.gb.resize(N);
  sys.zdg.resize(N);
  sys.gq.resize(N);
  sys.w_mu.resize(N);
  sys.density = std::move(density);
  require(sys.density.empty() || static_cast<int>(sys.density.size()) == N,
          ErrorCode::DimensionMismatch, "density override must cover every patch");

  int nth = opts.ntheta;
  for (int j = 0; j < N; ++j) {
    const PatchShape& s = sys.shapes[j];
    require(s.conformal(), ErrorCode::NonConformal, "patch shape outside the conformal ball");
    cplx ctr = to_cplx(s.center());
    double a1 = s.a1();
    sys.gb[j].resize(nth);
    sys.zdg[j].resize(nth);
    for (int i = 0; i < nth; ++i) {
      cplx z = std::exp(cplx(0, sys.grid->theta(i)));
      sys.gb[j][i] = ctr + s.r() * unit_map(s.coef(), a1, z);
      sys.zdg[j][i] = z * s.r() * unit_dmap(s.coef(), a1, z);
    }
    int nq = opts.nrad * nth;
    sys.gq[j].resize(nq);
    VecX wphys(nq);
    for (int a = 0; a < opts.nrad; ++a)
      for (int b = 0; b < nth; ++b) {
        cplx z = rad[a] * std::exp(cplx(0, sys.grid->theta(b)));
        int q = a * nth + b;
        sys.gq[j][q] = ctr + s.r() * unit_map(s.coef(), a1, z);
        double jac = std::norm(s.r() * unit_dmap(s.coef(), a1, z));
        wphys[q] = jac * rad[a] * radw[a] * (two_pi / nth);
      }
    if (sys.density.empty()) {
      sys.w_mu[j] = wphys * (sys.mu[j] / wphys.sum());
    } else {
      require(sys.density[j].size() == nq, ErrorCode::DimensionMismatch,
              "density sample count mismatch");
      VecX w = wphys.cwiseProduct(sys.density[j]);
      sys.w_mu[j] = w * (sys.mu[j] / w.sum());
    }
  }

  // geometric admissibility: inside the domain, pairwise disjoint, not nested
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < nth; ++i)
      require(sys.ev.contains(to_vec(sys.gb[j][i])), ErrorCode::PatchOverlap,
              "patch boundary leaves the domain");
    for (int k = 0; k < j; ++k) {
      double dmin = 1e300;
      for (int a = 0; a < nth; ++a)
        for (int b = 0; b < nth; ++b)
          dmin = std::min(dmin, std::abs(sys.gb[j][a] - sys.gb[k][b]));
      require(dmin > sys.opts.min_gap, ErrorCode::PatchOverlap, "patch boundaries touch");
      // disjointness: no boundary sample of one patch may sit inside the other
      for (int a = 0; a < nth; ++a)
        require(polygon_winding(sys.gb[j], sys.gb[k][a]) == 0 &&
                    polygon_winding(sys.gb[k], sys.gb[j][a]) == 0,
                ErrorCode::PatchOverlap, "patches overlap");
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// self interaction at unit scale
// ---------------------------------------------------------------------------

namespace {

struct UnitBoundary {
  VecXc gb1;   // gamma_1(e^{i8})
  VecXc nvec;  // e^{i8} gamma_1'(e^{i8})  (outward direction times speed)
  std::vector<cplx> zs;
  double a1;
};

UnitBoundary unit_boundary(const VecXc& beta, const Grid& grid) {
  int n = grid.size();
  UnitBoundary ub;
  ub.a1 = a1_of(beta);
  ub.gb1.resize(n);
  ub.nvec.resize(n);
  ub.zs.resize(n);
  for (int i = 0; i < n; ++i) {
    cplx z = std::exp(cplx(0, grid.theta(i)));
    ub.zs[i] = z;
    ub.gb1[i] = unit_map(beta, ub.a1, z);
    ub.nvec[i] = z * unit_dmap(beta, ub.a1, z);
  }
  return ub;
}

// smooth factor of log|g(8) - g(8')| after removing the periodic singularity
double smooth_logdiff(const UnitBoundary& ub, int i, int ip) {
  if (i == ip) return std::log(std::abs(ub.nvec[i]));  // |g'(e^{i8})|
  return std::log(std::abs(ub.gb1[i] - ub.gb1[ip]) / std::abs(ub.zs[i] - ub.zs[ip]));
}

}  // namespace

VecX self_log_potential(const VecXc& beta, const Grid& grid) {
  int n = grid.size();
  UnitBoundary ub = unit_boundary(beta, grid);
  const MatX& R = grid.log_weights();
  double wt = two_pi / n;
  VecX W(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (int ip = 0; ip < n; ++ip) {
      double A = (std::conj(ub.nvec[ip]) * (ub.gb1[ip] - ub.gb1[i])).real();
      double S = smooth_logdiff(ub, i, ip);
      acc += wt * A * S + 0.5 * R(i, ip) * A;
    }
    W[i] = 0.5 * acc - 0.5 * pi;
  }
  return W;
}

VecXc self_log_gradient(const VecXc& beta, const Grid& grid) {
  int n = grid.size();
  UnitBoundary ub = unit_boundary(beta, grid);
  const MatX& R = grid.log_weights();
  double wt = two_pi / n;
  VecXc G(n);
  for (int i = 0; i < n; ++i) {
    cplx acc = 0;
    for (int ip = 0; ip < n; ++ip)
      acc += ub.nvec[ip] * (wt * smooth_logdiff(ub, i, ip) + 0.5 * R(i, ip));
    G[i] = -acc;
  }
  return G;
}

Fourier self_stream_h(const VecXc& beta, int ntheta, bool check) {
  Grid grid(ntheta);
  UnitBoundary ub = unit_boundary(beta, grid);
  VecXc G = self_log_gradient(beta, grid);
  VecX samples(ntheta);
  for (int i = 0; i < ntheta; ++i) {
    cplx tau = cplx(0, 1) * ub.nvec[i];  // d gamma / d theta
    samples[i] = (std::conj(tau) * G[i]).real() / (2.0 * pi * pi);
  }
  int K = ntheta / 2 - 2;
  Fourier h = grid.to_fourier(samples, K);
  require(std::abs(h.a0) < 1e-9 * std::max(1.0, h.l2norm()), ErrorCode::QuadratureNotConverged,
          "self stream lost mean-zero structure");
  h.a0 = 0;
  if (check) {
    Fourier h2 = self_stream_h(beta, 2 * ntheta, false);
    double diff = 0;
    for (int k = 1; k <= h.modes(); ++k)
      diff = std::max({diff, std::abs(h.cosc(k) - h2.cosc(k)),
                       std::abs(h.sinc(k) - h2.sinc(k))});
    require(diff < 1e-9 * std::max(1.0, h.l2norm()), ErrorCode::QuadratureNotConverged,
            "self stream quadrature not converged");
  }
  return h;
}

Fourier dh0_apply(const Fourier& alpha) {
  for (int k = 1; k <= std::min(2, alpha.modes()); ++k)
    require(alpha.cosc(k) == 0 && alpha.sinc(k) == 0, ErrorCode::DimensionMismatch,
            "dh0 input must have modes >= 3");
  int K = alpha.modes();
  Fourier out(std::max(2, K - 1));
  for (int m = 3; m <= K; ++m) {
    double f = (m - 2) / two_pi;
    out.A[m - 2] += f * alpha.sinc(m);
    out.B[m - 2] -= f * alpha.cosc(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// stream assembly over the whole system
// ---------------------------------------------------------------------------

namespace {

// interior harmonic-measure moments: mom_l = sum_k int H_l dmu weighted by mu
VecX harmonic_moments(const PatchSystem& sys) {
  int n = sys.ev.num_inner();
  VecX mom = VecX::Zero(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < sys.count(); ++k)
      for (int q = 0; q < sys.gq[k].size(); ++q)
        mom[l] += sys.w_mu[k][q] * sys.ev.harmonic_measure(l + 1, to_vec(sys.gq[k][q]));
  return mom;
}

}  // namespace

std::vector<VecXc> boundary_stream_gradient(const PatchSystem& sys) {
  int N = sys.count();
  int nth = sys.grid->size();
  int n_inner = sys.ev.num_inner();
  VecX mom = harmonic_moments(sys);
  const MatX& Ninv = sys.ev.circulation_matrix_inv();
  const VecX& c = sys.ev.circulation_coeffs();

  std::vector<VecXc> out(N);
  for (int j = 0; j < N; ++j) {
    out[j] = VecXc::Zero(nth);
    const PatchShape& sj = sys.shapes[j];

    // own-patch Newtonian term, reduced to the boundary at unit scale
    if (sys.density.empty()) {
      VecXc G = self_log_gradient(sj.coef(), *sys.grid);
      for (int i = 0; i < nth; ++i)
        out[j][i] += sys.mu[j] / (2.0 * pi * pi * sj.r()) * G[i];
    }

    parallel_for(nth, [&](int i) {
      cplx x = sys.gb[j][i];
      Vec2 xv = to_vec(x);
      cplx acc = 0;
      for (int k = 0; k < N; ++k) {
        if (k == j) continue;  // own Newtonian term handled on the boundary
        for (int q = 0; q < sys.gq[k].size(); ++q)
          acc += sys.w_mu[k][q] / two_pi * std::conj(1.0 / (x - sys.gq[k][q]));
      }
      RegSource src = sys.ev.reg_source(xv, 1);
      for (int k = 0; k < N; ++k)
        for (int q = 0; q < sys.gq[k].size(); ++q)
          acc -= sys.w_mu[k][q] * to_cplx(src.grad_x(to_vec(sys.gq[k][q])));
      for (int l = 0; l < n_inner; ++l) {
        Deriv2 hl = sys.ev.harm(l + 1, xv, 1);
        double w = c[l];
        for (int m = 0; m < n_inner; ++m) w -= Ninv(l, m) * mom[m];
        acc += w * to_cplx(hl.g);
      }
      out[j][i] += acc;
    });
  }
  return out;
}

std::vector<Fourier> stream_on_boundary(const PatchSystem& sys, int K) {
  int M = 0;
  for (const auto& s : sys.shapes) M = std::max(M, s.order());
  if (K <= 0) K = M + 2;
  require(2 * K < sys.grid->size(), ErrorCode::DimensionMismatch, "grid too coarse");

  auto project = [&](const PatchSystem& s) {
    auto grads = boundary_stream_gradient(s);
    std::vector<Fourier> phi(s.count());
    for (int j = 0; j < s.count(); ++j) {
      VecX samples(s.grid->size());
      for (int i = 0; i < s.grid->size(); ++i) {
        cplx tau = cplx(0, 1) * s.zdg[j][i];
        samples[i] = (std::conj(tau) * grads[j][i]).real();
      }
      phi[j] = s.grid->to_fourier(samples, K);
      require(std::abs(phi[j].a0) < 1e-8 * std::max(1.0, phi[j].l2norm()),
              ErrorCode::QuadratureNotConverged, "stream derivative lost mean-zero structure");
      phi[j].a0 = 0;
    }
    return phi;
  };

  auto phi = project(sys);
  if (sys.opts.check_quadrature) {
    require(sys.density.empty(), ErrorCode::DimensionMismatch,
            "order-doubling check expects uniform patches");
    SystemOptions fine = sys.opts;
    fine.ntheta = 2 * sys.opts.ntheta;
    fine.nrad = 2 * sys.opts.nrad;
    fine.check_quadrature = false;
    auto phi2 = project(make_patch_system(sys.ev, sys.mu, sys.shapes, fine));
    for (int j = 0; j < sys.count(); ++j) {
      double scale = std::max(1.0, phi[j].l2norm());
      for (int k = 1; k <= phi[j].modes(); ++k) {
        double d = std::max(std::abs(phi[j].cosc(k) - phi2[j].cosc(k)),
                            std::abs(phi[j].sinc(k) - phi2[j].sinc(k)));
        require(d < 1e-8 * scale, ErrorCode::QuadratureNotConverged,
                "boundary stream quadrature not converged");
      }
    }
  }
  return phi;
}

std::vector<VecX> boundary_stream_values(const PatchSystem& sys) {
  int N = sys.count();
  int nth = sys.grid->size();
  int n_inner = sys.ev.num_inner();
  VecX mom = harmonic_moments(sys);
  const MatX& Ninv = sys.ev.circulation_matrix_inv();
  const VecX& c = sys.ev.circulation_coeffs();

  std::vector<VecX> out(N);
  for (int j = 0; j < N; ++j) {
    out[j] = VecX::Zero(nth);
    const PatchShape& sj = sys.shapes[j];
    if (sys.density.empty()) {
      VecX W = self_log_potential(sj.coef(), *sys.grid);
      for (int i = 0; i < nth; ++i)
        out[j][i] += sys.mu[j] / (2.0 * pi * pi) * (W[i] + pi * std::log(sj.r()));
    }
    // (density systems add their own weighted self term through the caller)

    parallel_for(nth, [&](int i) {
      cplx x = sys.gb[j][i];
      Vec2 xv = to_vec(x);
      double acc = 0;
      for (int k = 0; k < N; ++k) {
        if (k == j) continue;
        for (int q = 0; q < sys.gq[k].size(); ++q)
          acc += sys.w_mu[k][q] / two_pi * std::log(std::abs(x - sys.gq[k][q]));
      }
      RegSource src = sys.ev.reg_source(xv, 0);
      for (int k = 0; k < N; ++k)
        for (int q = 0; q < sys.gq[k].size(); ++q)
          acc -= sys.w_mu[k][q] * src.value(to_vec(sys.gq[k][q]));
      for (int l = 0; l < n_inner; ++l) {
        double w = c[l];
        for (int m = 0; m < n_inner; ++m) w -= Ninv(l, m) * mom[m];
        acc += w * sys.ev.harmonic_measure(l + 1, xv);
      }
      out[j][i] += acc;
    });
  }
  return out;
}

std::vector<Vec2> velocity_field(const PatchSystem& sys, const std::vector<Vec2>& points) {
  require(sys.density.empty(), ErrorCode::DimensionMismatch,
          "velocity sampling expects uniform patches");
  int N = sys.count();
  int nth = sys.grid->size();
  int n_inner = sys.ev.num_inner();
  VecX mom = harmonic_moments(sys);
  const MatX& Ninv = sys.ev.circulation_matrix_inv();
  const VecX& c = sys.ev.circulation_coeffs();

  std::vector<Vec2> out(points.size());
  for (size_t p = 0; p < points.size(); ++p) {
    Vec2 xv = points[p];
    cplx x = to_cplx(xv);
    require(sys.ev.contains(xv), ErrorCode::ExteriorPoint, "velocity point outside domain");
    int inside = -1;
    for (int k = 0; k < N; ++k) {
      double dmin = 1e300;
      for (int i = 0; i < nth; ++i) dmin = std::min(dmin, std::abs(x - sys.gb[k][i]));
      require(dmin > 1e-6, ErrorCode::OnInterface, "velocity point on a patch boundary");
      if (polygon_winding(sys.gb[k], x) != 0) inside = k;
    }
    cplx g = 0;
    for (int k = 0; k < N; ++k) {
      if (k == inside) {
        cplx acc = 0;
        for (int i = 0; i < nth; ++i)
          acc -= (two_pi / nth) * sys.zdg[k][i] * std::log(std::abs(x - sys.gb[k][i]));
        double r = sys.shapes[k].r();
        g += sys.mu[k] / (2.0 * pi * pi * r * r) * acc;
      } else {
        for (int q = 0; q < sys.gq[k].size(); ++q)
          g += sys.w_mu[k][q] / two_pi * std::conj(1.0 / (x - sys.gq[k][q]));
      }
    }
    RegSource src = sys.ev.reg_source(xv, 1);
    for (int k = 0; k < N; ++k)
      for (int q = 0; q < sys.gq[k].size(); ++q)
        g -= sys.w_mu[k][q] * to_cplx(src.grad_x(to_vec(sys.gq[k][q])));
    for (int l = 0; l < n_inner; ++l) {
      Deriv2 hl = sys.ev.harm(l + 1, xv, 1);
      double w = c[l];
      for (int m = 0; m < n_inner; ++m) w -= Ninv(l, m) * mom[m];
      g += w * to_cplx(hl.g);
    }
    out[p] = to_vec(cplx(0, 1) * g);  // u = J grad Psi
  }
  return out;
}

double patch_energy(const PatchSystem& sys) {
  require(sys.density.empty(), ErrorCode::DimensionMismatch,
          "patch energy expects uniform patches");
  int N = sys.count();
  int n_inner = sys.ev.num_inner();
  const MatX& Ninv = sys.ev.circulation_matrix_inv();
  VecX mom = harmonic_moments(sys);

  double E = 0;
  if (n_inner > 0) {
    E += 0.5 * sys.ev.spec().circulations.dot(sys.ev.circulation_coeffs());
    E -= sys.ev.circulation_coeffs().dot(mom);
  }

  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= j; ++k) {
      double fac = (j == k) ? 0.5 : 1.0;
      double S = 0;
      for (int q = 0; q < sys.gq[j].size(); ++q) {
        RegSource src = sys.ev.reg_source(to_vec(sys.gq[j][q]), 0);
        double acc = 0;
        for (int qq = 0; qq < sys.gq[k].size(); ++qq) {
          acc += sys.w_mu[k][qq] * src.value(to_vec(sys.gq[k][qq]));
          if (j != k)
            acc -= sys.w_mu[k][qq] / two_pi * std::log(std::abs(sys.gq[j][q] - sys.gq[k][qq]));
        }
        S += sys.w_mu[j][q] * acc;
      }
      if (n_inner > 0) {
        VecX mj = VecX::Zero(n_inner), mk = VecX::Zero(n_inner);
        for (int l = 0; l < n_inner; ++l) {
          for (int q = 0; q < sys.gq[j].size(); ++q)
            mj[l] += sys.w_mu[j][q] * sys.ev.harmonic_measure(l + 1, to_vec(sys.gq[j][q]));
          for (int q = 0; q < sys.gq[k].size(); ++q)
            mk[l] += sys.w_mu[k][q] * sys.ev.harmonic_measure(l + 1, to_vec(sys.gq[k][q]));
        }
        S += mj.dot(Ninv * mk);
      }
      if (j == k) {
        // own-patch log energy through the double-boundary reduction
        const PatchShape& sj = sys.shapes[j];
        const Grid& grid = *sys.grid;
        UnitBoundary ub = unit_boundary(sj.coef(), grid);
        const MatX& R = grid.log_weights();
        int n = grid.size();
        double wt = two_pi / n;
        double I1 = 0;
        for (int i = 0; i < n; ++i)
          for (int ip = 0; ip < n; ++ip) {
            double A = (std::conj(ub.nvec[ip]) * ub.nvec[i]).real();
            double d2 = std::norm(ub.gb1[i] - ub.gb1[ip]);
            if (i == ip) continue;
            double Ssm = smooth_logdiff(ub, i, ip);
            I1 += wt * wt * A * d2 * (2.0 * Ssm - 1.0) / 4.0 + wt * R(i, ip) * A * d2 / 4.0;
          }
        I1 = -0.5 * I1 - pi * pi / 2.0;
        double mu = sys.mu[j], r = sj.r();
        S += -(mu * mu / two_pi) * (std::log(r) + I1 / (pi * pi));
      }
      E += fac * S;
    }
  return E;
}

}  // namespace vp
