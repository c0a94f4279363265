#include "vp/domain.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace vp {

namespace {

// Accumulates value/gradient/Hessian of sign * Re log(1 - c * x^px * eta^py)
// with eta = y or conj(y). Everything is jointly holomorphic in (x, eta), so
// all real derivatives come from the complex ones.
struct LogTerm {
  double c;
  int px, py;
  bool conj_y;
  double sign;
};

void accumulate_term(RegEval& out, const LogTerm& t, cplx x, cplx y, int order) {
  cplx eta = t.conj_y ? std::conj(y) : y;
  cplx xf = (t.px == 1) ? x : 1.0 / x;
  cplx yf = (t.py == 1) ? eta : 1.0 / eta;
  cplx u = t.c * xf * yf;
  out.v += t.sign * std::log(std::abs(1.0 - u));
  if (order < 1) return;
  // monomial derivatives written without removable singularities at 0
  cplx ux = (t.px == 1) ? t.c * yf : -t.c * yf / (x * x);
  cplx ue = (t.py == 1) ? t.c * xf : -t.c * xf / (eta * eta);
  cplx inv = 1.0 / (1.0 - u);
  cplx fx = -ux * inv;
  cplx fe = -ue * inv;
  double sy = t.conj_y ? 1.0 : -1.0;  // sign of the Im slot for the y variable
  out.gx += t.sign * Vec2(fx.real(), -fx.imag());
  out.gy += t.sign * Vec2(fe.real(), sy * fe.imag());
  if (order < 2) return;
  cplx uxx = (t.px == 1) ? cplx(0, 0) : 2.0 * t.c * yf / (x * x * x);
  cplx uee = (t.py == 1) ? cplx(0, 0) : 2.0 * t.c * xf / (eta * eta * eta);
  cplx uxe = t.c;
  if (t.px == -1) uxe /= -(x * x);
  if (t.py == -1) uxe /= -(eta * eta);
  cplx fxx = -(uxx * (1.0 - u) + ux * ux) * inv * inv;
  cplx fee = -(uee * (1.0 - u) + ue * ue) * inv * inv;
  cplx fxe = -(uxe * (1.0 - u) + ux * ue) * inv * inv;
  Eigen::Matrix2d Hxx, Hyy, Hxy;
  Hxx << fxx.real(), -fxx.imag(), -fxx.imag(), -fxx.real();
  // y-variable second derivatives: the Im slot flips sign when eta = conj(y)
  Hyy << fee.real(), sy * fee.imag(), sy * fee.imag(), -fee.real();
  // mixed block: (a,b) = Re(sx_a * sy_b * fxe), sx = (1, i), sy = (1, -sy*i)
  Hxy(0, 0) = fxe.real();
  Hxy(0, 1) = sy * fxe.imag();
  Hxy(1, 0) = -fxe.imag();
  Hxy(1, 1) = sy * fxe.real();
  out.Hxx += t.sign * Hxx;
  out.Hyy += t.sign * Hyy;
  out.Hxy += t.sign * Hxy;
}

// value/grad/hess of log|x|
Deriv2 log_abs(const Vec2& x, int order) {
  Deriv2 d;
  double r2 = x.squaredNorm();
  d.v = 0.5 * std::log(r2);
  if (order >= 1) d.g = x / r2;
  if (order >= 2) d.H = Eigen::Matrix2d::Identity() / r2 - 2.0 * x * x.transpose() / (r2 * r2);
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Bem state
// ---------------------------------------------------------------------------

namespace detail {

struct BemCurve {
  VecXc z, dz, ddz;
  VecX speed, kappa, wq;
  VecXc nu;  // domain-outward unit normal
  double nu_sign = 1.0;
  cplx inner_point{0, 0};
  int offset = 0;
  int m = 0;
};

struct BemState {
  std::vector<BemCurve> curves;
  int mtot = 0, n = 0;
  MatX A;
  Eigen::PartialPivLU<MatX> lu;
  MatX harm_dens;  // (mtot+n) x n
  VecXc nodes;     // all nodes concatenated
  VecX wq;         // quadrature weight per node
  VecXc nu;        // normal per node
  double diam = 0;

  int curve_of(int i) const {
    for (size_t k = 0; k < curves.size(); ++k)
      if (i >= curves[k].offset && i < curves[k].offset + curves[k].m) return static_cast<int>(k);
    return -1;
  }
};

}  // namespace detail

using detail::BemCurve;
using detail::BemState;

namespace {

// Trig interpolation resampling of a closed curve.
std::vector<cplx> resample_curve(const std::vector<cplx>& z, int m_new) {
  int m = static_cast<int>(z.size());
  if (m_new == m) return z;
  std::vector<cplx> coef(m);
  for (int k = 0; k < m; ++k) {
    cplx s = 0;
    for (int i = 0; i < m; ++i)
      s += z[i] * std::exp(cplx(0, -two_pi * k * i / m));
    coef[k] = s / double(m);
  }
  std::vector<cplx> out(m_new);
  int half = m / 2;
  for (int i = 0; i < m_new; ++i) {
    double t = two_pi * i / m_new;
    cplx s = 0;
    for (int k = 0; k < m; ++k) {
      int kk = (k <= half) ? k : k - m;  // centered frequencies
      s += coef[k] * std::exp(cplx(0, kk * t));
    }
    out[i] = s;
  }
  return out;
}

BemCurve make_curve(std::vector<cplx> z, bool is_hole) {
  int m = static_cast<int>(z.size());
  require(m >= 32, ErrorCode::SingularBoundary, "curve needs at least 32 samples");

  // enforce counterclockwise orientation
  double area2 = 0;
  for (int i = 0; i < m; ++i) {
    cplx a = z[i], b = z[(i + 1) % m];
    area2 += a.real() * b.imag() - a.imag() * b.real();
  }
  if (area2 < 0) std::reverse(z.begin() + 1, z.end());

  BemCurve c;
  c.m = m;
  c.z.resize(m);
  for (int i = 0; i < m; ++i) c.z[i] = z[i];

  // spectral derivatives
  VecXc coef(m);
  for (int k = 0; k < m; ++k) {
    cplx s = 0;
    for (int i = 0; i < m; ++i) s += c.z[i] * std::exp(cplx(0, -two_pi * k * i / m));
    coef[k] = s / double(m);
  }
  c.dz.setZero(m);
  c.ddz.setZero(m);
  for (int k = 0; k < m; ++k) {
    int kk = (k <= m / 2) ? k : k - m;
    if (std::abs(kk) == m / 2) continue;  // drop Nyquist in derivatives
    for (int i = 0; i < m; ++i) {
      cplx e = std::exp(cplx(0, kk * two_pi * i / m));
      c.dz[i] += cplx(0, kk) * coef[k] * e;
      c.ddz[i] += -double(kk) * double(kk) * coef[k] * e;
    }
  }
  c.speed.resize(m);
  c.kappa.resize(m);
  c.nu.resize(m);
  c.wq.resize(m);
  double mean_speed = 0;
  for (int i = 0; i < m; ++i) mean_speed += std::abs(c.dz[i]) / m;
  for (int i = 0; i < m; ++i) {
    double s = std::abs(c.dz[i]);
    require(s > 1e-8 * mean_speed, ErrorCode::SingularBoundary, "vanishing discrete tangent");
    c.speed[i] = s;
    c.kappa[i] = (std::conj(c.dz[i]) * c.ddz[i]).imag() / (s * s * s);
    cplx enclosed_out = -cplx(0, 1) * c.dz[i] / s;
    c.nu_sign = is_hole ? -1.0 : 1.0;
    c.nu[i] = c.nu_sign * enclosed_out;
    c.wq[i] = s * two_pi / m;
  }

  // crude simplicity check: non-neighbor nodes must not nearly coincide
  double h = two_pi * mean_speed / m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 4; j < m && j - i < m - 4; ++j)
      require(std::abs(c.z[i] - c.z[j]) > 0.05 * h, ErrorCode::SingularBoundary,
              "curve self-intersects");

  cplx centroid = 0;
  for (int i = 0; i < m; ++i) centroid += c.z[i] / double(m);
  c.inner_point = centroid;
  return c;
}

double kernel_dl(cplx x, cplx q, cplx nu) {
  return -(1.0 / two_pi) * (nu / (q - x)).real();
}

}  // namespace

GreenEvaluator GreenEvaluator::build(const DomainSpec& spec, int quadrature_order) {
  GreenEvaluator ev;
  ev.spec_ = spec;
  switch (spec.kind) {
    case DomainKind::AnalyticDisk: {
      require(spec.radius > 0, ErrorCode::SingularBoundary, "disk radius must be positive");
      require(spec.circulations.size() == 0, ErrorCode::IndexOutOfRange,
              "disk has no interior boundary");
      ev.n_ = 0;
      ev.N_.resize(0, 0);
      ev.Ninv_.resize(0, 0);
      ev.c_.resize(0);
      return ev;
    }
    case DomainKind::AnalyticAnnulus: {
      double a = spec.inner_radius;
      require(a > 0 && a < 1, ErrorCode::SingularBoundary, "annulus inner radius in (0,1)");
      require(spec.circulations.size() == 1, ErrorCode::IndexOutOfRange,
              "annulus has one interior boundary");
      ev.n_ = 1;
      ev.N_ = MatX::Constant(1, 1, -two_pi / std::log(a));
      ev.Ninv_ = ev.N_.inverse();
      ev.c_ = ev.Ninv_ * spec.circulations;
      return ev;
    }
    case DomainKind::Bem: break;
  }

  require(!spec.curves.empty(), ErrorCode::SingularBoundary, "no boundary curves");
  int ncurl = static_cast<int>(spec.curves.size());
  require(spec.circulations.size() == ncurl - 1, ErrorCode::IndexOutOfRange,
          "circulation vector length must match interior boundary count");

  auto st = std::make_shared<BemState>();
  st->n = ncurl - 1;
  int offset = 0;
  for (int k = 0; k < ncurl; ++k) {
    std::vector<cplx> z;
    z.reserve(spec.curves[k].size());
    for (const auto& p : spec.curves[k]) z.emplace_back(p.x(), p.y());
    if (quadrature_order > 0) z = resample_curve(z, quadrature_order);
    BemCurve c = make_curve(std::move(z), k > 0);
    c.offset = offset;
    offset += c.m;
    st->curves.push_back(std::move(c));
  }
  st->mtot = offset;

  st->nodes.resize(st->mtot);
  st->wq.resize(st->mtot);
  st->nu.resize(st->mtot);
  for (const auto& c : st->curves)
    for (int i = 0; i < c.m; ++i) {
      st->nodes[c.offset + i] = c.z[i];
      st->wq[c.offset + i] = c.wq[i];
      st->nu[c.offset + i] = c.nu[i];
    }

  for (int i = 0; i < st->curves[0].m; ++i)
    for (int j = 0; j < i; ++j)
      st->diam = std::max(st->diam, std::abs(st->curves[0].z[i] - st->curves[0].z[j]));

  // curves must be mutually disjoint
  for (int a = 0; a < ncurl; ++a)
    for (int b = a + 1; b < ncurl; ++b)
      for (int i = 0; i < st->curves[a].m; ++i)
        for (int j = 0; j < st->curves[b].m; ++j)
          require(std::abs(st->curves[a].z[i] - st->curves[b].z[j]) > 1e-10 * st->diam,
                  ErrorCode::SingularBoundary, "boundary curves intersect");

  int dim = st->mtot + st->n;
  st->A.setZero(dim, dim);
  for (int i = 0; i < st->mtot; ++i) {
    cplx xi = st->nodes[i];
    int ci = st->curve_of(i);
    const BemCurve& ti = st->curves[ci];
    for (int j = 0; j < st->mtot; ++j) {
      double K;
      if (i == j) {
        K = -(1.0 / two_pi) * ti.nu_sign * ti.kappa[i - ti.offset] / 2.0;
      } else {
        K = kernel_dl(xi, st->nodes[j], st->nu[j]);
      }
      st->A(i, j) = K * st->wq[j];
    }
    st->A(i, i) -= 0.5;
    for (int k = 0; k < st->n; ++k)
      st->A(i, st->mtot + k) = std::log(std::abs(xi - st->curves[k + 1].inner_point));
  }
  for (int k = 0; k < st->n; ++k) {
    const BemCurve& c = st->curves[k + 1];
    for (int i = 0; i < c.m; ++i) st->A(st->mtot + k, c.offset + i) = c.wq[i];
  }

  {
    Eigen::JacobiSVD<MatX> svd(st->A);
    double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    require(std::isfinite(cond) && cond < 1e12, ErrorCode::IllConditioned,
            "boundary system condition number too large");
  }
  st->lu.compute(st->A);

  // harmonic measure densities
  st->harm_dens.resize(dim, st->n);
  for (int k = 0; k < st->n; ++k) {
    VecX rhs = VecX::Zero(dim);
    const BemCurve& c = st->curves[k + 1];
    for (int i = 0; i < c.m; ++i) rhs[c.offset + i] = 1.0;
    st->harm_dens.col(k) = st->lu.solve(rhs);
  }

  ev.n_ = st->n;
  ev.N_.resize(st->n, st->n);
  for (int j = 0; j < st->n; ++j)
    for (int k = 0; k < st->n; ++k) ev.N_(j, k) = -two_pi * st->harm_dens(st->mtot + j, k);
  double asym = (ev.N_ - ev.N_.transpose()).norm();
  require(st->n == 0 || asym <= 1e-8 * std::max(1.0, ev.N_.norm()), ErrorCode::IllConditioned,
          "circulation matrix asymmetry exceeds quadrature tolerance");
  ev.N_ = 0.5 * (ev.N_ + ev.N_.transpose()).eval();
  if (st->n > 0) {
    Eigen::SelfAdjointEigenSolver<MatX> es(ev.N_);
    require(es.eigenvalues().minCoeff() > 0, ErrorCode::IllConditioned,
            "circulation matrix not positive definite");
    ev.Ninv_ = ev.N_.inverse();
    ev.c_ = ev.Ninv_ * spec.circulations;
  } else {
    ev.Ninv_.resize(0, 0);
    ev.c_.resize(0);
  }
  ev.bem_ = st;
  return ev;
}

GreenEvaluator build_green_evaluator(const DomainSpec& spec, int quadrature_order) {
  return GreenEvaluator::build(spec, quadrature_order);
}

bool GreenEvaluator::contains(const Vec2& x, double margin) const {
  switch (spec_.kind) {
    case DomainKind::AnalyticDisk:
      return x.norm() < spec_.radius - margin;
    case DomainKind::AnalyticAnnulus:
      return x.norm() < 1.0 - margin && x.norm() > spec_.inner_radius + margin;
    case DomainKind::Bem: {
      cplx z = to_cplx(x);
      double w = 0;
      for (int j = 0; j < bem_->mtot; ++j) {
        double d = std::abs(z - bem_->nodes[j]);
        if (d < margin || d < 1e-13) return false;
        w += kernel_dl(z, bem_->nodes[j], bem_->nu[j]) * bem_->wq[j];
      }
      return w < -0.5;
    }
  }
  return false;
}

double GreenEvaluator::diameter() const {
  switch (spec_.kind) {
    case DomainKind::AnalyticDisk: return 2.0 * spec_.radius;
    case DomainKind::AnalyticAnnulus: return 2.0;
    case DomainKind::Bem: return bem_->diam;
  }
  return 0;
}

RegEval GreenEvaluator::reg_pair_analytic(const Vec2& xv, const Vec2& yv, int order) const {
  RegEval out;
  cplx x = to_cplx(xv), y = to_cplx(yv);
  if (spec_.kind == DomainKind::AnalyticDisk) {
    double R = spec_.radius;
    LogTerm t{1.0 / (R * R), 1, 1, true, 1.0};
    accumulate_term(out, t, x, y, order);
    out.v += std::log(R);
    out.v /= two_pi;
    out.gx /= two_pi;
    out.gy /= two_pi;
    out.Hxx /= two_pi;
    out.Hyy /= two_pi;
    out.Hxy /= two_pi;
    return out;
  }
  // annulus a < |x| < 1: reflected-image series, geometric in a^2
  double a = spec_.inner_radius;
  double la = std::log(a);
  int jmax = static_cast<int>(std::ceil(std::log(1e-18) / (2.0 * la))) + 2;
  for (int j = 0; j <= jmax; ++j) {
    double c = std::pow(a, 2.0 * j);
    accumulate_term(out, LogTerm{c, 1, 1, true, 1.0}, x, y, order);
    if (j >= 1) {
      accumulate_term(out, LogTerm{c, -1, -1, true, 1.0}, x, y, order);
      accumulate_term(out, LogTerm{c, -1, 1, false, -1.0}, x, y, order);
      accumulate_term(out, LogTerm{c, 1, -1, false, -1.0}, x, y, order);
    }
  }
  Deriv2 lx = log_abs(xv, order), ly = log_abs(yv, order);
  out.v += lx.v * ly.v / la;
  if (order >= 1) {
    out.gx += ly.v / la * lx.g;
    out.gy += lx.v / la * ly.g;
  }
  if (order >= 2) {
    out.Hxx += ly.v / la * lx.H;
    out.Hyy += lx.v / la * ly.H;
    out.Hxy += lx.g * ly.g.transpose() / la;
  }
  double s = 1.0 / two_pi;
  out.v *= s;
  out.gx *= s;
  out.gy *= s;
  out.Hxx *= s;
  out.Hyy *= s;
  out.Hxy *= s;
  return out;
}

namespace {

// evaluation helpers for the Bem representation
struct KernelEval {
  double v;
  Vec2 g;
  Eigen::Matrix2d H;
};

KernelEval eval_dl_kernel(cplx x, cplx q, cplx nu, int order) {
  KernelEval k{};
  cplx d = q - x;
  cplx f = -(1.0 / two_pi) * nu / d;
  k.v = f.real();
  if (order >= 1) {
    cplx f1 = -(1.0 / two_pi) * nu / (d * d);
    k.g = Vec2(f1.real(), -f1.imag());
    if (order >= 2) {
      cplx f2 = -(2.0 / two_pi) * nu / (d * d * d);
      k.H << f2.real(), -f2.imag(), -f2.imag(), -f2.real();
    }
  }
  return k;
}

KernelEval eval_log_source(cplx x, cplx w, int order) {
  KernelEval k{};
  cplx d = x - w;
  k.v = std::log(std::abs(d));
  if (order >= 1) {
    cplx f1 = 1.0 / d;
    k.g = Vec2(f1.real(), -f1.imag());
    if (order >= 2) {
      cplx f2 = -1.0 / (d * d);
      k.H << f2.real(), -f2.imag(), -f2.imag(), -f2.real();
    }
  }
  return k;
}

// representation value/derivatives at y for a solved density column
KernelEval eval_representation(const BemState& st, const VecX& dens, cplx y, int order) {
  KernelEval out{};
  out.H.setZero();
  out.g.setZero();
  for (int j = 0; j < st.mtot; ++j) {
    KernelEval k = eval_dl_kernel(y, st.nodes[j], st.nu[j], order);
    double s = dens[j] * st.wq[j];
    out.v += s * k.v;
    if (order >= 1) out.g += s * k.g;
    if (order >= 2) out.H += s * k.H;
  }
  for (int k = 0; k < st.n; ++k) {
    KernelEval e = eval_log_source(y, st.curves[k + 1].inner_point, order);
    double s = dens[st.mtot + k];
    out.v += s * e.v;
    if (order >= 1) out.g += s * e.g;
    if (order >= 2) out.H += s * e.H;
  }
  return out;
}

// boundary data vectors for g~(x, .): d^k/dx^k of (1/2pi) log|x - q|
void bem_data_columns(const BemState& st, cplx x, int xorder, MatX& data) {
  int dim = st.mtot + st.n;
  int cols = (xorder == 0) ? 1 : (xorder == 1 ? 3 : 5);
  data.setZero(dim, cols);
  for (int j = 0; j < st.mtot; ++j) {
    cplx d = x - st.nodes[j];
    data(j, 0) = std::log(std::abs(d)) / two_pi;
    if (xorder >= 1) {
      cplx f1 = 1.0 / d / two_pi;
      data(j, 1) = f1.real();
      data(j, 2) = -f1.imag();
    }
    if (xorder >= 2) {
      cplx f2 = -1.0 / (d * d) / two_pi;
      data(j, 3) = f2.real();   // d2/dx1dx1; d2/dx2dx2 is the negative
      data(j, 4) = -f2.imag();  // d2/dx1dx2
    }
  }
}

}  // namespace

RegEval GreenEvaluator::reg_pair(const Vec2& xv, const Vec2& yv, int order) const {
  require(contains(xv), ErrorCode::ExteriorPoint, "x outside domain");
  require(contains(yv), ErrorCode::ExteriorPoint, "y outside domain");
  if (spec_.kind != DomainKind::Bem) return reg_pair_analytic(xv, yv, order);

  const BemState& st = *bem_;
  cplx x = to_cplx(xv), y = to_cplx(yv);
  MatX data;
  bem_data_columns(st, x, order, data);
  MatX dens = st.lu.solve(data);

  RegEval out;
  KernelEval e0 = eval_representation(st, dens.col(0), y, order);
  out.v = e0.v;
  if (order >= 1) {
    out.gy = e0.g;
    KernelEval e1 = eval_representation(st, dens.col(1), y, order >= 2 ? 1 : 0);
    KernelEval e2 = eval_representation(st, dens.col(2), y, order >= 2 ? 1 : 0);
    out.gx = Vec2(e1.v, e2.v);
    if (order >= 2) {
      out.Hyy = e0.H;
      out.Hxy.row(0) = e1.g.transpose();
      out.Hxy.row(1) = e2.g.transpose();
      KernelEval e11 = eval_representation(st, dens.col(3), y, 0);
      KernelEval e12 = eval_representation(st, dens.col(4), y, 0);
      out.Hxx << e11.v, e12.v, e12.v, -e11.v;
    }
  }
  return out;
}

RegSource GreenEvaluator::reg_source(const Vec2& x, int xorder) const {
  require(contains(x), ErrorCode::ExteriorPoint, "x outside domain");
  RegSource s;
  s.ev_ = this;
  s.x_ = x;
  s.xorder_ = xorder;
  if (spec_.kind == DomainKind::Bem) {
    MatX data;
    bem_data_columns(*bem_, to_cplx(x), xorder, data);
    s.dens_ = bem_->lu.solve(data);
  }
  return s;
}

double RegSource::value(const Vec2& y) const {
  if (ev_->spec_.kind != DomainKind::Bem) return ev_->reg_pair_analytic(x_, y, 0).v;
  return eval_representation(*ev_->bem_, dens_.col(0), to_cplx(y), 0).v;
}

Vec2 RegSource::grad_y(const Vec2& y) const {
  if (ev_->spec_.kind != DomainKind::Bem) return ev_->reg_pair_analytic(x_, y, 1).gy;
  return eval_representation(*ev_->bem_, dens_.col(0), to_cplx(y), 1).g;
}

Vec2 RegSource::grad_x(const Vec2& y) const {
  if (ev_->spec_.kind != DomainKind::Bem) return ev_->reg_pair_analytic(x_, y, 1).gx;
  require(xorder_ >= 1, ErrorCode::DimensionMismatch, "source built without x derivatives");
  cplx yc = to_cplx(y);
  return Vec2(eval_representation(*ev_->bem_, dens_.col(1), yc, 0).v,
              eval_representation(*ev_->bem_, dens_.col(2), yc, 0).v);
}

Deriv2 GreenEvaluator::harm(int j, const Vec2& xv, int order) const {
  require(j >= 1 && j <= n_, ErrorCode::IndexOutOfRange, "harmonic measure index");
  require(contains(xv), ErrorCode::ExteriorPoint, "x outside domain");
  Deriv2 d;
  if (spec_.kind == DomainKind::AnalyticAnnulus) {
    double la = std::log(spec_.inner_radius);
    Deriv2 lx = log_abs(xv, order);
    d.v = lx.v / la;
    d.g = lx.g / la;
    d.H = lx.H / la;
    return d;
  }
  KernelEval e = eval_representation(*bem_, bem_->harm_dens.col(j - 1), to_cplx(xv), order);
  d.v = e.v;
  d.g = e.g;
  d.H = e.H;
  return d;
}

double GreenEvaluator::harmonic_measure(int j, const Vec2& x) const { return harm(j, x, 0).v; }

double GreenEvaluator::green(const Vec2& x, const Vec2& y) const {
  require((x - y).norm() > 1e-14 * std::max(1.0, diameter()), ErrorCode::CoincidentPoints,
          "green requires x != y");
  return -std::log((x - y).norm()) / two_pi + green_regular(x, y);
}

double GreenEvaluator::green_regular(const Vec2& x, const Vec2& y) const {
  return reg_pair(x, y, 0).v;
}

double GreenEvaluator::g0(const Vec2& x, const Vec2& y) const {
  double v = green(x, y);
  for (int j = 1; j <= n_; ++j)
    for (int k = 1; k <= n_; ++k)
      v += Ninv_(j - 1, k - 1) * harmonic_measure(j, x) * harmonic_measure(k, y);
  return v;
}

}  // namespace vp
