#include "vp/patchgeom.hpp"

#include <cmath>

namespace vp {

double rs_bound(int M, double s) {
  double sum = 0;
  for (int m = 3; m <= M; ++m) sum += std::pow(double(m), 2.0 - 2.0 * s);
  return 1.0 / std::sqrt(sum);
}

double a1_of(const VecXc& coef) {
  double s = 1.0;
  for (int m = 3; m < coef.size(); ++m) s += m * std::norm(coef[m]);
  return 1.0 / std::sqrt(s);
}

PatchShape::PatchShape(double r, const Vec2& center, VecXc coef)
    : r_(r), center_(center), coef_(std::move(coef)) {
  require(r_ > 0, ErrorCode::NonConformal, "patch radius must be positive");
  require(coef_.size() >= 4, ErrorCode::DimensionMismatch, "coefficient vector too short");
  for (int m = 0; m <= 2 && m < coef_.size(); ++m)
    require(std::abs(coef_[m]) == 0.0, ErrorCode::NonConformal,
            "shape modes 0..2 are fixed by the normalization");
  a1_ = a1_of(coef_);
}

double PatchShape::norm_hs(double s) const {
  double sum = 0;
  for (int m = 3; m <= order(); ++m) sum += std::pow(double(m), 2.0 * s) * std::norm(coef_[m]);
  return std::sqrt(sum);
}

bool PatchShape::conformal(double s) const { return norm_hs(s) < rs_bound(order(), s); }

cplx PatchShape::tilde(cplx z) const {
  // Horner on the tail
  cplx acc = 0;
  for (int m = order(); m >= 3; --m) acc = acc * z + coef_[m];
  return acc * z * z * z;
}

cplx PatchShape::dtilde(cplx z) const {
  cplx acc = 0;
  for (int m = order(); m >= 3; --m) acc = acc * z + double(m) * coef_[m];
  return acc * z * z;
}

cplx PatchShape::map(cplx z) const { return to_cplx(center_) + r_ * a1_ * (z + tilde(z)); }

cplx PatchShape::dmap(cplx z) const { return r_ * a1_ * (1.0 + dtilde(z)); }

double PatchShape::area(int nquad) const {
  double a = 0;
  for (int i = 0; i < nquad; ++i) {
    cplx z = std::exp(cplx(0, two_pi * i / nquad));
    cplx g = map(z);
    cplx dg = cplx(0, 1) * z * dmap(z);  // d/dtheta
    a += 0.5 * (std::conj(g) * dg).imag();
  }
  return a * two_pi / nquad;
}

PatchShape PatchShape::with_center(const Vec2& c) const {
  PatchShape s = *this;
  s.center_ = c;
  return s;
}

PatchShape PatchShape::with_coef(const VecXc& coef) const { return PatchShape(r_, center_, coef); }

std::pair<Vec2, Vec2> boundary_eval(const PatchShape& shape, double theta) {
  require(shape.conformal(), ErrorCode::NonConformal, "shape norm exceeds the conformal bound");
  cplx z = std::exp(cplx(0, theta));
  cplx g = shape.map(z);
  cplx dg = cplx(0, 1) * z * shape.dmap(z);
  return {to_vec(g), to_vec(dg)};
}

QResult q_apply(double r, const VecXc& beta, const Fourier& f, int out_modes) {
  int M = static_cast<int>(beta.size()) - 1;
  require(M >= 3, ErrorCode::DimensionMismatch, "shape coefficients too short");
  double a1 = a1_of(beta);
  {
    double nb = 0;
    for (int m = 3; m <= M; ++m) nb += std::pow(double(m), 4.0) * std::norm(beta[m]);
    require(std::sqrt(nb) < rs_bound(M), ErrorCode::NonConformal, "shape outside conformal ball");
  }
  require(std::abs(f.a0) <= 1e-10 * std::max(1.0, f.l2norm()), ErrorCode::MeanNotZero,
          "q_apply needs a mean-zero boundary function");

  // work at unit scale; the r-scaling acts diagonally on the output
  int K = f.modes();
  int ng = 4 * (M + K + 4);
  Grid grid(ng);

  // w = f / |dGamma|^2 with Gamma at r = 1
  VecX w(ng);
  for (int i = 0; i < ng; ++i) {
    cplx z = std::exp(cplx(0, grid.theta(i)));
    cplx acc = 0;
    for (int m = M; m >= 3; --m) acc = acc * z + double(m) * beta[m];
    cplx dg = a1 * (1.0 + acc * z * z);
    w[i] = f.eval(grid.theta(i)) / std::norm(dg);
  }
  int Kw = M + K + 1;
  Fourier wf = grid.to_fourier(w, Kw);

  double At0 = wf.a0;
  cplx rhs(wf.cosc(1), -wf.sinc(1));  // A1 - i B1

  // solve -(c/a) q + conj(q) = rhs, c/a = 3 c3
  cplx chat = 3.0 * beta[3];
  double det = std::norm(chat) - 1.0;
  require(std::abs(det) > 1e-10, ErrorCode::NonUniqueness,
          "center-recovery system is singular");
  // unknown q = p + i s: [1-Re chat, Im chat; -Im chat, -(1+Re chat)] [p, s] = [re, im]
  double a11 = 1.0 - chat.real(), a12 = chat.imag();
  double a21 = -chat.imag(), a22 = -(1.0 + chat.real());
  double d = a11 * a22 - a12 * a21;
  cplx qm1((a22 * rhs.real() - a12 * rhs.imag()) / d,
           (-a21 * rhs.real() + a11 * rhs.imag()) / d);
  double q0 = At0;
  cplx q1 = -chat * qm1;

  // dGamma = z dG/dz * (qm1/z + q0 + q1 z + F(z)), F_l = A_l - i B_l for l >= 2
  // P(z) = z dG/dz has coefficients P[1] = a1, P[m] = a1 m c_m.
  int nF = Kw;
  VecXc S = VecXc::Zero(nF + 2);  // Laurent coefficients of (qm1/z + q0 + q1 z + F), index l+1
  S[0] = qm1;
  S[1] = q0;
  S[2] = q1;
  for (int l = 2; l <= nF; ++l) S[l + 1] += cplx(wf.cosc(l), -wf.sinc(l));

  int top = M + nF + 1;
  VecXc gdot = VecXc::Zero(top + 1);
  auto P = [&](int m) -> cplx {
    if (m == 1) return cplx(a1, 0);
    if (m >= 3 && m <= M) return a1 * double(m) * beta[m];
    return cplx(0, 0);
  };
  for (int m = 1; m <= M; ++m) {
    cplx pm = P(m);
    if (pm == cplx(0, 0)) continue;
    for (int l = -1; l <= nF; ++l) {
      int pow = m + l;
      if (pow >= 0 && pow <= top) gdot[pow] += pm * S[l + 1];
    }
  }

  QResult out;
  cplx y1 = gdot[0];
  double a1dot = gdot[1].real();  // imaginary part vanishes by construction
  out.alpha = VecXc::Zero(out_modes + 1);
  for (int m = 3; m <= out_modes && m <= top; ++m) {
    cplx cm = (m <= M) ? beta[m] : cplx(0, 0);
    out.alpha[m] = (gdot[m] - a1dot * cm) / a1;
  }
  out.y = to_vec(y1) / r;
  out.alpha /= r * r;
  out.a1dot = a1dot;
  return out;
}

Fourier q_invert(double r, const VecXc& beta, const Vec2& y, const VecXc& alpha) {
  int M = static_cast<int>(beta.size()) - 1;
  int Ma = static_cast<int>(alpha.size()) - 1;
  for (int m = 0; m <= 2 && m <= Ma; ++m)
    require(std::abs(alpha[m]) == 0.0, ErrorCode::DimensionMismatch,
            "alpha must contain modes >= 3 only");
  double a1 = a1_of(beta);
  {
    double nb = 0;
    for (int m = 3; m <= M; ++m) nb += std::pow(double(m), 4.0) * std::norm(beta[m]);
    require(std::sqrt(nb) < rs_bound(M), ErrorCode::NonConformal, "shape outside conformal ball");
  }

  // undo the diag(r^-1, r^-2) scaling
  cplx yt = to_cplx(y) * r;
  VecXc at = alpha * (r * r);

  // a1dot = -a1^3 Re sum m c_m conj(d_m)
  double s = 0;
  for (int m = 3; m <= std::min(M, Ma); ++m) s += m * (beta[m] * std::conj(at[m])).real();
  double a1dot = -a1 * a1 * a1 * s;

  // dGamma(z) = yt + a1dot (z + tilde) + a1 tilde_dot, then f = dGamma . (z dG/dz)
  int top = std::max(M, Ma);
  VecXc gdot = VecXc::Zero(top + 1);
  gdot[0] = yt;
  gdot[1] = a1dot;
  for (int m = 3; m <= top; ++m) {
    if (m <= M) gdot[m] += a1dot * beta[m];
    if (m <= Ma) gdot[m] += a1 * at[m];
  }

  int ng = 4 * (top + 4);
  Grid grid(ng);
  VecX fs(ng);
  for (int i = 0; i < ng; ++i) {
    cplx z = std::exp(cplx(0, grid.theta(i)));
    cplx acc = 0;
    for (int m = M; m >= 3; --m) acc = acc * z + double(m) * beta[m];
    cplx zdg = a1 * (z + acc * z * z * z);
    cplx gd = 0;
    for (int m = top; m >= 0; --m) gd = gd * z + gdot[m];
    fs[i] = (std::conj(zdg) * gd).real();
  }
  Fourier f = grid.to_fourier(fs, top + 2);
  require(std::abs(f.a0) < 1e-11 * std::max(1.0, f.l2norm()), ErrorCode::MeanNotZero,
          "volume preservation violated");
  f.a0 = 0.0;
  return f;
}

namespace {

struct Mobius {
  cplx alpha{1, 0};
  cplx c{0, 0};
  cplx operator()(cplx z) const { return alpha * (z + c) / (1.0 + std::conj(c) * z); }
};

// psi_cur composed with the inner update m_delta(z) = (z+delta)/(1+conj(delta) z)
Mobius compose_inner(const Mobius& cur, cplx delta) {
  Mobius out;
  out.c = (delta + cur.c) / (1.0 + cur.c * std::conj(delta));
  out.alpha = cur.alpha * (1.0 + cur.c * std::conj(delta)) / (1.0 + std::conj(cur.c) * delta);
  out.alpha /= std::abs(out.alpha);
  return out;
}

VecXc taylor_of_composition(const VecXc& raw, const Mobius& psi, int K) {
  int ng = std::max(4 * K, 64);
  VecXc coef = VecXc::Zero(K + 1);
  std::vector<cplx> vals(ng);
  for (int i = 0; i < ng; ++i) {
    cplx z = std::exp(cplx(0, two_pi * i / ng));
    cplx w = psi(z);
    cplx acc = 0;
    for (int m = static_cast<int>(raw.size()) - 1; m >= 0; --m) acc = acc * w + raw[m];
    vals[i] = acc;
  }
  for (int k = 0; k <= K; ++k) {
    cplx s = 0;
    for (int i = 0; i < ng; ++i) s += vals[i] * std::exp(cplx(0, -k * two_pi * i / ng));
    coef[k] = s / double(ng);
  }
  return coef;
}

}  // namespace

std::pair<PatchShape, MobiusRecord> normalize_conformal(const VecXc& raw) {
  int Mr = static_cast<int>(raw.size()) - 1;
  require(Mr >= 1, ErrorCode::DimensionMismatch, "raw map needs at least mode 1");
  double dom = std::abs(raw[1]);
  for (int m = 2; m <= Mr; ++m)
    require(std::abs(raw[m]) <= dom / 10.0, ErrorCode::NotNearCircle,
            "mode-1 dominance required");

  int K = std::max(Mr + 8, 16);
  Mobius psi;
  MobiusRecord rec;
  VecXc coef = taylor_of_composition(raw, psi, K);
  for (int iter = 0; iter < 30; ++iter) {
    cplx d2 = 2.0 * coef[2];
    if (std::abs(d2) <= 1e-13 * std::abs(coef[1])) break;
    require(iter < 29, ErrorCode::NotNearCircle, "Moebius Newton did not converge");
    cplx d1 = coef[1], d3 = 6.0 * coef[3];
    // solve d3 * v - 2 d1 * conj(v) = -d2 for v
    double a11 = d3.real() - 2.0 * d1.real(), a12 = -d3.imag() - 2.0 * d1.imag();
    double a21 = d3.imag() - 2.0 * d1.imag(), a22 = d3.real() + 2.0 * d1.real();
    double det = a11 * a22 - a12 * a21;
    require(std::abs(det) > 1e-14 * (std::norm(d1) + std::norm(d3) + 1e-30),
            ErrorCode::NotNearCircle, "degenerate normalization system");
    cplx v((-d2.real() * a22 + d2.imag() * a12) / det,
           (d2.real() * a21 - d2.imag() * a11) / det);
    // damping keeps the update inside the disk
    if (std::abs(v) > 0.5) v *= 0.5 / std::abs(v);
    psi = compose_inner(psi, v);
    rec.iterations = iter + 1;
    coef = taylor_of_composition(raw, psi, K);
  }

  cplx d1 = coef[1];
  cplx rot = std::conj(d1) / std::abs(d1);
  // fold the rotation into the automorphism: psi(rot * z)
  psi.c *= std::conj(rot);
  psi.alpha *= rot;
  for (int k = 0; k <= K; ++k) coef[k] *= std::pow(rot, k);

  rec.alpha = psi.alpha;
  rec.c = psi.c;

  double ra1 = coef[1].real();
  require(ra1 > 0, ErrorCode::NotNearCircle, "normalization lost orientation");
  int Mout = std::max(Mr, 8);
  VecXc shape_coef = VecXc::Zero(Mout + 1);
  for (int m = 3; m <= Mout && m <= K; ++m) shape_coef[m] = coef[m] / coef[1];
  double a1 = a1_of(shape_coef);
  PatchShape shape(ra1 / a1, to_vec(coef[0]), shape_coef);
  return {shape, rec};
}

}  // namespace vp
