#pragma once

#include "vp/fourier.hpp"

namespace vp {

// Near-circular vortical domain as the image of the unit disk under
//   G(z) = center + r * a1 * (z + sum_{m=3}^{M} c_m z^m),
// with a1 fixed so the image area is exactly pi r^2.
class PatchShape {
public:
  PatchShape() = default;
  // coef holds c_m at index m (entries 0..2 must be zero).
  PatchShape(double r, const Vec2& center, VecXc coef);

  double r() const { return r_; }
  const Vec2& center() const { return center_; }
  double a1() const { return a1_; }
  int order() const { return static_cast<int>(coef_.size()) - 1; }  // M
  const VecXc& coef() const { return coef_; }
  cplx c(int m) const { return (m >= 0 && m <= order()) ? coef_[m] : cplx(0, 0); }

  double norm_hs(double s = 2.0) const;  // discrete H^s norm of the shape modes
  bool conformal(double s = 2.0) const;

  cplx map(cplx z) const;        // G(z)
  cplx dmap(cplx z) const;       // dG/dz
  cplx tilde(cplx z) const;      // sum c_m z^m
  cplx dtilde(cplx z) const;     // derivative of the above
  double area(int nquad = 512) const;  // shoelace quadrature

  PatchShape with_center(const Vec2& c) const;
  PatchShape with_coef(const VecXc& coef) const;

private:
  double r_ = 0.1;
  Vec2 center_ = Vec2::Zero();
  VecXc coef_;  // index m
  double a1_ = 1.0;
};

double rs_bound(int M, double s = 2.0);  // conformality radius of the truncated shape space
double a1_of(const VecXc& coef);

// boundary point and theta-tangent at z = e^{i theta}
std::pair<Vec2, Vec2> boundary_eval(const PatchShape& shape, double theta);

// Shape-variation recovery: the unique (y, alpha) with
// f = dGamma . (z dGamma/dz) on S^1. alpha is returned as complex mode
// coefficients (index m, modes >= 3). Satisfies
// q_apply(r, ...) = diag(r^-1, r^-2) q_apply(1, ...) exactly.
struct QResult {
  Vec2 y;
  VecXc alpha;
  double a1dot;
};
QResult q_apply(double r, const VecXc& beta, const Fourier& f, int out_modes);

Fourier q_invert(double r, const VecXc& beta, const Vec2& y, const VecXc& alpha);

struct MobiusRecord {
  cplx alpha{1, 0};
  cplx c{0, 0};
  int iterations = 0;
};

// Recompose a raw conformal map (Taylor coefficients raw[m], m = 0..M) with a
// disk automorphism so the result has vanishing second derivative at 0 and a
// positive real first derivative.
std::pair<PatchShape, MobiusRecord> normalize_conformal(const VecXc& raw);

}  // namespace vp
