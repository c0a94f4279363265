#pragma once

#include <memory>

#include "vp/fourier.hpp"

namespace vp {

enum class DomainKind { AnalyticDisk, AnalyticAnnulus, Bem };

struct DomainSpec {
  DomainKind kind = DomainKind::AnalyticDisk;
  double radius = 1.0;        // AnalyticDisk
  double inner_radius = 0.5;  // AnalyticAnnulus (outer radius is 1)
  // Bem: closed curves sampled at equispaced parameter values, curve 0 is the
  // exterior boundary.
  std::vector<std::vector<Vec2>> curves;
  VecX circulations;  // length = number of interior boundary components

  static DomainSpec disk(double radius) {
    DomainSpec s;
    s.kind = DomainKind::AnalyticDisk;
    s.radius = radius;
    s.circulations = VecX::Zero(0);
    return s;
  }
  static DomainSpec annulus(double inner_radius, double circ1 = 0.0) {
    DomainSpec s;
    s.kind = DomainKind::AnalyticAnnulus;
    s.inner_radius = inner_radius;
    s.circulations = VecX::Constant(1, circ1);
    return s;
  }
};

// Value / gradient / Hessian bundle for a function of one point.
struct Deriv2 {
  double v = 0;
  Vec2 g = Vec2::Zero();
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
};

// Same for a symmetric two-point kernel; Hxy(a,b) = d2/dx_a dy_b.
struct RegEval {
  double v = 0;
  Vec2 gx = Vec2::Zero(), gy = Vec2::Zero();
  Eigen::Matrix2d Hxx = Eigen::Matrix2d::Zero(), Hyy = Eigen::Matrix2d::Zero(),
                  Hxy = Eigen::Matrix2d::Zero();
};

namespace detail {
struct BemState;
}

// Source expansion of the regular part g~(x, .) for a fixed first argument.
// For analytic domains it forwards to closed forms; for Bem it holds the
// boundary densities solved for x so repeated y-evaluations are cheap.
class RegSource {
public:
  double value(const Vec2& y) const;
  Vec2 grad_x(const Vec2& y) const;  // gradient of g~ in the x slot
  Vec2 grad_y(const Vec2& y) const;

private:
  friend class GreenEvaluator;
  const class GreenEvaluator* ev_ = nullptr;
  Vec2 x_;
  int xorder_ = 0;
  MatX dens_;  // Bem: columns = densities for data, d/dx1 data, d/dx2 data
};

class GreenEvaluator {
public:
  static GreenEvaluator build(const DomainSpec& spec, int quadrature_order = 0);

  const DomainSpec& spec() const { return spec_; }
  int num_inner() const { return n_; }
  const MatX& circulation_matrix() const { return N_; }
  const MatX& circulation_matrix_inv() const { return Ninv_; }
  const VecX& circulation_coeffs() const { return c_; }  // c = N^{-1} C

  double green(const Vec2& x, const Vec2& y) const;
  double green_regular(const Vec2& x, const Vec2& y) const;
  double harmonic_measure(int j, const Vec2& x) const;  // 1 <= j <= n
  double g0(const Vec2& x, const Vec2& y) const;

  // Derivative bundles of the smooth pieces. order: 0 value, 1 grads, 2 hessians.
  RegEval reg_pair(const Vec2& x, const Vec2& y, int order) const;
  Deriv2 harm(int j, const Vec2& x, int order) const;

  RegSource reg_source(const Vec2& x, int xorder) const;

  bool contains(const Vec2& x, double margin = 0.0) const;
  double diameter() const;

private:
  friend class RegSource;
  DomainSpec spec_;
  int n_ = 0;
  MatX N_, Ninv_;
  VecX c_;
  std::shared_ptr<const detail::BemState> bem_;

  RegEval reg_pair_analytic(const Vec2& x, const Vec2& y, int order) const;
};

GreenEvaluator build_green_evaluator(const DomainSpec& spec, int quadrature_order = 0);

}  // namespace vp
