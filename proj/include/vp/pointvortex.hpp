#pragma once

#include "vp/domain.hpp"

namespace vp {

struct VortexConfig {
  GreenEvaluator ev;
  VecX mu;      // strengths, all nonzero
  VecX X;       // 2N positions (x1,y1,...,xN,yN)
  double rho;   // separation margin

  int count() const { return static_cast<int>(mu.size()); }
  Vec2 pos(int j) const { return Vec2(X[2 * j], X[2 * j + 1]); }
  void validate() const;
};

struct CriticalPointReport {
  VecX X_star;
  double grad_norm = 0;
  MatX hessian;
  VecX hessian_eigs;
  bool nondegenerate = false;
  int definite = 0;  // +1 positive, -1 negative, 0 indefinite
  int iterations = 0;
};

// Kirchhoff-Routh Hamiltonian of the configuration and its derivatives.
double hamiltonian(const VortexConfig& cfg);
std::pair<VecX, MatX> grad_hessian(const VortexConfig& cfg);

// Robin-type self-interaction g(x) = (g~(x,x) + sum N^{lm} H_l H_m)/2 bundle.
Deriv2 robin_g(const GreenEvaluator& ev, const Vec2& x, int order);
// Full modified Green kernel bundle (log + regular + harmonic products).
RegEval g0_bundle(const GreenEvaluator& ev, const Vec2& x, const Vec2& y, int order);

struct CriticalOptions {
  int max_iter = 50;
  bool symmetric_axis = false;  // restrict the search to vortices on the x axis
  double nondeg_tol = 1e-8;
};

CriticalPointReport find_critical(const VortexConfig& cfg, const VecX& X0, double tol,
                                  const CriticalOptions& opts = {});

// 2N x 2N symplectic operator Lambda^{-1} J_N of the strengths.
MatX lambda_inv_J(const VecX& mu);

struct PvTrajectory {
  std::vector<double> t;
  std::vector<VecX> X;
  std::vector<double> H;
};

// Implicit-midpoint integration of dX/dt = Lambda^{-1} J_N grad H.
PvTrajectory integrate_pv(const VortexConfig& cfg, const VecX& X0, double T, double dt);

}  // namespace vp
