#pragma once

#include "vp/induction.hpp"

namespace vp {

// Scaled steadiness residual split into the center (mode-1) and shape
// (modes >= 2) components, per patch.
struct ResidualSplit {
  VecX y_part;                      // 2N: (cos, sin) mode-1 coefficients of F_j
  std::vector<Fourier> shape_part;  // modes >= 2 of F_j
  VecX radii;                       // scaling record
  double norm() const;
};

// F_j = phi_j(X, M_r beta, r) / r_j with the shape unknowns kept unscaled.
ResidualSplit residual_F(const GreenEvaluator& ev, const VecX& mu, const VecX& X,
                         const std::vector<VecXc>& beta, const VecX& radii,
                         const SystemOptions& opts = {});

struct ContinuationRecord {
  VecX radii;
  int newton_iters = 0;
  double residual_norm = 0;
  double beta_norm = 0;
};

struct SteadyState {
  GreenEvaluator ev;
  VecX mu;
  VecX radii;
  VecX X;                    // 2N centers
  std::vector<VecXc> beta;   // unscaled shape coefficients (actual = r_j beta_j)
  int M = 0;
  bool symmetric = false;
  double residual_norm = 0;
  VecX boundary_stream_osc;  // per patch max |Psi - mean| on the boundary
  double mode3_amplitude = 0;
  std::vector<ContinuationRecord> history;

  std::vector<PatchShape> shapes() const;  // with actual coefficients r_j beta_j
  PatchSystem system(SystemOptions opts = {}) const;
};

struct SteadyOptions {
  int M = 32;
  int max_newton = 25;
  bool symmetric_axis = false;  // restrict to x-axis-even configurations
  SystemOptions quad;
  double fd_step = 1e-6;
  double nondeg_tol = 1e-8;
};

// Newton continuation along a decreasing schedule of radii vectors, seeded at
// the critical configuration of the point-vortex energy reached from X0.
SteadyState solve_steady(const GreenEvaluator& ev, const VecX& mu,
                         const std::vector<VecX>& radii_schedule, const VecX& X0, double tol,
                         const SteadyOptions& opts = {});

struct VerifyReport {
  VecX stream_osc;    // per patch
  VecX area_error;    // per patch |area - pi r^2|
  VecX budget_error;  // per patch |sum w - mu|
  double residual_norm = 0;
  bool steady_ok = false, area_ok = false, budget_ok = false;
  double osc_tol = 1e-8, area_tol = 1e-10, budget_tol = 1e-12;
};

VerifyReport verify_steady(const SteadyState& state, double osc_tol = 1e-8);

}  // namespace vp
