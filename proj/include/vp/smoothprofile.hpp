#pragma once

#include "vp/steady.hpp"

namespace vp {

struct ProfileParams {
  double lambda = 1.0;  // -f'(0)
  double kappa = 1.0;   // cubic coefficient, f(t) = -lambda t - kappa t^3
};

// Radial ground state of the semilinear problem on the unit disk.
struct ProfileSpec {
  ProfileParams params;
  VecX rho;  // positive Chebyshev nodes, rho[0] = 1
  VecX psi;  // samples of the (negative) radial solution
  double psi0 = 0;
  double ode_residual = 0;   // max-norm residual sampled off the grid
  double nondeg_margin = 0;  // min |eig| of the linearized operator over modes
  int modes_checked = 0;

  double f(double t) const { return -params.lambda * t - params.kappa * t * t * t; }
  double fp(double t) const { return -params.lambda - 3.0 * params.kappa * t * t; }
  double eval(double r) const;  // barycentric interpolation with even extension
};

ProfileSpec radial_ground_state(const ProfileParams& params, double guess_amplitude,
                                int n_r = 32, int max_modes = 32);

// psi-tilde on a Fourier x Chebyshev tensor grid of the unit disk.
struct DiskField {
  VecX rho;     // n_r positive radial nodes, rho[0] = 1
  VecX theta;   // n_t equispaced angles
  MatX values;  // n_r x n_t
  double residual = 0;  // max-norm collocation residual of the last solve

  double eval(cplx z) const;
};

DiskField solve_profile_on_disk(const ProfileSpec& profile, const VecXc& beta, int n_t = 16,
                                const DiskField* seed = nullptr);

// Self-interaction of the shape-distorted profile vorticity: the weighted
// Newtonian potential restricted to the boundary, theta-differentiated, at
// unit scale and unit mass.
Fourier self_stream_h_smooth(const ProfileSpec& profile, const VecXc& beta, int ntheta = 64);

// Spectrum lambda_{j,m} of the derivative of the smooth self-interaction at
// the circle: Dh(0)(a cos m8 + b sin m8) = sum m' l_{m'} (b cos - a sin),
// assembled mode by mode by finite differences. Index m runs 2..M.
VecX dh_profile_eigs(const ProfileSpec& profile, int M, double fd_eps = 1e-6);

struct SmoothSteady {
  SteadyState state;
  std::vector<DiskField> psi;   // per patch, on the patch reference disk
  VecX mass;                    // per patch integral of the vorticity
  VecX interior_osc;            // per patch oscillation of Psi - psi_j inside
  VecX boundary_vorticity_max;  // per patch max |omega| on the boundary ring
};

SmoothSteady solve_steady_smooth(const GreenEvaluator& ev, const VecX& mu,
                                 const std::vector<VecX>& radii_schedule, const VecX& X0,
                                 const ProfileSpec& profile, double tol,
                                 const SteadyOptions& opts = {});

}  // namespace vp
