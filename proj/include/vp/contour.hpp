#pragma once

#include "vp/steady.hpp"

namespace vp {

struct PatchTangent {
  VecX Xdot;                // 2N center velocities
  std::vector<VecXc> bdot;  // actual shape-coefficient velocities (modes >= 3)
};

// Boundary dynamics: (x_j, beta_j)' recovered from the tangential stream
// derivative through the shape-variation isomorphism.
PatchTangent contour_rhs(const PatchSystem& sys);

enum class Scheme { Rk4, ImplicitMidpoint };

struct EvolveOptions {
  Scheme scheme = Scheme::Rk4;
  SystemOptions quad;
  int save_stride = 1;
  int energy_stride = 0;  // 0: energy only at saved snapshots' stride * 8
  double dt_safety = 1.2; // allowed slack over the Kelvin resolution bound
};

struct Trajectory {
  std::vector<double> t;
  std::vector<VecX> X;
  std::vector<std::vector<VecXc>> beta;  // actual coefficients
  std::vector<double> Ep;                // sampled on the energy stride
  std::vector<double> Ep_t;
  std::vector<VecX> area_drift;          // per patch |area - pi r^2| at snapshots
  std::vector<double> angular_impulse;   // sum_j int |x|^2 w_j dmu
};

Trajectory evolve(const GreenEvaluator& ev, const VecX& mu, const std::vector<PatchShape>& init,
                  double T, double dt, const EvolveOptions& opts = {});

}  // namespace vp
