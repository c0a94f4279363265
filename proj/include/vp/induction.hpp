#pragma once

#include <optional>

#include "vp/patchgeom.hpp"
#include "vp/pointvortex.hpp"

namespace vp {

// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre01(int n, VecX& nodes, VecX& weights);

struct SystemOptions {
  int ntheta = 0;  // boundary nodes per patch; 0 -> 4*(M+2)
  int nrad = 16;   // radial Gauss nodes
  bool check_quadrature = false;
  double min_gap = 1e-12;
};

// An N-patch configuration with cached boundary and interior quadrature data.
struct PatchSystem {
  GreenEvaluator ev;
  VecX mu;
  std::vector<PatchShape> shapes;
  SystemOptions opts;

  std::shared_ptr<Grid> grid;  // shared boundary grid (size ntheta)
  // per patch, boundary nodes: position, z dG/dz (normal direction times |dG|)
  std::vector<VecXc> gb, zdg;
  // per patch, interior tensor nodes: physical position and mu-weighted
  // quadrature weights (sum w_mu = mu_j)
  std::vector<VecXc> gq;
  std::vector<VecX> w_mu;
  // optional non-uniform vorticity density at the interior nodes (relative
  // profile; rescaled internally so each patch integrates to mu_j)
  std::vector<VecX> density;

  int count() const { return static_cast<int>(shapes.size()); }
};

PatchSystem make_patch_system(GreenEvaluator ev, VecX mu, std::vector<PatchShape> shapes,
                              SystemOptions opts = {},
                              std::vector<VecX> density = {});

// Self-interaction machinery at unit scale; D1 is the image of the unit disk
// under a1 (z + sum c_m z^m).
//   self_log_potential:  W(8_i) = integral over D1 of log|g(e^{i8_i}) - y| dA
//   self_log_gradient:   grad_x W at the boundary nodes (complex)
VecX self_log_potential(const VecXc& beta, const Grid& grid);
VecXc self_log_gradient(const VecXc& beta, const Grid& grid);

// h(beta): theta-derivative of the boundary restriction of the unit-strength
// self potential, independent of the patch radius; mean-zero.
Fourier self_stream_h(const VecXc& beta, int ntheta, bool check = false);

// Closed-form derivative of h at the circle: maps shape mode m >= 3 with
// coefficient pairs onto output mode m-1.
Fourier dh0_apply(const Fourier& alpha);

// phi_j = d/d8 [Psi o Gamma_j] as Fourier series (modes up to K),
// assembled from the full-gradient evaluation on the boundary grid.
std::vector<Fourier> stream_on_boundary(const PatchSystem& sys, int K = 0);

// grad Psi at the boundary nodes of every patch (complex g1 + i g2).
std::vector<VecXc> boundary_stream_gradient(const PatchSystem& sys);

// Psi values at the boundary nodes (for steadiness verification).
std::vector<VecX> boundary_stream_values(const PatchSystem& sys);

std::vector<Vec2> velocity_field(const PatchSystem& sys, const std::vector<Vec2>& points);

double patch_energy(const PatchSystem& sys);

}  // namespace vp
