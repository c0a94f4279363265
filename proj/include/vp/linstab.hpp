#pragma once

#include "vp/steady.hpp"

namespace vp {

// Index bookkeeping for the truncated basis R^{2N} + (modes k = 2..M per
// patch, cos/sin). Total dimension 2N + 2N(M-1).
struct ModeBasis {
  int N = 0, M = 0;
  int dim() const { return 2 * N + 2 * N * (M - 1); }
  int alpha_dim() const { return 2 * N * (M - 1); }
  int y_index(int j, int comp) const { return 2 * j + comp; }
  int alpha_index(int j, int k, int comp) const {
    return 2 * N + j * 2 * (M - 1) + 2 * (k - 2) + comp;
  }
  // diagonal of the per-patch radius scaling on the whole basis
  VecX mr_diag(const VecX& radii) const;
};

struct LinearizedSystem {
  ModeBasis basis;
  VecX mu, radii;
  MatX L;     // symmetric
  MatX Jmat;  // antisymmetric, exact
  MatX A;     // Jmat * L
  MatX B0;    // Lambda^{-1} J_N D2H at the steady centers
  MatX D2H;
};

LinearizedSystem assemble_L(const SteadyState& state, int M = 0,
                            double steady_tol = 1e-8);

// A = Jmat * L (the linearized boundary dynamics in the conjugated basis).
MatX assemble_A(const LinearizedSystem& sys);

struct SpectrumReport {
  VecXc eigenvalues;
  std::vector<int> cls;  // 0 slow, 1 fast
  double slow_dev = 0;         // matching distance of slow eigenvalues to eig(B0)
  double fast_min_abs = 0;
  double fast_real_rel = 0;    // max |Re l| / |l| over fast eigenvalues
  double pairing_defect = 0;   // closure defect under l -> -l (relative)
  double gap_ratio = 0;        // |l|_{2N+1} / |l|_{2N}
  int gap_position = 0;        // index of the largest relative gap near 2N
  std::string verdict;         // stable | strongly-stable | unstable-trichotomy | inconclusive
};

SpectrumReport spectrum_classify(const LinearizedSystem& sys, const VecX& radii);

struct InvariantSplit {
  MatX S0;  // alpha_dim x 2N
  MatX SY;  // 2N x alpha_dim
  double norm_S0 = 0;       // |M_r^{-1} S0|
  double norm_SY = 0;       // |SY M_r^{-1}|
  double invariance_S0 = 0; // residual of A-invariance of graph(S0)
  double invariance_SY = 0;
  int iterations = 0;
  double contraction = 0;   // ratio of successive fixed-point updates
};

InvariantSplit invariant_split(const LinearizedSystem& sys, const VecX& radii);

struct PositivityReport {
  double min_quadratic = 0;  // min <Lv,v> / |M_r^{-1} alpha|^2 over graph(SY)
  double delta = 0;
  bool positive = false;
};

PositivityReport positivity_on_ZY(const LinearizedSystem& sys, const MatX& SY);

// Conjugation between basis vectors (y, alpha) and raw tangents
// (X-dot, actual-shape-coefficient-dot); used by the consistency checks
// against the nonlinear boundary dynamics.
struct RawTangent {
  VecX Xdot;                  // 2N
  std::vector<VecXc> bdot;    // actual coefficient velocities
};
RawTangent conjugate_to_raw(const SteadyState& state, const ModeBasis& basis, const VecX& v);
VecX conjugate_from_raw(const SteadyState& state, const ModeBasis& basis, const RawTangent& t);

// dense matrix exponential through the complex eigendecomposition
MatX expm(const MatX& A, double t);

}  // namespace vp
