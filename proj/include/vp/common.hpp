#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace vp {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

enum class ErrorCode {
  SingularBoundary,
  IllConditioned,
  CoincidentPoints,
  ExteriorPoint,
  IndexOutOfRange,
  CollidingVortices,
  NoConvergence,
  LeftDomain,
  CollisionDetected,
  NewtonSubstepFailure,
  NonConformal,
  NotNearCircle,
  MeanNotZero,
  NonUniqueness,
  QuadratureNotConverged,
  PatchOverlap,
  OnInterface,
  DegenerateCritical,
  NotSteady,
  DimensionMismatch,
  EigSolverFailure,
  FixedPointDiverged,
  NotPositive,
  StepTooLarge,
  PatchCollision,
  NoSolutionInWindow,
  DegenerateLinearization,
  NewtonDiverged,
  ProfileIncompatible,
  ConfigInvalid,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Runs fn(i) for i in [0, n). Each index writes to its own slot, so the
// result does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

int default_thread_count();
void set_default_thread_count(int n);

inline Vec2 to_vec(cplx z) { return Vec2(z.real(), z.imag()); }
inline cplx to_cplx(const Vec2& v) { return cplx(v.x(), v.y()); }

}  // namespace vp
