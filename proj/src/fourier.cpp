#include "vp/fourier.hpp"

#include <atomic>
#include <cmath>

namespace vp {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SingularBoundary: return "SingularBoundary";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::ExteriorPoint: return "ExteriorPoint";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CollidingVortices: return "CollidingVortices";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::CollisionDetected: return "CollisionDetected";
    case ErrorCode::NewtonSubstepFailure: return "NewtonSubstepFailure";
    case ErrorCode::NonConformal: return "NonConformal";
    case ErrorCode::NotNearCircle: return "NotNearCircle";
    case ErrorCode::MeanNotZero: return "MeanNotZero";
    case ErrorCode::NonUniqueness: return "NonUniqueness";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::PatchOverlap: return "PatchOverlap";
    case ErrorCode::OnInterface: return "OnInterface";
    case ErrorCode::DegenerateCritical: return "DegenerateCritical";
    case ErrorCode::NotSteady: return "NotSteady";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigSolverFailure: return "EigSolverFailure";
    case ErrorCode::FixedPointDiverged: return "FixedPointDiverged";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::PatchCollision: return "PatchCollision";
    case ErrorCode::NoSolutionInWindow: return "NoSolutionInWindow";
    case ErrorCode::DegenerateLinearization: return "DegenerateLinearization";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::ProfileIncompatible: return "ProfileIncompatible";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "UnknownError";
}

static int g_threads = 0;

int default_thread_count() {
  if (g_threads > 0) return g_threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void set_default_thread_count(int n) { g_threads = n; }

void parallel_for(int n, const std::function<void(int)>& fn, int threads) {
  if (threads <= 0) threads = default_thread_count();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

double Fourier::eval(double theta) const {
  double v = a0;
  for (int k = 1; k <= modes(); ++k)
    v += A[k - 1] * std::cos(k * theta) + B[k - 1] * std::sin(k * theta);
  return v;
}

Fourier Fourier::derivative() const {
  Fourier d(modes());
  for (int k = 1; k <= modes(); ++k) d.set(k, k * B[k - 1], -k * A[k - 1]);
  return d;
}

Fourier Fourier::antiderivative() const {
  Fourier p(modes());
  for (int k = 1; k <= modes(); ++k) p.set(k, -B[k - 1] / k, A[k - 1] / k);
  return p;
}

double Fourier::l2norm() const {
  double s = two_pi * a0 * a0;
  for (int k = 1; k <= modes(); ++k)
    s += pi * (A[k - 1] * A[k - 1] + B[k - 1] * B[k - 1]);
  return std::sqrt(s);
}

double Fourier::max_abs(int nsamp) const {
  double m = 0.0;
  for (int i = 0; i < nsamp; ++i) m = std::max(m, std::abs(eval(two_pi * i / nsamp)));
  return m;
}

Fourier& Fourier::operator+=(const Fourier& o) {
  if (o.modes() > modes()) {
    VecX A2 = VecX::Zero(o.modes()), B2 = VecX::Zero(o.modes());
    A2.head(modes()) = A;
    B2.head(modes()) = B;
    A = A2;
    B = B2;
  }
  a0 += o.a0;
  A.head(o.modes()) += o.A;
  B.head(o.modes()) += o.B;
  return *this;
}

Fourier& Fourier::operator*=(double s) {
  a0 *= s;
  A *= s;
  B *= s;
  return *this;
}

Grid::Grid(int n) : n_(n), theta_(n) {
  int kmax = n_ / 2;
  cos_tab_.resize(kmax + 1, n_);
  sin_tab_.resize(kmax + 1, n_);
  for (int i = 0; i < n_; ++i) {
    theta_[i] = two_pi * i / n_;
    for (int k = 0; k <= kmax; ++k) {
      cos_tab_(k, i) = std::cos(k * theta_[i]);
      sin_tab_(k, i) = std::sin(k * theta_[i]);
    }
  }
}

Fourier Grid::to_fourier(const VecX& samples, int K) const {
  require(static_cast<int>(samples.size()) == n_, ErrorCode::DimensionMismatch,
          "sample count does not match grid");
  require(2 * K < n_, ErrorCode::DimensionMismatch, "grid too coarse for requested modes");
  Fourier f(K);
  f.a0 = samples.sum() / n_;
  for (int k = 1; k <= K; ++k) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n_; ++i) {
      a += cos_tab_(k, i) * samples[i];
      b += sin_tab_(k, i) * samples[i];
    }
    f.set(k, 2.0 * a / n_, 2.0 * b / n_);
  }
  return f;
}

VecX Grid::to_samples(const Fourier& f) const {
  require(2 * f.modes() < n_, ErrorCode::DimensionMismatch, "grid too coarse for series");
  VecX s = VecX::Constant(n_, f.a0);
  for (int k = 1; k <= f.modes(); ++k)
    for (int i = 0; i < n_; ++i)
      s[i] += f.A[k - 1] * cos_tab_(k, i) + f.B[k - 1] * sin_tab_(k, i);
  return s;
}

const MatX& Grid::log_weights() const {
  std::call_once(logw_once_, [this] {
    // Fourier-diagonal rule: log(4 sin^2(t/2)) = -2 sum_{k>=1} cos(kt)/k, with
    // the Nyquist mode halved so the rule stays exact through degree n/2.
    int half = n_ / 2;
    VecX rho(n_);
    for (int d = 0; d < n_; ++d) {
      double t = two_pi * d / n_;
      double s = 0.0;
      for (int k = 1; k < half; ++k) s += std::cos(k * t) / k;
      s += std::cos(half * t) / n_;  // = (1/2)*(1/half) at the Nyquist mode
      rho[d] = -(4.0 * pi / n_) * s;
    }
    logw_.resize(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) logw_(i, j) = rho[(i - j + n_) % n_];
  });
  return logw_;
}

}  // namespace vp
