#pragma once

#include <mutex>

#include "vp/common.hpp"

namespace vp {

// Real trigonometric polynomial a0 + sum_{k=1}^K (A_k cos k8 + B_k sin k8).
struct Fourier {
  double a0 = 0.0;
  VecX A, B;  // index k-1 holds mode k

  Fourier() : A(0), B(0) {}
  explicit Fourier(int K) : A(VecX::Zero(K)), B(VecX::Zero(K)) {}

  int modes() const { return static_cast<int>(A.size()); }
  double cosc(int k) const { return (k >= 1 && k <= modes()) ? A[k - 1] : 0.0; }
  double sinc(int k) const { return (k >= 1 && k <= modes()) ? B[k - 1] : 0.0; }
  void set(int k, double a, double b) {
    A[k - 1] = a;
    B[k - 1] = b;
  }

  double eval(double theta) const;
  Fourier derivative() const;      // d/d8
  Fourier antiderivative() const;  // mean-zero primitive; requires a0 == 0
  double l2norm() const;           // sqrt(2*pi*a0^2 + pi*sum(A^2+B^2))
  double max_abs(int nsamp = 256) const;

  Fourier& operator+=(const Fourier& o);
  Fourier& operator*=(double s);
  friend Fourier operator*(double s, Fourier f) {
    f *= s;
    return f;
  }
};

// Equispaced periodic grid with cached transform tables.
class Grid {
public:
  explicit Grid(int n);

  int size() const { return n_; }
  double theta(int i) const { return two_pi * i / n_; }
  const VecX& thetas() const { return theta_; }
  double weight() const { return two_pi / n_; }  // trapezoid weight

  // Least-squares-exact trig interpolation transforms (n > 2K required).
  Fourier to_fourier(const VecX& samples, int K) const;
  VecX to_samples(const Fourier& f) const;

  // Kress-Martensen quadrature matrix R for the periodic log kernel:
  // integral of log(4 sin^2((8-8')/2)) g(8') d8'  ~=  sum_j R(i,j) g(8_j),
  // exact for trig polynomials of degree < n/2.
  const MatX& log_weights() const;

private:
  int n_;
  VecX theta_;
  MatX cos_tab_, sin_tab_;  // (k, i) entries cos(k 8_i), sin(k 8_i), k <= n/2
  mutable MatX logw_;
  mutable std::once_flag logw_once_;
};

}  // namespace vp
