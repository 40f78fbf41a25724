#pragma once

#include "kdvh/common.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace kdvh {

using Spectrum = Eigen::ArrayXcd;

/// Uniform periodic grid on [-half_width, half_width) with real-to-complex
/// transforms over the half spectrum (n/2 + 1 modes).
///
/// Holds an FFT plan cache, so one instance must not be used from two
/// threads at once.
class FourierGrid {
 public:
  FourierGrid(double half_width, int n);

  int size() const noexcept { return n_; }
  int modes() const noexcept { return n_ / 2 + 1; }
  double half_width() const noexcept { return half_width_; }
  double dx() const noexcept { return dx_; }
  const Field& x() const noexcept { return x_; }
  const Field& k() const noexcept { return k_; }
  /// Highest index kept by the two-thirds rule.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  Spectrum forward(const Field& u) const;
  Field inverse(const Spectrum& uh) const;

  /// Multiplies by (ik)^order; the Nyquist mode is dropped for odd orders.
  Spectrum differentiate(const Spectrum& uh, int order) const;
  Field derivative(const Field& u, int order) const;

  void dealias(Spectrum& uh) const;

  /// Band-limited interpolant of the field with spectrum uh at an arbitrary x.
  double interpolate(const Spectrum& uh, double x) const;

 private:
  int n_;
  double half_width_;
  double dx_;
  Field x_;
  Field k_;
  mutable Eigen::FFT<double> fft_;
  mutable std::vector<double> real_buf_;
  mutable std::vector<std::complex<double>> cplx_buf_;
};

}  // namespace kdvh
