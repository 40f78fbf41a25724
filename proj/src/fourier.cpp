#include "kdvh/fourier.hpp"

#include <cmath>
#include <numbers>

namespace kdvh {

FourierGrid::FourierGrid(double half_width, int n)
    : n_(n), half_width_(half_width), dx_(2.0 * half_width / n) {
  if (n < 4 || (n & (n - 1)) != 0) throw DomainError("Fourier grid size must be a power of two >= 4");
  if (!(half_width > 0.0)) throw DomainError("Fourier grid half width must be positive");
  x_ = Field::LinSpaced(n, -half_width, half_width - dx_);
  k_.resize(modes());
  const double k0 = std::numbers::pi / half_width;
  for (int j = 0; j < modes(); ++j) k_[j] = k0 * j;
  fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  real_buf_.resize(n);
  cplx_buf_.resize(modes());
}

Spectrum FourierGrid::forward(const Field& u) const {
  std::copy(u.data(), u.data() + n_, real_buf_.begin());
  fft_.fwd(cplx_buf_, real_buf_);
  return Eigen::Map<const Spectrum>(cplx_buf_.data(), modes());
}

Field FourierGrid::inverse(const Spectrum& uh) const {
  std::copy(uh.data(), uh.data() + modes(), cplx_buf_.begin());
  fft_.inv(real_buf_, cplx_buf_, n_);
  return Eigen::Map<const Field>(real_buf_.data(), n_);
}

Spectrum FourierGrid::differentiate(const Spectrum& uh, int order) const {
  if (order == 0) return uh;
  // (ik)^order = k^order * i^order
  static const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Spectrum out = uh * (k_.pow(order) * i_pow[order % 4]);
  if (order % 2 == 1) out[modes() - 1] = 0.0;
  return out;
}

Field FourierGrid::derivative(const Field& u, int order) const {
  return inverse(differentiate(forward(u), order));
}

void FourierGrid::dealias(Spectrum& uh) const {
  const int cut = dealias_cutoff();
  uh.tail(modes() - cut - 1).setZero();
}

double FourierGrid::interpolate(const Spectrum& uh, double x) const {
  const double k0 = std::numbers::pi / half_width_;
  const double phase = k0 * (x + half_width_);
  const std::complex<double> step(std::cos(phase), std::sin(phase));
  std::complex<double> rot = step;
  double sum = uh[0].real();
  const int nyq = modes() - 1;
  for (int j = 1; j < nyq; ++j) {
    sum += 2.0 * (uh[j] * rot).real();
    // Resynchronize periodically so the recurrence does not drift.
    if ((j & 63) == 63) {
      rot = std::polar(1.0, phase * (j + 1));
    } else {
      rot *= step;
    }
  }
  sum += (uh[nyq] * std::cos(phase * nyq)).real();
  return sum / n_;
}

}  // namespace kdvh
