#pragma once

#include "kdvh/common.hpp"
#include "kdvh/fourier.hpp"
#include "kdvh/hierarchy.hpp"
#include "kdvh/profile.hpp"

#include <optional>
#include <vector>

namespace kdvh {

/// Snapshot of u(x, t) for the m-th flow on the periodic box [-Lx, Lx).
struct SpectralState {
  FlowParams flow;
  double Lx = 60.0;
  int N = 4096;
  double t = 0.0;
  Field u;

  double dx() const { return 2.0 * Lx / N; }
  Field x() const { return Field::LinSpaced(N, -Lx, Lx - dx()); }
};

/// Samples the profile at t = 0. Throws DomainTooSmall when |u0(+/-Lx)|
/// exceeds tail_tol, UnsupportedFlow for m outside 1..3.
SpectralState init_state(const InitialProfile& p, double eps, int m, double Lx, int N,
                         double tail_tol = 1e-14);

/// Wraps an arbitrary periodic field (used for exact-solution checks).
SpectralState init_state(Field u, FlowParams flow, double Lx);

struct EvolveOptions {
  std::optional<double> dt;        // fixed step; automatic when empty
  double c_cfl = 0.5;
  double c_disp = 0.1;
  double sentinel_tol = 1e-10;     // spectral tail / peak ratio allowed
  double blowup_factor = 10.0;
  bool record_dt = false;
};

struct EvolveStats {
  int steps = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double mass_drift = 0.0;  // relative change over the call
  double h0_drift = 0.0;
  double tail_ratio = 0.0;  // worst spectral sentinel value seen
  std::vector<double> dt_history;
};

/// Largest |u_k| over the top third of the retained (dealiased) band,
/// relative to the largest |u_k|.
double spectral_tail_ratio(const SpectralState& s);

/// Advances to t_target with an integrating factor for the leading linear
/// dispersion and classical RK4 for everything else; products are dealiased
/// with the two-thirds rule. The last step is shortened to land on t_target.
SpectralState evolve(const SpectralState& s, double t_target, const EvolveOptions& opts = {},
                     EvolveStats* stats = nullptr);

/// Time step chosen by the automatic controller for the current state.
double auto_time_step(const SpectralState& s, const FourierGrid& grid, const EvolveOptions& opts);

/// Band-limited interpolation of the state; precomputes the spectrum once.
class SpectralSampler {
 public:
  explicit SpectralSampler(const SpectralState& s);
  double operator()(double x) const;

 private:
  FourierGrid grid_;
  Spectrum uh_;
};

double sample(const SpectralState& s, double x);

}  // namespace kdvh
