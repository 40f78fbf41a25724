#include "kdvh/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace kdvh {

SpectralState init_state(const InitialProfile& p, double eps, int m, double Lx, int N,
                         double tail_tol) {
  require_evolvable(m);
  const double tail = std::max(std::abs(p(-Lx)), std::abs(p(Lx)));
  if (!(tail <= tail_tol)) {
    std::ostringstream msg;
    msg << "|u0(+/-Lx)| = " << tail << " exceeds " << tail_tol << " for Lx = " << Lx
        << "; enlarge the periodic box";
    throw DomainTooSmall(msg.str());
  }
  SpectralState s;
  s.flow = FlowParams(m, eps);
  s.Lx = Lx;
  s.N = N;
  FourierGrid grid(Lx, N);  // validates N
  s.u = grid.x().unaryExpr([&](double x) { return p(x); });
  return s;
}

SpectralState init_state(Field u, FlowParams flow, double Lx) {
  require_evolvable(flow.m);
  SpectralState s;
  s.flow = flow;
  s.Lx = Lx;
  s.N = static_cast<int>(u.size());
  FourierGrid grid(Lx, s.N);
  s.u = std::move(u);
  return s;
}

namespace {

double tail_ratio(const Spectrum& uh, const FourierGrid& grid) {
  const Field mag = uh.abs();
  const double peak = mag.maxCoeff();
  if (peak == 0.0) return 0.0;
  const int cut = grid.dealias_cutoff();
  const int start = (2 * cut) / 3 + 1;
  return mag.segment(start, cut - start + 1).maxCoeff() / peak;
}

// Right-hand side of everything except the leading linear dispersion, in
// Fourier space.
class ExplicitTerms {
 public:
  ExplicitTerms(const FourierGrid& grid, const FlowParams& flow)
      : grid_(grid), flow_(flow), n_derivs_(2 * flow.m - 1) {}

  Spectrum operator()(const Spectrum& vh) const {
    Spectrum masked = vh;
    grid_.dealias(masked);
    for (int j = 0; j < n_derivs_; ++j) derivs_[j] = grid_.inverse(grid_.differentiate(masked, j));
    Spectrum gh = grid_.forward(explicit_flux(std::span<const Field>(derivs_.data(), n_derivs_),
                                              flow_.eps, flow_.m));
    grid_.dealias(gh);
    return grid_.differentiate(gh, 1);
  }

 private:
  const FourierGrid& grid_;
  FlowParams flow_;
  int n_derivs_;
  mutable std::array<Field, 5> derivs_;
};

}  // namespace

double spectral_tail_ratio(const SpectralState& s) {
  FourierGrid grid(s.Lx, s.N);
  return tail_ratio(grid.forward(s.u), grid);
}

double auto_time_step(const SpectralState& s, const FourierGrid& grid, const EvolveOptions& opts) {
  const int m = s.flow.m;
  const double cm = std::abs(coefficient(m));
  const double umax = s.u.abs().maxCoeff();
  const double dx = grid.dx();

  // Dispersionless speed bound m |C_m| max(1, |u|)^m; equals m |C_m| |u|^(m-1)
  // on the normalized range |u| <= 1 and stays conservative beyond it.
  const double speed = m * cm * std::pow(std::max(1.0, umax), m);
  double dt = opts.c_cfl * dx / speed;

  // Explicit dispersive terms e^(2j) B_j d_x^(2j+1), j < m, limit RK4 through
  // their largest retained eigenvalue. The constant 9 ~ (2 pi / 3)^3 makes the
  // j = 1 case read c_disp dx^3 / (e^2 B_1).
  const double e2 = s.flow.eps * s.flow.eps;
  const double kd = grid.k()[grid.dealias_cutoff()];
  double lambda = 0.0;
  if (m == 2) {
    lambda = e2 * 10.0 * umax * std::pow(kd, 3);
  } else if (m == 3) {
    lambda = e2 * 70.0 * umax * umax * std::pow(kd, 3) + e2 * e2 * 14.0 * umax * std::pow(kd, 5);
  }
  if (lambda > 0.0) dt = std::min(dt, opts.c_disp * 9.0 / lambda);
  return dt;
}

SpectralState evolve(const SpectralState& s, double t_target, const EvolveOptions& opts,
                     EvolveStats* stats) {
  if (t_target < s.t) throw DomainError("evolve requires t_target >= current time");
  require_evolvable(s.flow.m);
  const FourierGrid grid(s.Lx, s.N);
  const ExplicitTerms nonlinear(grid, s.flow);
  const Eigen::ArrayXcd symbol = leading_dispersion_symbol(grid.k(), s.flow.eps, s.flow.m);

  SpectralState out = s;
  Spectrum uh = grid.forward(s.u);
  const Conserved c0 = conserved(s.u, s.dx());
  const double u0max = s.u.abs().maxCoeff();

  EvolveStats st;
  st.dt_min = std::numeric_limits<double>::infinity();
  st.tail_ratio = tail_ratio(uh, grid);

  double cached_dt = -1.0;
  Eigen::ArrayXcd E, E2;
  while (out.t < t_target) {
    double dt = opts.dt ? *opts.dt : auto_time_step(out, grid, opts);
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    bool last = false;
    if (out.t + dt >= t_target - 1e-12 * std::max(1.0, std::abs(t_target))) {
      dt = t_target - out.t;
      last = true;
    }
    if (dt != cached_dt) {
      E = (symbol * (0.5 * dt)).exp();
      E2 = E.square();
      cached_dt = dt;
    }
    const Spectrum a = dt * nonlinear(uh);
    const Spectrum b = dt * nonlinear(E * (uh + 0.5 * a));
    const Spectrum c = dt * nonlinear(E * uh + 0.5 * b);
    const Spectrum d = dt * nonlinear(E2 * uh + E * c);
    uh = E2 * uh + (E2 * a + 2.0 * E * (b + c) + d) / 6.0;
    out.t = last ? t_target : out.t + dt;
    out.u = grid.inverse(uh);

    ++st.steps;
    st.dt_min = std::min(st.dt_min, dt);
    st.dt_max = std::max(st.dt_max, dt);
    if (opts.record_dt) st.dt_history.push_back(dt);

    const double umax = out.u.abs().maxCoeff();
    if (!std::isfinite(umax) || (u0max > 0.0 && umax > opts.blowup_factor * u0max)) {
      std::ostringstream msg;
      msg << "solution blew up at t = " << out.t << " (max|u| = " << umax
          << "); reduce the time step";
      throw Instability(msg.str());
    }
    const double tail = tail_ratio(uh, grid);
    st.tail_ratio = std::max(st.tail_ratio, tail);
    if (tail > opts.sentinel_tol) {
      std::ostringstream msg;
      msg << "spectral tail ratio " << tail << " exceeds " << opts.sentinel_tol << " at t = "
          << out.t << "; increase N";
      throw ResolutionLoss(msg.str());
    }
    if (last) break;
  }
  if (st.steps == 0) st.dt_min = 0.0;

  const Conserved c1 = conserved(out.u, out.dx());
  auto rel = [](double now, double then) {
    return then != 0.0 ? std::abs(now - then) / std::abs(then) : std::abs(now - then);
  };
  st.mass_drift = rel(c1.mass, c0.mass);
  st.h0_drift = rel(c1.h0, c0.h0);
  if (stats) *stats = std::move(st);
  return out;
}

SpectralSampler::SpectralSampler(const SpectralState& s)
    : grid_(s.Lx, s.N), uh_(grid_.forward(s.u)) {}

double SpectralSampler::operator()(double x) const {
  if (x < -grid_.half_width() || x >= grid_.half_width()) {
    throw DomainError("sample point outside the periodic box");
  }
  return grid_.interpolate(uh_, x);
}

double sample(const SpectralState& s, double x) { return SpectralSampler(s)(x); }

}  // namespace kdvh
