#include "kdvh/universality.hpp"

#include "kdvh/hierarchy.hpp"
#include "kdvh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace kdvh {

UniversalityConstants constants(const CatastrophePoint& cp) {
  if (!(cp.k > 0.0)) throw DomainError("universality constants need k > 0");
  UniversalityConstants c;
  c.m = cp.m;
  c.Cm = coefficient(cp.m);
  c.k = cp.k;
  c.F4 = cp.F4;
  c.u_c = cp.u_c;
  c.x_c = cp.x_c;
  c.t_c = cp.t_c;
  const double eight_k = 8.0 * cp.k;
  c.a1 = 2.0 / std::pow(eight_k, 2.0 / 7.0);
  c.a2 = 1.0 / std::pow(eight_k, 1.0 / 7.0);
  c.a3 = c.Cm * std::pow(cp.u_c, cp.m);
  c.a4 = 2.0 * cp.m * c.Cm * std::pow(cp.u_c, cp.m - 1) / std::pow(eight_k, 3.0 / 7.0);
  return c;
}

WindowSample window_map(double X, double T, double eps, const UniversalityConstants& c) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double eight_k = 8.0 * c.k;
  const double e47 = std::pow(eps, 4.0 / 7.0);
  const double e67 = std::pow(eps, 6.0 / 7.0);
  const double time_scale = 2.0 * c.m * c.Cm * std::pow(c.u_c, c.m - 1);

  WindowSample ws;
  ws.X = X;
  ws.T = T;
  ws.eps = eps;
  ws.t = c.t_c + std::pow(eight_k, 3.0 / 7.0) * e47 * T / time_scale;
  ws.x = c.x_c + c.a3 * (ws.t - c.t_c) + std::pow(eight_k, 1.0 / 7.0) * e67 * X;
  ws.c1 = 32.0 * c.F4 / (63.0 * std::pow(eight_k, 11.0 / 7.0));
  ws.c2 = X;
  ws.c3 = (c.m * c.Cm * std::pow(c.u_c, c.m - 1) * (ws.t - c.t_c) / (4.0 * c.k * e47)) *
          (2.0 * (c.m - 1) / (5.0 * c.u_c) + 2.0 * c.F4 / (21.0 * c.k));
  return ws;
}

std::pair<double, double> scaling_coordinates(double x, double t, double eps,
                                              const UniversalityConstants& c) {
  const double eight_k = 8.0 * c.k;
  const double X = (x - c.x_c - c.a3 * (t - c.t_c)) /
                   (std::pow(eight_k, 1.0 / 7.0) * std::pow(eps, 6.0 / 7.0));
  const double T = 2.0 * c.m * c.Cm * std::pow(c.u_c, c.m - 1) * (t - c.t_c) /
                   (std::pow(eight_k, 3.0 / 7.0) * std::pow(eps, 4.0 / 7.0));
  return {X, T};
}

double predict(const WindowSample& ws, const PainleveField& pf, const UniversalityConstants& c,
               PredictionOrder order) {
  if (std::abs(ws.X) > 0.8 * pf.L) {
    throw OutOfWindow("X outside the boundary-free part of the Painleve grid");
  }
  if (std::abs(ws.T - pf.T) > 1e-12) {
    throw DomainError("Painleve field solved at a different T than the window sample");
  }
  const double U = pf.interpolate(pf.U, ws.X);
  double u = c.u_c + c.a1 * std::pow(ws.eps, 2.0 / 7.0) * U;
  if (order == PredictionOrder::Leading) return u;

  const double UX = pf.interpolate(pf.U_X, ws.X);
  const double UXX = pf.interpolate(pf.U_XX, ws.X);
  const double UT = pf.interpolate(pf.U_T, ws.X);
  const double UXXT = pf.interpolate(pf.U_XXT, ws.X);
  const double Q = pf.interpolate(pf.Q, ws.X);
  const double QT = pf.interpolate(pf.Q_T, ws.X);
  const double e47 = std::pow(ws.eps, 4.0 / 7.0);
  u += ws.c1 * e47 * (Q * UX + UXX + 4.0 * U * U - 3.0 * ws.c2 * UT);
  u += ws.c3 * e47 * (2.0 * UX * QT + 4.0 * U * UT + 0.5 * UXXT);
  return u;
}

std::optional<double> loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size() && i < err.size(); ++i) {
    if (eps[i] > 0.0 && err[i] > 0.0) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

namespace {

// Evolves once through the sorted distinct times and hands each snapshot to
// the visitor.
template <typename Visit>
EvolveStats evolve_through(const InitialProfile& p, int m, double eps, const StudyOptions& opts,
                           const std::set<double>& times, Visit&& visit) {
  SpectralState s = init_state(p, eps, m, opts.Lx, opts.N);
  EvolveStats total;
  for (double t : times) {
    EvolveStats st;
    s = evolve(s, t, opts.evolve, &st);
    total.steps += st.steps;
    total.tail_ratio = std::max(total.tail_ratio, st.tail_ratio);
    visit(t, s);
  }
  const Conserved c0 = conserved(init_state(p, eps, m, opts.Lx, opts.N).u, s.dx());
  const Conserved c1 = conserved(s.u, s.dx());
  total.mass_drift = std::abs(c1.mass - c0.mass) / std::abs(c0.mass);
  total.h0_drift = std::abs(c1.h0 - c0.h0) / std::abs(c0.h0);
  return total;
}

}  // namespace

ScalingReport scaling_study(const InitialProfile& p, int m, const std::vector<double>& eps_ladder,
                            const std::vector<double>& X_grid, const std::vector<double>& T_values,
                            const StudyOptions& opts) {
  require_evolvable(m);
  if (eps_ladder.empty()) throw ConfigError("eps ladder is empty");
  ScalingReport report;
  report.m = m;
  report.profile = p.name();
  report.catastrophe = catastrophe(p, m);
  report.constants = constants(report.catastrophe);
  const auto& c = report.constants;

  // One Painleve solve per distinct T along a shared continuation path.
  std::vector<double> Ts(T_values);
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
  PainleveContinuation path(opts.painleve);
  std::map<double, PainleveField> fields;
  for (double T : Ts) {
    fields.emplace(T, path.solve(T));
    report.painleve_residuals[T] = fields.at(T).newton_residual;
  }

  const double t1 = opts.prebreakup_time_fraction * c.t_c;
  const double x1 = c.x_c + opts.prebreakup_dx;
  const double u1_hodo = opts.prebreakup ? solve_u(x1, t1, p, m).u : 0.0;

  report.results.resize(eps_ladder.size());
  auto job = [&](int i) {
    const double eps = eps_ladder[i];
    EpsilonResult& r = report.results[i];
    r.eps = eps;
    std::set<double> times;
    std::map<double, std::vector<WindowSample>> by_time;
    for (double T : Ts) {
      for (double X : X_grid) {
        const WindowSample ws = window_map(X, T, eps, c);
        by_time[ws.t].push_back(ws);
        times.insert(ws.t);
      }
    }
    if (opts.prebreakup) times.insert(t1);

    const EvolveStats st = evolve_through(p, m, eps, opts, times, [&](double t, const SpectralState& s) {
      const SpectralSampler u_at(s);
      if (opts.prebreakup && t == t1) {
        r.prebreakup_u_num = u_at(x1);
        r.prebreakup_u_hodograph = u1_hodo;
        r.prebreakup_error = std::abs(r.prebreakup_u_num - u1_hodo);
      }
      auto it = by_time.find(t);
      if (it == by_time.end()) return;
      for (const WindowSample& ws : it->second) {
        const PainleveField& pf = fields.at(ws.T);
        StudySample smp{ws.X, ws.T, ws.x, ws.t, u_at(ws.x), predict(ws, pf, c, PredictionOrder::Leading),
                        predict(ws, pf, c, PredictionOrder::Corrected)};
        r.E_lead = std::max(r.E_lead, std::abs(smp.u_num - smp.u_lead));
        r.E_corr = std::max(r.E_corr, std::abs(smp.u_num - smp.u_corr));
        r.samples.push_back(smp);
      }
    });
    // Deterministic sample order regardless of the time grouping.
    std::sort(r.samples.begin(), r.samples.end(), [](const StudySample& a, const StudySample& b) {
      return a.T != b.T ? a.T < b.T : a.X < b.X;
    });
    r.steps = st.steps;
    r.mass_drift = st.mass_drift;
    r.h0_drift = st.h0_drift;
    r.tail_ratio = st.tail_ratio;
  };
  rethrow_first(parallel_for(static_cast<int>(eps_ladder.size()), opts.jobs, job));

  std::vector<double> eps, lead, corr, pre;
  for (const auto& r : report.results) {
    eps.push_back(r.eps);
    lead.push_back(r.E_lead);
    corr.push_back(r.E_corr);
    pre.push_back(r.prebreakup_error);
  }
  report.slope_lead = loglog_slope(eps, lead);
  report.slope_corr = loglog_slope(eps, corr);
  if (opts.prebreakup) report.slope_prebreakup = loglog_slope(eps, pre);
  return report;
}

PrebreakupResult prebreakup_study(const InitialProfile& p, int m, const std::vector<double>& eps_ladder,
                              double x, double t, const StudyOptions& opts) {
  require_evolvable(m);
  PrebreakupResult out;
  out.x = x;
  out.t = t;
  out.u_hodograph = solve_u(x, t, p, m).u;
  out.eps = eps_ladder;
  out.error.assign(eps_ladder.size(), 0.0);
  auto job = [&](int i) {
    evolve_through(p, m, eps_ladder[i], opts, {t}, [&](double, const SpectralState& s) {
      out.error[i] = std::abs(sample(s, x) - out.u_hodograph);
    });
  };
  rethrow_first(parallel_for(static_cast<int>(eps_ladder.size()), opts.jobs, job));
  out.slope = loglog_slope(out.eps, out.error);
  return out;
}

}  // namespace kdvh
