#pragma once

#include "kdvh/common.hpp"
#include "kdvh/hodograph.hpp"
#include "kdvh/painleve.hpp"
#include "kdvh/profile.hpp"
#include "kdvh/spectral.hpp"

#include <map>
#include <optional>
#include <vector>

namespace kdvh {

/// Scaling constants of the Painleve approximation near breakup:
///   a1 = 2/(8k)^(2/7), a2 = 1/(8k)^(1/7), a3 = C_m u_c^m,
///   a4 = 2 m C_m u_c^(m-1) / (8k)^(3/7).
struct UniversalityConstants {
  int m = 1;
  double Cm = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double k = 0.0, F4 = 0.0;
  double u_c = 0.0, x_c = 0.0, t_c = 0.0;
};

UniversalityConstants constants(const CatastrophePoint& cp);

/// A point of the (X, T) window mapped to physical (x, t) at a given eps,
/// with the coefficients c1, c2, c3 of the eps^(4/7) correction.
struct WindowSample {
  double X = 0.0, T = 0.0;
  double x = 0.0, t = 0.0;
  double eps = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

WindowSample window_map(double X, double T, double eps, const UniversalityConstants& c);

/// The pre-limit double-scaling ratios at (x, t): returns (X, T).
std::pair<double, double> scaling_coordinates(double x, double t, double eps,
                                              const UniversalityConstants& c);

enum class PredictionOrder { Leading, Corrected };

/// u_c + a1 eps^(2/7) U, plus for Corrected the eps^(4/7) terms
///   c1 (Q U_X + U_XX + 4U^2 - 3 c2 U_T) + c3 (2 U_X Q_T + 4 U U_T + U_XXT / 2).
/// Throws OutOfWindow when |X| > 0.8 L of the Painleve grid.
double predict(const WindowSample& ws, const PainleveField& pf, const UniversalityConstants& c,
               PredictionOrder order);

/// Least-squares slope of log(err) against log(eps). Needs two or more
/// positive errors.
std::optional<double> loglog_slope(const std::vector<double>& eps, const std::vector<double>& err);

struct StudyOptions {
  double Lx = 30.0;
  int N = 32768;
  EvolveOptions evolve;
  PainleveOptions painleve;
  bool prebreakup = true;              // also measure the pre-breakup error
  double prebreakup_dx = -0.5;         // x = x_c + prebreakup_dx
  double prebreakup_time_fraction = 0.7;  // t = fraction * t_c
  int jobs = 1;
};

struct StudySample {
  double X = 0.0, T = 0.0, x = 0.0, t = 0.0;
  double u_num = 0.0, u_lead = 0.0, u_corr = 0.0;
};

struct EpsilonResult {
  double eps = 0.0;
  std::vector<StudySample> samples;
  double E_lead = 0.0;
  double E_corr = 0.0;
  double prebreakup_u_num = 0.0;
  double prebreakup_u_hodograph = 0.0;
  double prebreakup_error = 0.0;
  int steps = 0;
  double mass_drift = 0.0;
  double h0_drift = 0.0;
  double tail_ratio = 0.0;
};

struct ScalingReport {
  int m = 1;
  std::string profile;
  CatastrophePoint catastrophe;
  UniversalityConstants constants;
  std::vector<EpsilonResult> results;
  std::optional<double> slope_lead;
  std::optional<double> slope_corr;
  std::optional<double> slope_prebreakup;
  std::map<double, double> painleve_residuals;  // T -> ODE residual
};

/// Evolves the flow for each eps of the ladder, samples u at the mapped window
/// points and fits the error slopes.
ScalingReport scaling_study(const InitialProfile& p, int m, const std::vector<double>& eps_ladder,
                            const std::vector<double>& X_grid, const std::vector<double>& T_values,
                            const StudyOptions& opts = {});

struct PrebreakupResult {
  std::vector<double> eps;
  std::vector<double> error;
  std::optional<double> slope;
  double x = 0.0, t = 0.0, u_hodograph = 0.0;
};

/// |u_eps - u_hodograph| at a fixed pre-breakup point over an eps ladder.
PrebreakupResult prebreakup_study(const InitialProfile& p, int m, const std::vector<double>& eps_ladder,
                              double x, double t, const StudyOptions& opts = {});

}  // namespace kdvh
