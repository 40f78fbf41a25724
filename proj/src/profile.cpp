#include "kdvh/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kdvh {

const char* to_string(Branch side) { return side == Branch::Left ? "left" : "right"; }

InitialProfile::InitialProfile(std::string name, DerivativeMap derivatives,
                               double x_min, Metadata meta)
    : name_(std::move(name)),
      derivatives_(std::move(derivatives)),
      x_min_(x_min),
      meta_(meta) {}

InitialProfile InitialProfile::sech2() {
  auto d = [](double x, int order) {
    const double s = 1.0 / std::cosh(x);
    const double s2 = s * s;
    const double t = std::tanh(x);
    switch (order) {
      case 0: return -s2;
      case 1: return 2.0 * s2 * t;
      case 2: return 6.0 * s2 * s2 - 4.0 * s2;
      case 3: return t * (8.0 * s2 - 24.0 * s2 * s2);
      case 4: return -16.0 * s2 + 120.0 * s2 * s2 - 120.0 * s2 * s2 * s2;
      default: throw DomainError("profile derivative order must be in 0..4");
    }
  };
  return InitialProfile("sech2", d, 0.0, Metadata{1.0, 1.0, 0.25, 0.5});
}

InitialProfile InitialProfile::gaussian() {
  // d^n/dx^n exp(-x^2) = (-1)^n H_n(x) exp(-x^2), physicists' Hermite H_n.
  auto d = [](double x, int order) {
    const double e = std::exp(-x * x);
    const double x2 = x * x;
    switch (order) {
      case 0: return -e;
      case 1: return 2.0 * x * e;
      case 2: return (2.0 - 4.0 * x2) * e;
      case 3: return (8.0 * x2 * x - 12.0 * x) * e;
      case 4: return -(16.0 * x2 * x2 - 48.0 * x2 + 12.0) * e;
      default: throw DomainError("profile derivative order must be in 0..4");
    }
  };
  return InitialProfile("gaussian", d, 0.0, Metadata{1.0, 1.0, 0.25, 0.5});
}

InitialProfile InitialProfile::by_name(const std::string& name) {
  if (name == "sech2") return sech2();
  if (name == "gaussian") return gaussian();
  throw ConfigError("unknown profile '" + name + "' (expected sech2 or gaussian)");
}

double eval_profile(const InitialProfile& p, double x, int order) {
  if (order < 0 || order > 4) throw DomainError("profile derivative order must be in 0..4");
  return p(x, order);
}

namespace {

void check_clamped(double u, const InversionOptions& opts) {
  if (!(u > -1.0 + opts.clamp && u < -opts.clamp)) {
    std::ostringstream msg;
    msg << "u = " << u << " outside the clamped branch domain (" << -1.0 + opts.clamp
        << ", " << -opts.clamp << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double invert_branch(const InitialProfile& p, Branch side, double u,
                     const InversionOptions& opts) {
  check_clamped(u, opts);
  const double dir = side == Branch::Left ? -1.0 : 1.0;
  const double xm = p.x_min();

  // Bracket [near, far] along the branch: u0(near) <= u < u0(far).
  double width = 1.0;
  while (p(xm + dir * width) <= u) {
    width *= 2.0;
    if (width > 1e8) throw NoConvergence("could not bracket the branch preimage");
  }
  double near = xm;
  double far = xm + dir * width;

  auto g = [&](double x) { return p(x) - u; };  // negative near, positive far
  while (std::abs(far - near) > opts.bisect_width) {
    const double mid = 0.5 * (near + far);
    (g(mid) <= 0.0 ? near : far) = mid;
  }

  double x = 0.5 * (near + far);
  for (int it = 0; it < opts.max_iterations; ++it) {
    // Iterate to convergence in x, not just in u: on flat tails a small
    // u-residual still hides a large preimage error.
    const double r = g(x);
    if (r == 0.0) return x;
    (r <= 0.0 ? near : far) = x;
    const double slope = p(x, 1);
    double next = slope != 0.0 ? x - r / slope : 0.5 * (near + far);
    if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)) &&
        std::abs(r) <= opts.residual_tol) {
      return next;
    }
    const double lo = std::min(near, far);
    const double hi = std::max(near, far);
    if (!(next > lo && next < hi)) next = 0.5 * (near + far);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      break;
    }
    x = next;
  }
  if (std::abs(g(x)) > opts.residual_tol) {
    std::ostringstream msg;
    msg << "branch inversion stalled at u = " << u << " (residual " << g(x)
        << "); is the profile monotone on the " << to_string(side) << " branch?";
    throw NoConvergence(msg.str());
  }
  return x;
}

std::vector<double> branch_derivatives(const InitialProfile& p, Branch side,
                                       double u, int max_order,
                                       const InversionOptions& opts) {
  if (max_order < 1 || max_order > 4) throw DomainError("max_order must be in 1..4");
  const double x = invert_branch(p, side, u, opts);
  const double g1 = p(x, 1);
  if (std::abs(g1) < 1e-10) {
    throw SingularDerivative("u0'(f(u)) vanishes; inverse derivatives blow up near the minimum");
  }
  const double g2 = p(x, 2);
  const double g3 = max_order >= 3 ? p(x, 3) : 0.0;
  const double g4 = max_order >= 4 ? p(x, 4) : 0.0;

  const double inv1 = 1.0 / g1;
  const double inv3 = inv1 * inv1 * inv1;
  const double inv5 = inv3 * inv1 * inv1;
  std::vector<double> out;
  out.reserve(max_order);
  out.push_back(inv1);
  if (max_order >= 2) out.push_back(-g2 * inv3);
  if (max_order >= 3) out.push_back((3.0 * g2 * g2 - g1 * g3) * inv5);
  if (max_order >= 4) {
    out.push_back((10.0 * g1 * g2 * g3 - g1 * g1 * g4 - 15.0 * g2 * g2 * g2) * inv5 * inv1 * inv1);
  }
  return out;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

AssumptionReport validate_assumptions(const InitialProfile& p, const ValidationGrid& grid) {
  AssumptionReport report;
  const double xm = p.x_min();
  auto add = [&](std::string name, double margin) {
    report.checks.push_back({std::move(name), margin > 0.0, margin});
  };

  const int n_side = static_cast<int>(std::ceil(grid.half_width / grid.step));
  double neg_margin = std::numeric_limits<double>::infinity();
  double left_margin = std::numeric_limits<double>::infinity();
  double right_margin = std::numeric_limits<double>::infinity();
  double prev_left = p(xm);
  double prev_right = prev_left;
  neg_margin = -prev_left;
  for (int i = 1; i <= n_side; ++i) {
    const double xl = xm - i * grid.step;
    const double xr = xm + i * grid.step;
    const double ul = p(xl);
    const double ur = p(xr);
    neg_margin = std::min({neg_margin, -ul, -ur});
    // Moving away from the minimum the values must strictly increase.
    left_margin = std::min(left_margin, ul - prev_left);
    right_margin = std::min(right_margin, ur - prev_right);
    prev_left = ul;
    prev_right = ur;
  }
  add("negative", neg_margin);
  add("normalized_minimum", 1e-12 - std::abs(p(xm) + 1.0));
  add("critical_point", 1e-10 - std::abs(p(xm, 1)));
  add("convex_minimum", p(xm, 2));
  add("decreasing_left", left_margin);
  add("increasing_right", right_margin);

  const double s = p.metadata().decay_exponent;
  const double bound = p.metadata().decay_constant;
  double worst = 0.0;
  for (int i = 0; i < grid.far_samples; ++i) {
    const double r = grid.far_start * (1.0 + 3.0 * i / std::max(1, grid.far_samples - 1));
    for (double x : {-r, r}) {
      worst = std::max(worst, std::abs(p(x)) * std::pow(std::abs(x), 3.0 + s));
    }
  }
  add("algebraic_decay", bound - worst);
  return report;
}

}  // namespace kdvh
