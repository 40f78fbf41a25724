#include "kdvh/painleve.hpp"

#include "kdvh/finite_difference.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace kdvh {

namespace {

const double kSixTwoThirds = std::cbrt(36.0);

}  // namespace

double asymptotic_value(double X, double T) {
  if (X == 0.0) throw DomainError("far-field asymptotics are undefined at X = 0");
  const double a = std::abs(X);
  const double sign = X > 0.0 ? -1.0 : 1.0;
  return sign * (std::cbrt(6.0 * a) + kSixTwoThirds / 3.0 * T / std::cbrt(a));
}

double asymptotic_slope(double X, double T) {
  if (X == 0.0) throw DomainError("far-field asymptotics are undefined at X = 0");
  const double a = std::abs(X);
  // Even in X: the odd profile has a symmetric slope.
  return -std::cbrt(6.0) / (3.0 * std::cbrt(a * a)) +
         kSixTwoThirds * T / (9.0 * a * std::cbrt(a));
}

double PainleveField::interpolate(const Field& f, double at) const {
  const int n = size();
  const double s = (at + L) / h();
  int i0 = static_cast<int>(std::floor(s)) - 1;
  i0 = std::clamp(i0, 0, n - 4);
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) {
    double w = 1.0;
    for (int l = 0; l < 4; ++l) {
      if (l != j) w *= (s - (i0 + l)) / static_cast<double>(j - l);
    }
    sum += w * f[i0 + j];
  }
  return sum;
}

Field ode_residual(const PainleveField& f) {
  return f.X - f.T * f.U + f.U.cube() / 6.0 + (f.U_X.square() + 2.0 * f.U * f.U_XX) / 24.0 +
         f.U_XXXX / 240.0;
}

Field q_field(const PainleveField& f) {
  return f.U_X * f.U_XXX / 240.0 - f.U_XX.square() / 480.0 + f.X * f.U -
         0.5 * f.T * f.U.square() + f.U.square().square() / 24.0 + f.U * f.U_X.square() / 24.0;
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;

// Real root of U^3/6 - T0 U + X = 0, unique for T0 < 0, polished by one
// Newton step against the cancellation in Cardano's formula.
double cubic_root(double x, double T0) {
  const double p = -6.0 * T0;
  const double q = 6.0 * x;
  const double disc = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  const double a = std::cbrt(-0.5 * q + disc) + std::cbrt(-0.5 * q - disc);
  return a - (a * a * a / 6.0 - T0 * a + x) / (0.5 * a * a - T0);
}

// Smooth background A(X) with A^3/6 + A + X = 0 and its derivatives 0..4,
// from the Taylor coefficients of the implicit relation. The unknown is
// U - A, which stays O(1) where |U| grows like |X|^(1/3), so the h^-4
// stencil amplifies far less round-off.
std::array<Field, 5> background(const Field& X) {
  std::array<Field, 5> A;
  for (auto& a : A) a.resize(X.size());
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    std::array<double, 5> c{cubic_root(X[i], -1.0), 0.0, 0.0, 0.0, 0.0};
    const double g1 = 0.5 * c[0] * c[0] + 1.0;
    for (int j = 1; j <= 4; ++j) {
      // Coefficient j of A^3/6 without the c[j] contribution.
      double cube = 0.0;
      for (int a = 0; a <= j; ++a) {
        for (int b = 0; a + b <= j; ++b) {
          const int d = j - a - b;
          if (a == j || b == j || d == j) continue;
          cube += c[a] * c[b] * c[d];
        }
      }
      c[j] = ((j == 1 ? -1.0 : 0.0) - cube / 6.0) / g1;
    }
    double fact = 1.0;
    for (int j = 0; j <= 4; ++j) {
      if (j > 0) fact *= j;
      A[j][i] = fact * c[j];
    }
  }
  return A;
}

class Discretization {
 public:
  explicit Discretization(const PainleveOptions& opts)
      : opts_(opts),
        n_(opts.N),
        h_(2.0 * opts.L / (opts.N - 1)),
        X_(Field::LinSpaced(opts.N, -opts.L, opts.L)),
        d1_(derivative_matrix(n_, h_, 1, opts.fd_accuracy)),
        d2_(derivative_matrix(n_, h_, 2, opts.fd_accuracy)),
        d3_(derivative_matrix(n_, h_, 3, opts.fd_accuracy)),
        d4_(derivative_matrix(n_, h_, 4, opts.fd_accuracy)),
        A_(background(X_)) {
    if (opts.L < 10.0 || opts.N < 101) throw DomainError("P_I^2 grid too small");
  }

  const Field& X() const { return X_; }

  Field apply(const SparseMatrix& d, const Field& u) const { return (d * u.matrix()).array(); }

  // Residual as a function of V = U - A.
  Field residual(const Field& V, double T) const {
    const Field U = A_[0] + V;
    const Field u1 = A_[1] + apply(d1_, V);
    const Field u2 = A_[2] + apply(d2_, V);
    const Field u4 = A_[4] + apply(d4_, V);
    Field r = X_ - T * U + U.cube() / 6.0 + (u1.square() + 2.0 * U * u2) / 24.0 + u4 / 240.0;
    r[0] = V[0] - (asymptotic_value(X_[0], T) - A_[0][0]);
    r[n_ - 1] = V[n_ - 1] - (asymptotic_value(X_[n_ - 1], T) - A_[0][n_ - 1]);
    r[1] = u1[0] - asymptotic_slope(X_[0], T);
    r[n_ - 2] = u1[n_ - 1] - asymptotic_slope(X_[n_ - 1], T);
    return r;
  }

  static double interior_norm(const Field& r) {
    return r.segment(2, r.size() - 4).abs().maxCoeff();
  }

  static double full_norm(const Field& r) { return r.abs().maxCoeff(); }

  ColMatrix jacobian(const Field& V, double T) const {
    const Field U = A_[0] + V;
    const Field u1 = A_[1] + apply(d1_, V);
    const Field u2 = A_[2] + apply(d2_, V);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_) * 9);
    auto add_row = [&](const SparseMatrix& d, int row, int src, double scale) {
      for (SparseMatrix::InnerIterator it(d, src); it; ++it) {
        trip.emplace_back(row, static_cast<int>(it.col()), scale * it.value());
      }
    };
    for (int i = 2; i < n_ - 2; ++i) {
      trip.emplace_back(i, i, -T + 0.5 * U[i] * U[i] + u2[i] / 12.0);
      add_row(d1_, i, i, u1[i] / 12.0);
      add_row(d2_, i, i, U[i] / 12.0);
      add_row(d4_, i, i, 1.0 / 240.0);
    }
    trip.emplace_back(0, 0, 1.0);
    trip.emplace_back(n_ - 1, n_ - 1, 1.0);
    add_row(d1_, 1, 0, 1.0);
    add_row(d1_, n_ - 2, n_ - 1, 1.0);
    ColMatrix J(n_, n_);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  struct NewtonResult {
    int iterations = 0;
    double residual = 0.0;
  };

  NewtonResult newton(Field& V, double T) {
    Field r = residual(V, T);
    double norm = full_norm(r);
    NewtonResult out;
    for (int it = 0; it < opts_.max_iterations; ++it) {
      if (norm <= opts_.newton_tol) break;
      const ColMatrix J = jacobian(V, T);
      if (!analyzed_) {
        lu_.analyzePattern(J);
        analyzed_ = true;
      }
      lu_.factorize(J);
      if (lu_.info() != Eigen::Success) throw NoConvergence("singular P_I^2 Newton matrix");
      const Field delta = lu_.solve(-r.matrix()).array();
      ++out.iterations;

      // Damping: halve the step until the residual does not grow.
      double lambda = 1.0;
      Field trial = V + delta;
      Field r_trial = residual(trial, T);
      double trial_norm = full_norm(r_trial);
      while (!(trial_norm < norm) && lambda > 1e-4) {
        lambda *= 0.5;
        trial = V + lambda * delta;
        r_trial = residual(trial, T);
        trial_norm = full_norm(r_trial);
      }
      const double step = lambda * delta.abs().maxCoeff();
      if (!(trial_norm < norm)) {
        // No descent left: round-off floor reached, or a genuine stall.
        break;
      }
      V = std::move(trial);
      r = std::move(r_trial);
      norm = trial_norm;
      if (step <= 1e-13 * (1.0 + (A_[0] + V).abs().maxCoeff())) break;
    }
    out.residual = interior_norm(r);
    if (!(out.residual <= opts_.accept_residual) || !V.allFinite()) {
      std::ostringstream msg;
      msg << "P_I^2 Newton iteration stalled at T = " << T << " with residual " << out.residual
          << "; refine the grid or shorten the continuation step";
      throw NoConvergence(msg.str());
    }
    return out;
  }

  PainleveField build(const Field& V, double T, const NewtonResult& nr) const {
    PainleveField f;
    f.T = T;
    f.L = opts_.L;
    f.X = X_;
    f.U = A_[0] + V;
    f.U_X = A_[1] + apply(d1_, V);
    f.U_XX = A_[2] + apply(d2_, V);
    f.U_XXX = A_[3] + apply(d3_, V);
    f.U_XXXX = A_[4] + apply(d4_, V);
    f.newton_iterations = nr.iterations;

    const Field& u = f.U;
    // Fifth derivative from the X-derivative of the ODE itself.
    const Field u5 = -240.0 * (1.0 - T * f.U_X + 0.5 * u.square() * f.U_X +
                               (4.0 * f.U_X * f.U_XX + 2.0 * u * f.U_XXX) / 24.0);
    f.U_T = -u * f.U_X - f.U_XXX / 12.0;
    f.U_XT = -(f.U_X.square() + u * f.U_XX) - f.U_XXXX / 12.0;
    f.U_XXT = -(3.0 * f.U_X * f.U_XX + u * f.U_XXX) - u5 / 12.0;
    f.Q = q_field(f);
    f.Q_T = -0.5 * u.square() - f.U_XX / 12.0;

    const Field r = ode_residual(f);
    f.newton_residual = r.segment(2, r.size() - 4).abs().maxCoeff();

    double dev = 0.0;
    for (double probe : {-0.5 * opts_.L, 0.5 * opts_.L}) {
      dev = std::max(dev, std::abs(f.interpolate(f.U, probe) - asymptotic_value(probe, T)));
    }
    f.boundary_deviation = dev;
    const double budget = opts_.boundary_constant / (0.5 * opts_.L);
    if (dev > budget) {
      std::ostringstream msg;
      msg << "P_I^2 solution deviates from the far-field asymptotics by " << dev
          << " at |X| = L/2 (budget " << budget << ")";
      throw BoundaryMismatch(msg.str());
    }
    return f;
  }

  // Starting V from the derivative-free balance U^3/6 - T0 U + X = 0.
  Field initial_guess(double T0) const {
    return X_.unaryExpr([T0](double x) { return cubic_root(x, T0); }) - A_[0];
  }

 private:
  PainleveOptions opts_;
  int n_;
  double h_;
  Field X_;
  SparseMatrix d1_, d2_, d3_, d4_;
  std::array<Field, 5> A_;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

// Walks from the start solution at T0 to T in steps of at most dT, recording
// every reached solution in `reached` when given.
PainleveField continue_to(Discretization& disc, Field V, double T0, double T, double dT,
                          std::map<double, Field>* reached) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T - T0) / dT - 1e-12)));
  Discretization::NewtonResult nr;
  for (int s = 1; s <= steps; ++s) {
    const double Ts = s == steps ? T : T0 + (T - T0) * s / steps;
    nr = disc.newton(V, Ts);
    if (reached) (*reached)[Ts] = V;
  }
  return disc.build(V, T, nr);
}

}  // namespace

PainleveField solve_p12(double T, const PainleveOptions& opts) {
  PainleveContinuation path(opts);
  return path.solve(T);
}

PainleveContinuation::PainleveContinuation(PainleveOptions opts) : opts_(opts) {}

PainleveField PainleveContinuation::solve(double T) {
  std::lock_guard lock(mutex_);
  Discretization disc(opts_);
  if (reached_.empty()) {
    const double T0 = opts_.start_T;
    Field V = disc.initial_guess(T0);
    auto nr = disc.newton(V, T0);
    reached_[T0] = V;
    if (T == T0) return disc.build(V, T0, nr);
  }
  // Continue from the nearest T already reached.
  auto best = reached_.begin();
  for (auto it = reached_.begin(); it != reached_.end(); ++it) {
    if (std::abs(it->first - T) < std::abs(best->first - T)) best = it;
  }
  if (best->first == T) {
    Field V = best->second;
    auto nr = disc.newton(V, T);
    return disc.build(V, T, nr);
  }
  return continue_to(disc, best->second, best->first, T, opts_.dT, &reached_);
}

}  // namespace kdvh
