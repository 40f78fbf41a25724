#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace kdvh {

using Field = Eigen::ArrayXd;
using Vec = Eigen::VectorXd;

// Failures split into two families: bad input (the caller asked for something
// outside an operation's domain) and numerical failure (the input was fine but
// the computation did not succeed). The CLI maps them onto exit codes 1 and 2.
class Error : public std::runtime_error {
 public:
  enum class Family { Validation, Numerical };

  Error(std::string kind, Family family, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), family_(family) {}

  const std::string& kind() const noexcept { return kind_; }
  Family family() const noexcept { return family_; }

 private:
  std::string kind_;
  Family family_;
};

#define KDVH_DEFINE_ERROR(Name, Fam)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what)                             \
        : Error(#Name, Error::Family::Fam, what) {}                    \
  }

KDVH_DEFINE_ERROR(DomainError, Validation);
KDVH_DEFINE_ERROR(UnsupportedFlow, Validation);
KDVH_DEFINE_ERROR(DomainTooSmall, Validation);
KDVH_DEFINE_ERROR(OutOfWindow, Validation);
KDVH_DEFINE_ERROR(ConfigError, Validation);
KDVH_DEFINE_ERROR(NoConvergence, Numerical);
KDVH_DEFINE_ERROR(SingularDerivative, Numerical);
KDVH_DEFINE_ERROR(PastBreakup, Numerical);
KDVH_DEFINE_ERROR(DegenerateCatastrophe, Numerical);
KDVH_DEFINE_ERROR(BoundaryMismatch, Numerical);
KDVH_DEFINE_ERROR(Instability, Numerical);
KDVH_DEFINE_ERROR(ResolutionLoss, Numerical);

#undef KDVH_DEFINE_ERROR

}  // namespace kdvh
