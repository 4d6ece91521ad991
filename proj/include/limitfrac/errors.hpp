#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace limitfrac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The strain-limiting stress was evaluated outside its admissible set,
/// i.e. beta * |E^{1/2}[eps]| reached 1 (to within the ellipticity guard).
class LimitExceeded : public Error {
 public:
  explicit LimitExceeded(double ratio)
      : Error("strain-limiting ellipticity bound violated: beta*|E^1/2[eps]| = " +
              std::to_string(ratio)),
        ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

/// A Newton iteration hit its iteration cap. Carries the increment norms.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> increments)
      : Error(what), increments_(std::move(increments)) {}
  const std::vector<double>& increments() const noexcept { return increments_; }

 private:
  std::vector<double> increments_;
};

/// The staggered loop hit max_stagger. Carries (|A1|, |A2|) per iteration.
class StaggerNonConvergence : public Error {
 public:
  StaggerNonConvergence(const std::string& what,
                        std::vector<std::pair<double, double>> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<std::pair<double, double>>& residuals() const noexcept {
    return residuals_;
  }

 private:
  std::vector<std::pair<double, double>> residuals_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, int cell) : Error(what), cell_(cell) {}
  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace limitfrac
