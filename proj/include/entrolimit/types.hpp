#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace entrolimit {

using Index = Eigen::Index;

/// One scalar per spatial cell.
using Field = Eigen::ArrayXd;

/// Vector quantity per spatial cell, stored dim x ncells (one column per cell).
using VectorField = Eigen::ArrayXXd;

/// A step was rejected because it exceeds the stability limit of the scheme.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double ratio)
      : std::runtime_error(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

/// The limit solution developed gradients too steep for the integrator.
class SmoothnessLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state became unphysical (non-positive density, NaN).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entrolimit
