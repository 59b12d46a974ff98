#pragma once

#include <stdexcept>
#include <string>

namespace sfm {

/// Malformed input: bad sizes, inconsistent boundary data, degenerate geometry.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The boundary-condition operator is numerically singular at this wavenumber.
///
/// Happens when the spectral parameter sits on (or next to) an excluded value:
/// an interior eigenvalue of the relevant domain or a point eigenvalue of the
/// perturbed Laplacian. Perturbing k moves away from it.
class NearSingularModel : public std::runtime_error {
 public:
  NearSingularModel(double condition_number, const std::string& what)
      : std::runtime_error(what), condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// Data that cannot be the far-field operator of a scatterer (e.g. far from normal).
class InvalidFarField : public std::runtime_error {
 public:
  InvalidFarField(double normality_defect, const std::string& what)
      : std::runtime_error(what), normality_defect_(normality_defect) {}

  double normality_defect() const noexcept { return normality_defect_; }

 private:
  double normality_defect_;
};

/// Every spectral mode was discarded by the cutoff, or the test function has no
/// component in the retained subspace.
class EmptySpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfm
