#pragma once

#include "hybridplace/geometry.hpp"
#include "hybridplace/models.hpp"

namespace hybridplace {

enum class Criterion { A, D, E };

const char* criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& s);

/// Everything a placement design run needs besides the initial orientation.
struct DesignProblem {
  int m = 0;
  int n = 2;
  DistanceProfile distances;
  ModelConstants constants;
  NoiseModel noise;
  Criterion criterion = Criterion::A;

  /// n = 3 is the reduced TOA-RSS model: an AOA covariance is rejected.
  void validate() const;
};

}  // namespace hybridplace
