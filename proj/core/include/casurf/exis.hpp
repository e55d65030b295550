#pragma once

// Constants a1, a2, A1, A2 of the two-angle existence results and the sign
// case they select for the Backlund pair.

#include <string>

namespace casurf {

enum class BacklundCase { SineSine, SinhSinh, Mixed };
std::string to_string(BacklundCase c);

struct ExisConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  BacklundCase sign_case = BacklundCase::SineSine;

  /// c1 cos^2 t1 cos^2 t2 + c2 sin^2 t1 sin^2 t2, the curvature of every metric
  /// built from these constants.
  double gauss_curvature() const;
  /// |(c1 + c2)/4| sin 2t1 sin 2t2.
  double normal_curvature() const;
};

/// Requires pi/2 > theta1 > theta2 > 0 and (c1, c2) != (0, 0). A1 or A2 equal
/// to zero is rejected since neither substitution applies.
ExisConstants exis_constants(double c1, double c2, double theta1, double theta2);

}  // namespace casurf
