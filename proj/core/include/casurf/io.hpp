#pragma once

// CSV / OBJ export and import, and JSON serialization of reports.
//
// Surface CSV schema:
//   # casurf surface
//   # c1=<c1> c2=<c2>
//   # signature=<+/- per ambient coordinate>
//   # grid nu=<nu> nv=<nv> u0=<> u1=<> v0=<> v1=<>
//   # family=<name> [theta1=<>] [theta2=<>] [K=<>] [Kperp=<>]
//   # param <key>=<value>          (zero or more)
//   u,v,x1..xn[,xu1..xun,xv1..xvn,xuu1..xuun,xuv1..xuvn,xvv1..xvvn],excluded
// One row per node with i (the u index) outer and j inner. Values use %.17g.

#include "casurf/backlund.hpp"
#include "casurf/curves.hpp"
#include "casurf/families.hpp"
#include "casurf/grid.hpp"
#include "casurf/verify.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace casurf {

void write_curve_csv(std::ostream& os, const CurveSample& curve);

/// Writes the schema above; partials are included when present and requested.
void write_surface_csv(std::ostream& os, const ImmersionGrid& grid, bool partials = true);

/// Parses the schema above. Errors are ValidationError messages prefixed with
/// "<source>:<line>:".
ImmersionGrid read_surface_csv(std::istream& is, const std::string& source = "<input>");

/// Vertices projected to three ambient coordinates (0-based), quads between
/// neighbouring non-excluded nodes. The projection is recorded in a comment.
void write_obj(std::ostream& os, const ImmersionGrid& grid, const std::array<int, 3>& axes);

/// u, v, theta1, theta2, mu1, mu2, excluded
void write_backlund_csv(std::ostream& os, const BacklundSolution& sol);

/// u, v, E, F, G, excluded
void write_metric_csv(std::ostream& os, const MetricGrid& m);

/// u, v and one column per field (all on the same grid).
void write_fields_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<const Field2D*>& fields);

/// JSON objects, serialized (NaN becomes null).
std::string grid_json(const Grid2D& g);
std::string constants_json(const ExisConstants& C);
std::string angle_report_json(const AngleReport& r);
std::string compat_report_json(const CompatReport& r);
/// case, grid, sweeps, scheme residual, pair and Sine-Gordon residuals, excluded count.
std::string backlund_report_json(const BacklundSolution& sol, const PairResidual& pair,
                                 const SineGordonResidual& sg);

}  // namespace casurf
