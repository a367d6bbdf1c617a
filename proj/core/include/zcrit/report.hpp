// Verification reports: every identity check returns one record carrying the
// identity name, a self-contained statement of what was tested, the observed
// norms, the tolerance, and numeric metadata (grid sizes, step sizes,
// observed extrapolation orders). The pass flag is a pure function of the
// norms and the tolerance.
#pragma once

#include <map>
#include <string>

namespace zcrit {

struct VerificationReport {
  std::string identity;   // short machine-friendly name
  std::string statement;  // human-readable identity being verified
  double sup_norm = 0.0;
  double l2_norm = 0.0;
  double tolerance = 0.0;
  std::map<std::string, double> metadata;
  bool pass = false;
};

// Builds a report and sets pass = (sup <= tol and l2 <= tol).
VerificationReport make_report(std::string identity, std::string statement,
                               double sup_norm, double l2_norm,
                               double tolerance,
                               std::map<std::string, double> metadata);

}  // namespace zcrit
