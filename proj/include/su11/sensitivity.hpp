#pragma once

#include "su11/model.hpp"

namespace su11 {

struct SensitivityReport {
  double delta_phi = 0.0;
  double mean_N = 0.0;
  double mean_N2 = 0.0;
  double norm = 0.0;  // N1 (ideal) or N2 (lossy)
  double d_mean_dphi = 0.0;
};

// Intensity detection at output port a, error propagation formula.
SensitivityReport sensitivity_ideal(const Params& p);
SensitivityReport sensitivity_lossy(const Params& p);

// Same moments, but d<N>/dphi from a central difference of the value channel.
// Cross-check only; never used for reported numbers.
SensitivityReport sensitivity_fd(const Params& p, bool lossy, double step = 1e-5);

struct PhaseOptimum {
  double phi = 0.0;
  double delta_phi = 0.0;
};

// Grid search over [phi_lo, phi_hi] followed by golden-section refinement.
// Singular samples are skipped; throws the last error if every sample fails.
PhaseOptimum optimal_phase(const Params& p, double phi_lo, double phi_hi, bool lossy = false,
                           int samples = 64);

}  // namespace su11
