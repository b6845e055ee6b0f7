#pragma once

#include "su11/model.hpp"

namespace su11 {

struct LimitsReport {
  double N_T = 0.0;
  double sql = 0.0;
  double hl = 0.0;
};

// Mean photon number inside the interferometer (both modes, before the second
// OPA) for internal mode-a loss T = p.T1. Requires p.T2 == 1.
double internal_photon_number(const Params& p);

// Same extraction with the printed exponent; audit only.
double internal_photon_number_as_printed(const Params& p);

LimitsReport limits(const Params& p);

}  // namespace su11
