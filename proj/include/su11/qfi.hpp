#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "su11/model.hpp"

namespace su11 {

struct QfiReport {
  double F = 0.0;
  double qcrb = 0.0;
  std::optional<double> alpha_star;  // lossy only
  // Lossy only: the closed-form minimum, the numeric minimum over alpha, and
  // whether they agree to 1e-8 relative. F is the closed form when they agree
  // and the numeric minimum otherwise.
  double F_closed = 0.0;
  double F_numeric = 0.0;
  bool consistent = true;
  std::vector<std::pair<std::string, cplx>> terms;
};

QfiReport qfi_ideal(const Params& p);

/// Inner products of the extended-system state |Psi> = N3 O|psi> and its
/// phase derivative |Psi~>, including the dN3/dphi contribution.
struct LossyTerms {
  cplx tt;   // <Psi~|Psi~>
  cplx tp;   // <Psi~|Psi>
  cplx pt;   // <Psi|Psi~>
  cplx n;    // <Psi|n|Psi>
  cplx V;    // <Psi|dn^2|Psi>
  cplx tnp;  // <Psi~|n|Psi>
  cplx pnt;  // <Psi|n|Psi~>
  double r = 0.0;  // (dN3/dphi) / N3
};

// include_norm_derivative = false drops the r|Psi> part of |Psi~>; the alpha
// minimum is unchanged, only the individual terms move.
LossyTerms lossy_terms(const Params& p, bool include_norm_derivative = true);

// C_Q as a function of the placement parameter alpha (p.alpha, p.eta).
double cq_alpha(const Params& p);
double cq_alpha(const LossyTerms& t, double alpha, double eta);

// Closed-form minimum over alpha.
double c13_closed(const LossyTerms& t, double eta);
// The printed grouping; disagrees with the alpha minimum for m >= 1.
double c13_as_printed(const LossyTerms& t, double eta);

// Minimizer of the (quadratic) C_Q; undefined at eta = 1 where C_Q is flat.
double alpha_optimal(const LossyTerms& t, double eta);

QfiReport qfi_lossy(const Params& p);

double qcrb(double F, int nu = 1);

}  // namespace su11
