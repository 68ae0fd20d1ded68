#ifndef FINPHASE_CUTOFF_HPP
#define FINPHASE_CUTOFF_HPP

namespace finphase {

// Smooth bump family rho_c: identically 1 on [0, plateau*c], identically 0
// for |t| >= c, C-infinity exponential transition in between.
struct CutoffSpec {
    double c = 0.3;
    double plateau = 1.0 / 3.0; // fraction of c where rho == 1
};

// value of rho_c, rho_c' or rho_c'' at t (deriv in {0,1,2})
double cutoff_eval(const CutoffSpec& spec, double t, int deriv);

} // namespace finphase

#endif
