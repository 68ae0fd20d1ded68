#ifndef FINPHASE_STPHASE_HPP
#define FINPHASE_STPHASE_HPP

#include "finphase/cutoff.hpp"
#include "finphase/quadrature.hpp"
#include "finphase/surfaces.hpp"

#include <string>

namespace finphase {

// Exact expansion of int e^{i mu |u|^2} p(u) du over R^d:
//   (pi/mu)^{d/2} e^{i d pi/4} * sum_j (Delta^j p)(0) (i/(4 mu))^j / j!
struct QuadPhaseExpansion {
    int d;
    std::vector<Rational> delta_at_zero; // (Delta^j p)(0), j = 0..j_max

    // partial sum through j_count-1 terms, evaluated at mu
    Cplx evaluate(double mu, int j_count) const;
    // |term j| at mu, used as a first-omitted-term bound
    double term_magnitude(double mu, int j) const;
};

QuadPhaseExpansion quad_phase_expand(const MultiPoly& p, int j_max);

// Numerical oracle: int e^{i mu |u|^2} p(u) rho(|u|) du with a radial
// C-infinity mollifier that is 1 on [0, plateau*R] and 0 beyond R (d <= 2).
Cplx quad_phase_quadrature(const MultiPoly& p, double mu, double R,
                           double plateau = 0.5, int gl_order = 12,
                           double panels_per_period = 1.0);

// Morse chart for the graph function, expressed in Cholesky-prescaled
// coordinates g(y) = f(A y) with d^2 g_0 = 2 I, so that dX'_0 = id:
//   g(forward(u)) = |u|^2 exactly, forward(0) = 0.
struct MorseChart {
    int dim;
    Mat prescale; // A: original chart coords = A * (scaled coords)
    std::function<Vec(const Vec&)> forward;
    double delta; // validity radius
};

MorseChart morse_normalize(const GraphSurface& surface);

// Samples R(u) = |X'(u)|^2 - |u|^2 + H_m(u) on random rays at a dyadic
// radius ladder; returns the log-log slope of max |R| vs r
// (+infinity sentinel when R is identically at noise floor).
double verify_phi_lemma(const MorseChart& chart, const MultiPoly& H_m, int m);

struct LeadingTermIndices {
    Rational j1;        // m(2a+1)/2 - 1, from i*mu*J1 (tracked as a rational)
    Rational j2;        // m*a, from J2
    bool j1_gt_j2;
    bool collision;     // m*a > N0 + 4a
    int alpha_star;     // ceil(N0/(m-4)) + 1

    std::string to_json() const;
};

LeadingTermIndices leading_term_indices(int m, int alpha, int n, int N0);

struct DeltaVanishing {
    Rational value;        // (Delta^{m a} H^{2a})(0), exact
    PiValue sphere_avg;    // A = coefficient of the spherical average at r^{2ma}
    bool identity_ok;      // value * |S^{d-1}| == C * A exactly
};

DeltaVanishing delta_vanishing_check(const MultiPoly& H, int m, int alpha);

} // namespace finphase

#endif
