#ifndef FINPHASE_OSCILLATORY_HPP
#define FINPHASE_OSCILLATORY_HPP

#include "finphase/cutoff.hpp"
#include "finphase/quadrature.hpp"
#include "finphase/surfaces.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace finphase {

struct QuadSettings {
    double panels_per_period = 0.35; // ~4 coarse / 8 fine nodes per period
    int gl_order = 12;               // nodes per panel per dimension
    int min_panels = 6;
    bool restrict_to_cap = true;    // skip panels certified outside supp rho
};

struct OscResult {
    Cplx value;
    double err; // node-doubling estimate
};

// I_{xi,c}(lambda) for k=0; for k>=1 the integral J^(k) with the weight
// i*lambda*<xi,nu> T_k(x) + <grad T_k(x), nu> inserted.
OscResult integral_I(const GraphSurface& surface, const TangentFrame& frame,
                     const CutoffSpec& spec, double lambda, int k = 0,
                     const QuadSettings& qs = {});

// F1 = +lambda^2 int_D e^{i lambda <xi,x>} rho dV   (sign chosen so that
// the Stokes identity I = F1 + F2 + F3 holds exactly)
OscResult integral_F1(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs = {});

// Fubini route: lambda^2 e^{i lambda h} int_0^c e^{i lambda t} A(t) rho_c(t) dt
Cplx integral_F1_fubini(const TangentFrame& frame, const CutoffSpec& spec,
                        double lambda, const std::function<double(double)>& A,
                        int gl_order = 16);

// F2 = +int_D e^{i lambda <xi,x>} rho_c''(t) dV
OscResult integral_F2(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs = {});

// F3 = int_M e^{i lambda <xi,x>} rho_c'(t) <xi,nu> dS
OscResult integral_F3(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs = {});

struct OscSample {
    std::vector<double> lambda_grid;
    std::vector<Cplx> I, F1, F2, F3;
    std::vector<double> I_err, F1_err, F2_err, F3_err;
    int k = 0;
    TangentFrame frame;
    double c = 0;
};

// computes I (with the sample's k) and, for k=0, F1..F3 on the grid;
// lambda points are evaluated concurrently, merged in grid order
OscSample compute_osc_sample(const GraphSurface& surface, const TangentFrame& frame,
                             const CutoffSpec& spec,
                             const std::vector<double>& lambda_grid, int k = 0,
                             const QuadSettings& qs = {}, bool with_stokes_parts = true);

// max over lambda of |I - (F1+F2+F3)| / (|I| + eps)
double stokes_residual(const OscSample& sample, double eps = 1e-30);

struct ExpansionFit {
    double h;
    int k_min, k_max;
    std::vector<Cplx> b;      // b_k, k = k_min..k_max
    std::vector<double> b_err;
    double tail_rms;

    std::string to_json() const;
};

// least-squares fit of e^{-i lambda h} I(lambda) against sum b_k lambda^{-k};
// k_min defaults to (n-1)/2 from the sample's frame
ExpansionFit extract_expansion(const OscSample& sample, int k_max, int k_min = -1);

// log-log least-squares slope of |values| vs lambda; -inf on zero values
double decay_order(const std::vector<Cplx>& values, const std::vector<double>& lambda_grid);

std::string osc_sample_to_csv(const OscSample& s);

} // namespace finphase

#endif
