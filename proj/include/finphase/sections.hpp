#ifndef FINPHASE_SECTIONS_HPP
#define FINPHASE_SECTIONS_HPP

#include "finphase/surfaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace finphase {

struct VolumeProfile {
    Vec xi;
    std::vector<double> t_grid;   // strictly increasing, in (0, c]
    std::vector<double> values;   // (n-1)-volumes
    std::vector<double> err;      // absolute error estimates
    std::string method;           // "radial_quadrature" | "monte_carlo" | "chord"
    double c = 0;
    std::uint64_t seed = 0;
};

struct SectionResult {
    double value;
    double err;
};

// (n-1)-volume of the slice {<x,xi> = h + t} of the convex hull.
// n=2: chord length; n=3: radial boundary root-finding with angular
// Gauss-Legendre quadrature; n>=4: Monte Carlo with reported std error.
SectionResult section_volume(const GraphSurface& surface, const TangentFrame& frame,
                             double t, int angular_nodes = 256,
                             std::uint64_t seed = 20240901,
                             std::size_t mc_samples = 2000000);

VolumeProfile volume_profile(const GraphSurface& surface, const Vec& xi,
                             const std::vector<double>& t_grid, double c,
                             int angular_nodes = 256,
                             std::uint64_t seed = 20240901,
                             std::size_t mc_samples = 2000000);

// least-squares slope of log A vs log t over the smallest decade of t
struct ExponentFit {
    double exponent;
    double std_error;
};
ExponentFit leading_exponent(const VolumeProfile& profile);

// c = min(0.3, largest c keeping the slice inside 0.8 * r_dom)
double default_cap_height(const GraphSurface& surface, const TangentFrame& frame);

// Monte Carlo volume of the cap region D_{xi,c}; used as the Fubini oracle.
SectionResult cap_volume_mc(const GraphSurface& surface, const TangentFrame& frame,
                            double c, std::size_t n_samples, std::uint64_t seed);

// CSV with a comment header recording xi, c, method, seed; columns t,A,err
std::string profile_to_csv(const VolumeProfile& p);

} // namespace finphase

#endif
