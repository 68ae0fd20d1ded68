#ifndef FINPHASE_POLYDETECT_HPP
#define FINPHASE_POLYDETECT_HPP

#include "finphase/sections.hpp"

#include <optional>
#include <string>
#include <vector>

namespace finphase {

struct PolyVerdict {
    bool is_polynomial = false;
    std::optional<int> degree;
    std::vector<double> coeffs;         // monomial basis, t^1..t^degree
    double residual_rms = 0;
    double threshold = 0;
    std::optional<double> exponent;     // power-law alternative, when fitted
    std::optional<double> exponent_err;

    std::string to_json() const;
};

struct PolyFit {
    std::vector<double> coeffs; // t^1..t^degree
    double residual_rms;
    double condition;
};

// Weighted least squares in a zero-intercept basis, Chebyshev-rescaled
// internally; coefficients reported back in the monomial basis.
PolyFit fit_poly(const VolumeProfile& profile, int degree);

PolyVerdict detect(const VolumeProfile& profile, int max_degree);

} // namespace finphase

#endif
