#ifndef FINPHASE_RATIONAL_HPP
#define FINPHASE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace finphase {

using Integer  = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Exact value of the form coeff * pi^pi_power.  Sphere moments of even
// monomials always land on an integer power of pi, so this is closed
// under the products and quotients we need.
struct PiValue {
    Rational coeff{0};
    int pi_power{0};

    bool is_zero() const { return coeff == 0; }
    double value() const;
};

PiValue operator*(const PiValue& a, const PiValue& b);
PiValue operator+(const PiValue& a, const PiValue& b); // requires equal pi_power (or a zero side)
bool operator==(const PiValue& a, const PiValue& b);

} // namespace finphase

#endif
