#ifndef FINPHASE_MULTIPOLY_HPP
#define FINPHASE_MULTIPOLY_HPP

#include "finphase/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace finphase {

using Exponents = std::vector<int>;

// Graded lexicographic term order: higher total degree first, ties broken
// lexicographically.  Gives deterministic iteration and serialization.
struct GrlexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

// Exact multivariate polynomial over the rationals.  Zero coefficients are
// never stored; all exponent vectors have length dim.
class MultiPoly {
public:
    MultiPoly() : dim_(0) {}
    explicit MultiPoly(int dim) : dim_(dim) {}

    static MultiPoly constant(int dim, const Rational& c);
    static MultiPoly monomial(int dim, const Exponents& exp, const Rational& c);
    // x_i (1-based index)
    static MultiPoly variable(int dim, int i);

    int dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    // total degree; -1 for the zero polynomial
    int degree() const;
    const std::map<Exponents, Rational, GrlexLess>& terms() const { return terms_; }

    Rational coeff(const Exponents& exp) const;
    void add_term(const Exponents& exp, const Rational& c);

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(const Rational& c) const;
    MultiPoly operator-() const;
    bool operator==(const MultiPoly& o) const;

    MultiPoly pow(int k) const;

    Rational eval(const std::vector<Rational>& x) const;
    double eval(const std::vector<double>& x) const;
    std::vector<double> gradient(const std::vector<double>& x) const;
    std::vector<std::vector<double>> hessian(const std::vector<double>& x) const;

    // d/dx_i (1-based)
    MultiPoly partial(int i) const;

    std::string to_json() const;
    static MultiPoly from_json(const std::string& s);

private:
    int dim_;
    std::map<Exponents, Rational, GrlexLess> terms_;
};

MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q);

// T_k(x) = (x_n - sum_{j<n} x_j^2)^k in n variables.
MultiPoly t_k_symbol(int n, int k);

MultiPoly laplacian(const MultiPoly& p);
Rational iterated_laplacian_at_zero(const MultiPoly& p, int j);
MultiPoly homogeneous_component(const MultiPoly& p, int m);
bool is_homogeneous(const MultiPoly& p, int m);

// Exact integral of theta^alpha over S^{d-1}; zero when any alpha_i is odd,
// otherwise 2*Gamma(b_1)...Gamma(b_d)/Gamma(b_1+...+b_d) with b_i=(a_i+1)/2,
// carried as rational * pi^k via half-integer Gamma values.
PiValue sphere_monomial_moment(const Exponents& alpha, int d);

// Radially symmetric polynomial sum c_s r^{2s}; coefficients carry pi powers.
struct RadialProfile {
    std::map<int, PiValue> coeffs; // key: even degree 2s

    bool is_zero() const { return coeffs.empty(); }
    PiValue coeff(int deg2s) const;
};

// H~(r) = integral over |theta|=1 of p(r theta) dA(theta).
RadialProfile spherical_average(const MultiPoly& p);

// prod_{s=1}^{s_max} 2s(2s+d-2)  ( = Delta^{s_max} (r^{2 s_max}) at 0 )
Rational radial_laplacian_constant(int s_max, int d);

// Companion product prod_j [ (2ma-2j+2)(2ma-2j+1) + (n-2) ] of descending
// factors; it differs from radial_laplacian_constant but, like it, is
// manifestly nonzero, which is all that is used downstream.
Rational descending_factor_product(int m_alpha, int n);

} // namespace finphase

#endif
