#include "finphase/multipoly.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace finphase {

double PiValue::value() const {
    return to_double(coeff) * std::pow(M_PI, pi_power);
}

PiValue operator*(const PiValue& a, const PiValue& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.coeff * b.coeff, a.pi_power + b.pi_power};
}

PiValue operator+(const PiValue& a, const PiValue& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.pi_power != b.pi_power)
        throw std::invalid_argument("PiValue: mismatched pi powers");
    PiValue r{a.coeff + b.coeff, a.pi_power};
    if (r.coeff == 0) r = {};
    return r;
}

bool operator==(const PiValue& a, const PiValue& b) {
    if (a.is_zero() && b.is_zero()) return true;
    return a.coeff == b.coeff && a.pi_power == b.pi_power;
}

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da > db;
    return a > b; // lexicographic on equal degree, x1-major first
}

MultiPoly MultiPoly::constant(int dim, const Rational& c) {
    MultiPoly p(dim);
    p.add_term(Exponents(dim, 0), c);
    return p;
}

MultiPoly MultiPoly::monomial(int dim, const Exponents& exp, const Rational& c) {
    MultiPoly p(dim);
    p.add_term(exp, c);
    return p;
}

MultiPoly MultiPoly::variable(int dim, int i) {
    if (i < 1 || i > dim) throw std::invalid_argument("variable index out of range");
    Exponents e(dim, 0);
    e[i - 1] = 1;
    return monomial(dim, e, 1);
}

int MultiPoly::degree() const {
    if (terms_.empty()) return -1;
    // grlex order puts the highest total degree first
    const Exponents& e = terms_.begin()->first;
    return std::accumulate(e.begin(), e.end(), 0);
}

Rational MultiPoly::coeff(const Exponents& exp) const {
    auto it = terms_.find(exp);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Exponents& exp, const Rational& c) {
    if (static_cast<int>(exp.size()) != dim_)
        throw std::invalid_argument("exponent vector length != dim");
    if (c == 0) return;
    auto it = terms_.find(exp);
    if (it == terms_.end()) {
        terms_.emplace(exp, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    return *this + (-o);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(dim_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
    MultiPoly r(dim_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e(dim_);
            for (int i = 0; i < dim_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly MultiPoly::operator*(const Rational& c) const {
    MultiPoly r(dim_);
    if (c == 0) return r;
    for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
    return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    return dim_ == o.dim_ && terms_ == o.terms_;
}

MultiPoly MultiPoly::pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative power");
    MultiPoly r = constant(dim_, 1);
    MultiPoly base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

Rational MultiPoly::eval(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("eval: wrong point dimension");
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        s += t;
    }
    return s;
}

double MultiPoly::eval(const std::vector<double>& x) const {
    double s = 0;
    for (const auto& [e, c] : terms_) {
        double t = to_double(c);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        s += t;
    }
    return s;
}

MultiPoly MultiPoly::partial(int i) const {
    if (i < 1 || i > dim_) throw std::invalid_argument("partial: bad index");
    MultiPoly r(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[i - 1] == 0) continue;
        Exponents d = e;
        d[i - 1] -= 1;
        r.add_term(d, c * e[i - 1]);
    }
    return r;
}

std::vector<double> MultiPoly::gradient(const std::vector<double>& x) const {
    std::vector<double> g(dim_);
    for (int i = 1; i <= dim_; ++i) g[i - 1] = partial(i).eval(x);
    return g;
}

std::vector<std::vector<double>> MultiPoly::hessian(const std::vector<double>& x) const {
    std::vector<std::vector<double>> h(dim_, std::vector<double>(dim_));
    for (int i = 1; i <= dim_; ++i) {
        MultiPoly pi = partial(i);
        for (int j = i; j <= dim_; ++j)
            h[i - 1][j - 1] = h[j - 1][i - 1] = pi.partial(j).eval(x);
    }
    return h;
}

std::string MultiPoly::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    j["terms"] = nlohmann::json::array();
    for (const auto& [e, c] : terms_) {
        nlohmann::json t;
        t["exp"] = e;
        t["num"] = boost::multiprecision::numerator(c).str();
        t["den"] = boost::multiprecision::denominator(c).str();
        j["terms"].push_back(t);
    }
    return j.dump();
}

MultiPoly MultiPoly::from_json(const std::string& s) {
    nlohmann::json j = nlohmann::json::parse(s);
    MultiPoly p(j.at("dim").get<int>());
    for (const auto& t : j.at("terms")) {
        Exponents e = t.at("exp").get<Exponents>();
        Integer num(t.at("num").get<std::string>());
        Integer den(t.at("den").get<std::string>());
        p.add_term(e, Rational(num, den));
    }
    return p;
}

MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q) { return p * q; }

MultiPoly t_k_symbol(int n, int k) {
    if (n < 2) throw std::invalid_argument("t_k_symbol: n >= 2 required");
    MultiPoly base = MultiPoly::variable(n, n);
    for (int j = 1; j <= n - 1; ++j) {
        MultiPoly xj = MultiPoly::variable(n, j);
        base = base - xj * xj;
    }
    return base.pow(k);
}

MultiPoly laplacian(const MultiPoly& p) {
    MultiPoly r(p.dim());
    for (int i = 1; i <= p.dim(); ++i)
        r = r + p.partial(i).partial(i);
    return r;
}

Rational iterated_laplacian_at_zero(const MultiPoly& p, int j) {
    MultiPoly q = p;
    for (int i = 0; i < j; ++i) q = laplacian(q);
    return q.coeff(Exponents(p.dim(), 0));
}

MultiPoly homogeneous_component(const MultiPoly& p, int m) {
    MultiPoly r(p.dim());
    for (const auto& [e, c] : p.terms()) {
        if (std::accumulate(e.begin(), e.end(), 0) == m) r.add_term(e, c);
    }
    return r;
}

bool is_homogeneous(const MultiPoly& p, int m) {
    return homogeneous_component(p, m) == p;
}

namespace {

// Gamma(k/2) = gam * pi^(sqrt_pi/2): rational part and a sqrt(pi) flag.
void half_gamma(int k, Rational& gam, int& sqrt_pi) {
    if (k % 2 == 0) { // Gamma(integer)
        int m = k / 2;
        Rational f = 1;
        for (int i = 2; i < m; ++i) f *= i;
        gam = f;
        sqrt_pi = 0;
    } else { // Gamma(m + 1/2) with m = (k-1)/2: (2m)!/(4^m m!) sqrt(pi)
        int m = (k - 1) / 2;
        Rational num = 1, den = 1;
        for (int i = 1; i <= 2 * m; ++i) num *= i;
        for (int i = 1; i <= m; ++i) den *= 4 * i;
        gam = num / den;
        sqrt_pi = 1;
    }
}

} // namespace

PiValue sphere_monomial_moment(const Exponents& alpha, int d) {
    if (d < 2) throw std::invalid_argument("sphere_monomial_moment: d >= 2 required");
    if (static_cast<int>(alpha.size()) != d)
        throw std::invalid_argument("sphere_monomial_moment: |alpha| != d");
    for (int a : alpha) {
        if (a < 0) throw std::invalid_argument("negative exponent");
        if (a % 2 != 0) return {};
    }
    Rational num = 1;
    int sqrt_pis = 0;
    for (int a : alpha) {
        Rational g;
        int sp;
        half_gamma(a + 1, g, sp); // Gamma((a+1)/2)
        num *= g;
        sqrt_pis += sp;
    }
    int total = std::accumulate(alpha.begin(), alpha.end(), 0);
    Rational gden;
    int spden;
    half_gamma(total + d, gden, spden); // Gamma((|alpha|+d)/2)
    sqrt_pis -= spden;
    if (sqrt_pis % 2 != 0)
        throw std::logic_error("sphere moment: non-integer pi power");
    return {2 * num / gden, sqrt_pis / 2};
}

PiValue RadialProfile::coeff(int deg2s) const {
    auto it = coeffs.find(deg2s);
    return it == coeffs.end() ? PiValue{} : it->second;
}

RadialProfile spherical_average(const MultiPoly& p) {
    RadialProfile r;
    int d = p.dim();
    for (const auto& [e, c] : p.terms()) {
        PiValue m = sphere_monomial_moment(e, d);
        if (m.is_zero()) continue;
        int deg = std::accumulate(e.begin(), e.end(), 0);
        PiValue add{m.coeff * c, m.pi_power};
        auto it = r.coeffs.find(deg);
        if (it == r.coeffs.end()) {
            r.coeffs.emplace(deg, add);
        } else {
            it->second = it->second + add;
            if (it->second.is_zero()) r.coeffs.erase(it);
        }
    }
    return r;
}

Rational radial_laplacian_constant(int s_max, int d) {
    if (d < 2 || s_max < 1)
        throw std::invalid_argument("radial_laplacian_constant: d >= 2, s_max >= 1");
    Rational c = 1;
    for (int s = 1; s <= s_max; ++s) c *= Rational(2 * s) * (2 * s + d - 2);
    return c;
}

Rational descending_factor_product(int m_alpha, int n) {
    Rational c = 1;
    for (int j = 1; j <= m_alpha; ++j)
        c *= Rational(2 * m_alpha - 2 * j + 2) * (2 * m_alpha - 2 * j + 1) + (n - 2);
    return c;
}

} // namespace finphase
