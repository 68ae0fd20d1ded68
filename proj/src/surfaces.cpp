#include "finphase/surfaces.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace finphase {

namespace {

Rational rational_from_double(double x) {
    // doubles are dyadic rationals; the conversion is exact
    return Rational(x);
}

double estimate_margin(const std::function<Mat(const Vec&)>& hess, int d, double r_dom) {
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double lo = std::numeric_limits<double>::infinity();
    auto probe = [&](const Vec& xp) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hess(xp));
        lo = std::min(lo, es.eigenvalues().minCoeff());
    };
    probe(Vec::Zero(d));
    for (int i = 0; i < 256; ++i) {
        Vec dir(d);
        for (int j = 0; j < d; ++j) dir[j] = gauss(rng);
        dir.normalize();
        double r = r_dom * std::pow(unif(rng), 1.0 / d);
        probe(r * dir);
    }
    if (!(lo > 0))
        throw std::invalid_argument("surface is not strictly convex on its chart ball");
    return 0.9 * lo;
}

// flat-array polynomial evaluator; much cheaper per node than walking the
// exact-rational term map inside quadrature loops
struct CompiledPoly {
    int d = 0;
    std::vector<double> coef;
    std::vector<int> expo; // d entries per term

    static CompiledPoly compile(const MultiPoly& p) {
        CompiledPoly c;
        c.d = p.dim();
        for (const auto& [e, r] : p.terms()) {
            c.coef.push_back(to_double(r));
            c.expo.insert(c.expo.end(), e.begin(), e.end());
        }
        return c;
    }

    double eval(const Vec& x) const {
        double s = 0.0;
        const int* e = expo.data();
        for (std::size_t t = 0; t < coef.size(); ++t, e += d) {
            double m = coef[t];
            for (int j = 0; j < d; ++j) {
                const double xj = x[j];
                for (int k = e[j]; k > 0; --k) m *= xj;
            }
            s += m;
        }
        return s;
    }
};

// binomial series sqrt(1+v) = sum_k c_k v^k, exact rationals
std::vector<Rational> sqrt_series(int kmax) {
    std::vector<Rational> c(kmax + 1);
    c[0] = 1;
    for (int k = 1; k <= kmax; ++k)
        c[k] = c[k - 1] * (Rational(1, 2) - (k - 1)) / k;
    return c;
}

} // namespace

GraphSurface::GraphSurface(int n,
                           std::function<double(const Vec&)> f,
                           std::function<Vec(const Vec&)> grad,
                           std::function<Mat(const Vec&)> hess,
                           double r_dom, double convexity_margin,
                           std::optional<MultiPoly> taylor,
                           std::string name)
    : n_(n), f_(std::move(f)), grad_(std::move(grad)), hess_(std::move(hess)),
      r_dom_(r_dom), margin_(convexity_margin), taylor_(std::move(taylor)),
      name_(std::move(name)) {
    if (n_ < 2) throw std::invalid_argument("GraphSurface: n >= 2 required");
    Vec zero = Vec::Zero(n_ - 1);
    if (std::abs(f_(zero)) > 1e-14 || grad_(zero).norm() > 1e-14)
        throw std::invalid_argument("GraphSurface: not normalized (f(0)=0, grad f(0)=0 required)");
}

GraphSurface GraphSurface::from_poly(const MultiPoly& f_poly, double r_dom,
                                     std::string name) {
    int d = f_poly.dim();
    CompiledPoly cf = CompiledPoly::compile(f_poly);
    std::vector<MultiPoly> partials;
    partials.reserve(d);
    for (int i = 0; i < d; ++i) partials.push_back(f_poly.partial(i + 1));
    std::vector<CompiledPoly> cg;
    cg.reserve(d);
    for (int i = 0; i < d; ++i) cg.push_back(CompiledPoly::compile(partials[i]));
    std::vector<CompiledPoly> ch; // upper triangle, row-major
    ch.reserve(d * (d + 1) / 2);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) ch.push_back(CompiledPoly::compile(partials[i].partial(j + 1)));

    auto f = [cf](const Vec& x) { return cf.eval(x); };
    auto grad = [cg, d](const Vec& x) {
        Vec g(d);
        for (int i = 0; i < d; ++i) g[i] = cg[i].eval(x);
        return g;
    };
    auto hess = [ch, d](const Vec& x) {
        Mat m(d, d);
        int idx = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                m(i, j) = ch[idx].eval(x);
                m(j, i) = m(i, j);
                ++idx;
            }
        return m;
    };
    double margin = estimate_margin(hess, d, r_dom);
    return GraphSurface(d + 1, f, grad, hess, r_dom, margin, f_poly, std::move(name));
}

Vec GraphSurface::point(const Vec& xp) const {
    Vec x(n_);
    x.head(n_ - 1) = xp;
    x[n_ - 1] = f_(xp);
    return x;
}

Vec GraphSurface::inward_normal(const Vec& xp) const {
    Vec g = grad_(xp);
    Vec nu(n_);
    nu.head(n_ - 1) = -g;
    nu[n_ - 1] = 1.0;
    nu /= std::sqrt(1.0 + g.squaredNorm());
    return nu;
}

GraphSurface make_quadric(const QuadricSpec& spec, int n, int taylor_degree) {
    for (double aj : spec.a)
        if (!(aj > 0)) throw std::invalid_argument("make_quadric: coefficients must be positive");
    int d = n - 1;

    if (spec.kind == QuadricKind::elliptic_paraboloid) {
        if (static_cast<int>(spec.a.size()) != d)
            throw std::invalid_argument("paraboloid: need n-1 coefficients");
        MultiPoly poly(d);
        for (int j = 0; j < d; ++j) {
            Exponents e(d, 0);
            e[j] = 2;
            poly.add_term(e, rational_from_double(spec.a[j]));
        }
        return GraphSurface::from_poly(poly, 10.0, "elliptic_paraboloid");
    }

    if (static_cast<int>(spec.a.size()) != n)
        throw std::invalid_argument("ellipsoid/hyperboloid: need n coefficients");
    std::vector<double> inv2(d);
    for (int j = 0; j < d; ++j) inv2[j] = 1.0 / (spec.a[j] * spec.a[j]);
    double an = spec.a[n - 1];
    bool ell = (spec.kind == QuadricKind::ellipsoid);
    // ellipsoid:   sum (x_j/a_j)^2 + (x_n/a_n)^2 = 1, lower apex shifted to 0:
    //              f = a_n (1 - sqrt(1-u)),  u = sum (x_j/a_j)^2
    // hyperboloid: sum (x_j/a_j)^2 - (x_n/a_n)^2 = -1, lower sheet shifted:
    //              f = a_n (sqrt(1+u) - 1)
    double sgn = ell ? -1.0 : 1.0;
    auto uval = [inv2, d](const Vec& x) {
        double u = 0;
        for (int j = 0; j < d; ++j) u += inv2[j] * x[j] * x[j];
        return u;
    };
    auto f = [=](const Vec& x) {
        double u = uval(x);
        return ell ? an * (1.0 - std::sqrt(1.0 - u)) : an * (std::sqrt(1.0 + u) - 1.0);
    };
    auto grad = [=](const Vec& x) {
        double u = uval(x);
        double s = an / std::sqrt(1.0 + sgn * u);
        Vec g(d);
        for (int j = 0; j < d; ++j) g[j] = s * inv2[j] * x[j];
        return g;
    };
    auto hess = [=](const Vec& x) {
        double u = uval(x);
        double s1 = an / std::sqrt(1.0 + sgn * u);
        double s3 = -sgn * an / std::pow(1.0 + sgn * u, 1.5);
        Mat h(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                h(i, j) = s3 * inv2[i] * x[i] * inv2[j] * x[j];
                if (i == j) h(i, j) += s1 * inv2[i];
            }
        return h;
    };
    double amin = *std::min_element(spec.a.begin(), spec.a.end() - 1);
    double r_dom = ell ? 0.8 * amin : 2.0 * amin;

    // exact Taylor from the binomial series of sqrt(1 + v), v = sgn * u
    MultiPoly u_poly(d);
    for (int j = 0; j < d; ++j) {
        Exponents e(d, 0);
        e[j] = 2;
        u_poly.add_term(e, rational_from_double(inv2[j]));
    }
    int kmax = taylor_degree / 2;
    auto c = sqrt_series(kmax);
    MultiPoly series(d); // sum_{k>=1} c_k v^k  (the k=0 term cancels)
    MultiPoly vk = MultiPoly::constant(d, 1);
    MultiPoly v_poly = u_poly * rational_from_double(sgn);
    for (int k = 1; k <= kmax; ++k) {
        vk = vk * v_poly;
        series = series + vk * c[k];
    }
    Rational ran = rational_from_double(an);
    MultiPoly taylor = ell ? series * (-ran) : series * ran;

    double margin = estimate_margin(hess, d, r_dom);
    return GraphSurface(n, f, grad, hess, r_dom, margin, taylor,
                        ell ? "ellipsoid" : "two_sheet_hyperboloid");
}

TangentFrame inverse_gauss(const GraphSurface& surface, const Vec& xi,
                           double tol, int max_iter) {
    int n = surface.n(), d = n - 1;
    if (xi.size() != n) throw std::invalid_argument("inverse_gauss: xi has wrong dimension");
    Vec xin = xi / xi.norm();
    if (!(xin[n - 1] > 0))
        throw std::runtime_error("inverse_gauss: xi outside the chart (xi_n <= 0)");
    Vec target = -xin.head(d) / xin[n - 1];

    Vec ap = Vec::Zero(d);
    Vec res = surface.grad(ap) - target;
    for (int it = 0; it < max_iter && res.norm() > tol; ++it) {
        Vec step = surface.hess(ap).ldlt().solve(-res);
        double lam = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            Vec cand = ap + lam * step;
            if (cand.norm() < surface.r_dom()) {
                Vec r2 = surface.grad(cand) - target;
                if (r2.norm() < res.norm() || res.norm() <= tol) {
                    ap = cand;
                    res = r2;
                    break;
                }
            }
            lam *= 0.5;
            if (ls == 39)
                throw std::runtime_error("inverse_gauss: line search failed, residual " +
                                         std::to_string(res.norm()));
        }
    }
    if (res.norm() > tol)
        throw std::runtime_error("inverse_gauss: no convergence, residual " +
                                 std::to_string(res.norm()));

    TangentFrame fr;
    fr.xi = xin;
    fr.ap = ap;
    fr.a = surface.point(ap);
    fr.h = fr.a.dot(xin);
    fr.residual = res.norm();
    // orthonormal basis of xi^perp from a Householder QR of [xi | I]
    Eigen::HouseholderQR<Mat> qr(xin);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    fr.frame = Q.rightCols(d);
    return fr;
}

double gaussian_curvature(const GraphSurface& surface, const Vec& ap) {
    if (ap.norm() >= surface.r_dom())
        throw std::invalid_argument("gaussian_curvature: point outside chart ball");
    double det = surface.hess(ap).determinant();
    double g2 = surface.grad(ap).squaredNorm();
    return det / std::pow(1.0 + g2, (surface.n() + 1) / 2.0);
}

MultiPoly osculating_paraboloid(const GraphSurface& surface) {
    if (!surface.taylor())
        throw std::invalid_argument("osculating_paraboloid: no Taylor data");
    return homogeneous_component(*surface.taylor(), 2);
}

int contact_order(const GraphSurface& surface, int k_max) {
    if (!surface.taylor())
        throw std::invalid_argument("contact_order: no Taylor data");
    const MultiPoly& t = *surface.taylor();
    for (int m = 3; m <= k_max; ++m)
        if (!homogeneous_component(t, m).is_zero()) return m - 1;
    return std::numeric_limits<int>::max();
}

namespace {

// rays through a' used to probe the convex footprint
std::vector<Vec> probe_rays(int d, int n_rays) {
    std::vector<Vec> rays;
    if (d == 1) {
        rays.push_back(Vec::Constant(1, 1.0));
        rays.push_back(Vec::Constant(1, -1.0));
        return rays;
    }
    if (d == 2) {
        for (int k = 0; k < n_rays; ++k) {
            double th = 2.0 * M_PI * k / n_rays;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            rays.push_back(v);
        }
        return rays;
    }
    std::mt19937 rng(97531);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < n_rays; ++k) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = gauss(rng);
        rays.push_back(v.normalized());
    }
    return rays;
}

// largest r >= 0 with |ap + r v| <= R
double ray_edge(const Vec& ap, const Vec& v, double R) {
    double b = ap.dot(v);
    double disc = b * b + R * R - ap.squaredNorm();
    if (disc <= 0) return 0.0;
    return -b + std::sqrt(disc);
}

} // namespace

double cap_footprint_radius(const GraphSurface& surface, const TangentFrame& frame,
                            double c, int n_rays) {
    const int d = surface.n() - 1;
    const Vec xi_p = frame.xi.head(d);
    const double xin = frame.xi[surface.n() - 1];
    auto phi = [&](const Vec& xp) {
        return xi_p.dot(xp) + xin * surface.f(xp) - frame.h;
    };
    double reach = 0;
    for (const Vec& v : probe_rays(d, n_rays)) {
        double hi = ray_edge(frame.ap, v, 0.95 * surface.r_dom());
        if (phi(frame.ap + hi * v) <= c)
            return std::numeric_limits<double>::infinity();
        double lo = 0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (phi(frame.ap + mid * v) <= c ? lo : hi) = mid;
        }
        reach = std::max(reach, hi);
    }
    return reach;
}

double cap_height_limit(const GraphSurface& surface, const TangentFrame& frame,
                        int n_rays) {
    const int d = surface.n() - 1;
    const Vec xi_p = frame.xi.head(d);
    const double xin = frame.xi[surface.n() - 1];
    double limit = std::numeric_limits<double>::infinity();
    for (const Vec& v : probe_rays(d, n_rays)) {
        double r = ray_edge(frame.ap, v, 0.8 * surface.r_dom());
        Vec xp = frame.ap + r * v;
        double phi = xi_p.dot(xp) + xin * surface.f(xp) - frame.h;
        limit = std::min(limit, phi);
    }
    return limit;
}

GraphSurface surface_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "custom_poly") {
        MultiPoly p = MultiPoly::from_json(j.at("poly").dump());
        double r = j.value("r_dom", 1.0);
        return GraphSurface::from_poly(p, r);
    }
    QuadricSpec spec;
    if (kind == "ellipsoid") spec.kind = QuadricKind::ellipsoid;
    else if (kind == "two_sheet_hyperboloid") spec.kind = QuadricKind::two_sheet_hyperboloid;
    else if (kind == "elliptic_paraboloid") spec.kind = QuadricKind::elliptic_paraboloid;
    else throw std::invalid_argument("unknown surface kind: " + kind);
    spec.a = j.at("a").get<std::vector<double>>();
    int n = j.at("n").get<int>();
    int deg = j.value("taylor_degree", 12);
    return make_quadric(spec, n, deg);
}

} // namespace finphase
