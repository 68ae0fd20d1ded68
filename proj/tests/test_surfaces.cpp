#include <doctest.h>

#include "finphase/surfaces.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace finphase;

namespace {

GraphSurface sphere(double R, int n) {
    QuadricSpec q;
    q.kind = QuadricKind::ellipsoid;
    q.a.assign(n, R);
    return make_quadric(q, n);
}

GraphSurface unit_paraboloid(int n) {
    QuadricSpec q;
    q.kind = QuadricKind::elliptic_paraboloid;
    q.a.assign(n - 1, 1.0);
    return make_quadric(q, n);
}

Vec random_direction(std::mt19937& rng, int n) {
    std::normal_distribution<double> gauss;
    Vec xi(n);
    // keep |xi'|/xi_n small so the direction stays inside the Gauss image
    // of every test chart (the hyperboloid's is a bounded cone)
    for (int i = 0; i < n; ++i) xi[i] = std::clamp(gauss(rng), -1.0, 1.0);
    xi[n - 1] = 4.0;
    return xi.normalized();
}

} // namespace

TEST_CASE("inverse_gauss round trip and support inequality") {
    std::mt19937 rng(42);
    std::vector<GraphSurface> surfaces;
    surfaces.push_back(sphere(2.0, 3));
    surfaces.push_back(unit_paraboloid(3));
    QuadricSpec hy;
    hy.kind = QuadricKind::two_sheet_hyperboloid;
    hy.a = {1.5, 2.0, 1.0};
    surfaces.push_back(make_quadric(hy, 3));

    for (const GraphSurface& s : surfaces) {
        for (int it = 0; it < 20; ++it) {
            Vec xi = random_direction(rng, s.n());
            TangentFrame fr = inverse_gauss(s, xi);
            CHECK(fr.residual <= 1e-12);
            // the Gauss map inverts: inward normal at a' equals xi
            CHECK((s.inward_normal(fr.ap) - xi).norm() <= 1e-10);
            CHECK(fr.h == doctest::Approx(fr.a.dot(xi)).epsilon(1e-14));
            // frame columns span xi^perp orthonormally
            CHECK((fr.frame.transpose() * fr.frame -
                   Mat::Identity(s.d(), s.d())).norm() <= 1e-12);
            CHECK((fr.frame.transpose() * xi).norm() <= 1e-12);

            // support inequality: h is the minimum of <x, xi> over the chart
            std::uniform_real_distribution<double> ur(-0.6, 0.6);
            for (int j = 0; j < 20; ++j) {
                Vec xp(s.d());
                for (int i = 0; i < s.d(); ++i) xp[i] = ur(rng) * s.r_dom();
                if (xp.norm() >= s.r_dom()) continue;
                CHECK(s.point(xp).dot(xi) >= fr.h - 1e-12);
            }
        }
    }
}

TEST_CASE("gaussian curvature of quadrics") {
    // paraboloid f = x1^2 + 3 x2^2: K(0) = det diag(2, 6) = 12
    QuadricSpec q;
    q.kind = QuadricKind::elliptic_paraboloid;
    q.a = {1.0, 3.0};
    GraphSurface p = make_quadric(q, 3);
    CHECK(gaussian_curvature(p, Vec::Zero(2)) == doctest::Approx(12.0).epsilon(1e-12));

    // sphere of radius R: K = 1/R^2 everywhere on the chart
    GraphSurface s = sphere(3.0, 3);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(-0.5, 0.5);
    for (int it = 0; it < 30; ++it) {
        Vec ap(2);
        ap << ur(rng) * s.r_dom(), ur(rng) * s.r_dom();
        CHECK(gaussian_curvature(s, ap) == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
    }

    // ellipsoid pole: K = a_n^2 / prod(a_j^2)
    QuadricSpec e;
    e.kind = QuadricKind::ellipsoid;
    e.a = {1.0, 2.0, 4.0};
    GraphSurface el = make_quadric(e, 3);
    CHECK(gaussian_curvature(el, Vec::Zero(2)) ==
          doctest::Approx(16.0 / (1.0 * 4.0)).epsilon(1e-12));
}

TEST_CASE("taylor data, osculating paraboloid, contact order") {
    QuadricSpec e;
    e.kind = QuadricKind::ellipsoid;
    e.a = {1.0, 2.0, 2.0};
    GraphSurface el = make_quadric(e, 3, 12);
    MultiPoly osc = osculating_paraboloid(el);
    CHECK(osc.coeff({2, 0}) == Rational(1));
    CHECK(osc.coeff({0, 2}) == Rational(1, 4));
    CHECK(contact_order(el, 12) == 3);

    GraphSurface p = unit_paraboloid(3);
    CHECK(contact_order(p, 12) == std::numeric_limits<int>::max());

    // quadratic bowl with a degree-6 perturbation: first nonzero component
    // beyond 2 sits at m = 6, so the contact order is 5
    MultiPoly f(2);
    f.add_term({2, 0}, 1);
    f.add_term({0, 2}, 1);
    f.add_term({6, 0}, Rational(1, 100));
    GraphSurface b = GraphSurface::from_poly(f, 1.0);
    CHECK(contact_order(b, 12) == 5);

    // taylor truncation agrees with f on the chart for analytic quadrics
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ur(-0.15, 0.15);
    for (int it = 0; it < 20; ++it) {
        Vec ap(2);
        ap << ur(rng), ur(rng);
        std::vector<double> pv{ap[0], ap[1]};
        CHECK(el.taylor()->eval(pv) == doctest::Approx(el.f(ap)).epsilon(1e-10));
    }
}

TEST_CASE("cap footprint radius and height limit") {
    GraphSurface p = unit_paraboloid(3);
    Vec xi(3);
    xi << 0, 0, 1;
    TangentFrame fr = inverse_gauss(p, xi);

    // phi(x') = |x'|^2 along the axis, so the footprint is the disk of
    // radius sqrt(c)
    for (double c : {0.25, 1.0, 4.0})
        CHECK(cap_footprint_radius(p, fr, c) == doctest::Approx(std::sqrt(c)).epsilon(1e-10));

    // the 0.8 r_dom ray edge gives the height limit (0.8 * 10)^2
    CHECK(cap_height_limit(p, fr) == doctest::Approx(64.0).epsilon(1e-10));

    // cap larger than the chart ball: +inf sentinel
    CHECK(std::isinf(cap_footprint_radius(p, fr, 200.0)));

    // sphere, axis direction: 1 - sqrt(1 - r^2) = c  =>  r = sqrt(2c - c^2)
    GraphSurface s = sphere(1.0, 3);
    TangentFrame fs = inverse_gauss(s, xi);
    double c = 0.2;
    CHECK(cap_footprint_radius(s, fs, c) ==
          doctest::Approx(std::sqrt(2 * c - c * c)).epsilon(1e-10));

    // off-axis directions keep the footprint inside the chart
    std::mt19937 rng(13);
    Vec xio = random_direction(rng, 3);
    TangentFrame fo = inverse_gauss(s, xio);
    double r = cap_footprint_radius(s, fo, 0.1);
    CHECK(r > 0);
    CHECK(r < s.r_dom());
}

TEST_CASE("from_poly rejects bad charts") {
    MultiPoly g(2); // not normalized: f(0) != 0
    g.add_term({0, 0}, 1);
    g.add_term({2, 0}, 1);
    g.add_term({0, 2}, 1);
    CHECK_THROWS_AS(GraphSurface::from_poly(g, 1.0), std::invalid_argument);

    MultiPoly c(2); // saddle: not strictly convex
    c.add_term({2, 0}, 1);
    c.add_term({0, 2}, -1);
    CHECK_THROWS_AS(GraphSurface::from_poly(c, 1.0), std::invalid_argument);
}

TEST_CASE("surface_from_json") {
    GraphSurface p = surface_from_json(
        R"({"kind":"elliptic_paraboloid","a":[1.0,2.0],"n":3})");
    CHECK(p.name() == "elliptic_paraboloid");
    CHECK(p.n() == 3);
    Vec xp(2);
    xp << 0.3, -0.2;
    CHECK(p.f(xp) == doctest::Approx(0.09 + 2 * 0.04).epsilon(1e-14));

    CHECK_THROWS(surface_from_json(R"({"kind":"nope"})"));
}
