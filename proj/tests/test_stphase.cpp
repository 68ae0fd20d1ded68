#include <doctest.h>

#include "finphase/stphase.hpp"

#include <cmath>
#include <random>

using namespace finphase;

namespace {

MultiPoly x(int dim, int i) { return MultiPoly::variable(dim, i); }

GraphSurface bowl_with_cubic(const MultiPoly& H, const Rational& scale) {
    // f = |x|^2 + scale * H on a small ball; Hessian at 0 is 2I, so the
    // Morse prescale is the identity and chart coords match x
    int d = H.dim();
    MultiPoly f(d);
    for (int i = 1; i <= d; ++i) f = f + x(d, i) * x(d, i);
    f = f + H * scale;
    return GraphSurface::from_poly(f, 0.4, "bowl");
}

} // namespace

TEST_CASE("quad_phase_expand matches Fresnel closed forms") {
    // d=1, p=1: int e^{i mu u^2} du = sqrt(pi/mu) e^{i pi/4}
    MultiPoly one = MultiPoly::constant(1, 1);
    QuadPhaseExpansion e1 = quad_phase_expand(one, 4);
    for (double mu : {3.0, 17.0, 120.0}) {
        Cplx want = std::sqrt(M_PI / mu) * std::polar(1.0, M_PI / 4);
        Cplx got = e1.evaluate(mu, 5);
        CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }

    // d=1, p=u^2: int u^2 e^{i mu u^2} du = (i/(2 mu)) sqrt(pi/mu) e^{i pi/4}
    MultiPoly u2 = x(1, 1) * x(1, 1);
    QuadPhaseExpansion e2 = quad_phase_expand(u2, 4);
    REQUIRE(e2.delta_at_zero.size() >= 2);
    CHECK(e2.delta_at_zero[0] == 0);
    CHECK(e2.delta_at_zero[1] == 2);
    for (double mu : {5.0, 50.0}) {
        Cplx want = Cplx(0, 1) / (2 * mu) * std::sqrt(M_PI / mu) *
                    std::polar(1.0, M_PI / 4);
        Cplx got = e2.evaluate(mu, 5);
        CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }

    // d=2, p=1: int e^{i mu |u|^2} du = (pi/mu) e^{i pi/2} = i pi / mu
    MultiPoly one2 = MultiPoly::constant(2, 1);
    QuadPhaseExpansion e3 = quad_phase_expand(one2, 3);
    Cplx got = e3.evaluate(7.0, 4);
    CHECK(std::abs(got - Cplx(0, M_PI / 7.0)) <= 1e-12);
}

TEST_CASE("quad_phase_quadrature agrees with the expansion") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> co(-3, 3);
    for (int d = 1; d <= 2; ++d) {
        MultiPoly p(d);
        p.add_term(Exponents(d, 0), 2);
        Exponents e2(d, 0);
        e2[0] = 2;
        p.add_term(e2, co(rng) * 2 + 1);
        if (d == 2) p.add_term({1, 1}, co(rng));

        QuadPhaseExpansion ex = quad_phase_expand(p, 6);
        for (double mu : {30.0, 60.0}) {
            Cplx oracle = quad_phase_quadrature(p, mu, 4.0, 0.5, 12, 1.0);
            Cplx partial = ex.evaluate(mu, 4);
            double bound = 5.0 * ex.term_magnitude(mu, 4) + 1e-8;
            CHECK(std::abs(partial - oracle) <= bound);
        }
    }
}

TEST_CASE("morse_normalize flattens the phase exactly") {
    QuadricSpec q;
    q.kind = QuadricKind::elliptic_paraboloid;
    q.a = {1.0, 2.5};
    GraphSurface s = make_quadric(q, 3, 6);
    MorseChart chart = morse_normalize(s);
    REQUIRE(chart.dim == 2);
    CHECK(chart.delta > 0);

    // A^T (d^2 f)(0) A = 2 I
    Mat H0 = s.hess(Vec::Zero(2));
    Mat G = chart.prescale.transpose() * H0 * chart.prescale;
    CHECK((G - 2.0 * Mat::Identity(2, 2)).norm() <= 1e-12);

    std::mt19937 rng(11);
    std::normal_distribution<double> gauss;
    for (int it = 0; it < 50; ++it) {
        Vec u(2);
        u << gauss(rng), gauss(rng);
        u *= chart.delta * std::pow(0.9, it % 10) / u.norm();
        Vec y = chart.forward(u);
        double fval = s.f(chart.prescale * y);
        CHECK(std::abs(fval - u.squaredNorm()) <= 1e-12 * std::max(1.0, u.squaredNorm()));
    }
    CHECK(chart.forward(Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("verify_phi_lemma separates the right homogeneous term") {
    MultiPoly H = x(2, 1) * x(2, 1) * x(2, 1) - x(2, 1) * x(2, 2) * x(2, 2);
    GraphSurface s = bowl_with_cubic(H, Rational(1, 10));
    MorseChart chart = morse_normalize(s);

    // g(y) = |y|^2 + 0.1 H(y): the residual with the matching cubic cancels
    // through order 3, leaving slope >= 4; a wrong guess stays at 3
    MultiPoly H_scaled = H * Rational(1, 10);
    double good = verify_phi_lemma(chart, H_scaled, 3);
    double bad = verify_phi_lemma(chart, -H_scaled, 3);
    CHECK(good > 3.5);
    CHECK(bad < 3.5);
    CHECK(bad > 2.5);

    // pure quadratic: residual at noise floor, sentinel +inf
    QuadricSpec q;
    q.kind = QuadricKind::elliptic_paraboloid;
    q.a = {1.0, 1.0};
    MorseChart flat = morse_normalize(make_quadric(q, 3, 4));
    CHECK(std::isinf(verify_phi_lemma(flat, MultiPoly(2), 3)));
}

TEST_CASE("leading_term_indices") {
    LeadingTermIndices t = leading_term_indices(6, 2, 3, 2);
    CHECK(t.j1 == 14);
    CHECK(t.j2 == 12);
    CHECK(t.j1_gt_j2);
    CHECK(t.collision); // 12 > 2 + 8
    CHECK(t.alpha_star == 2);

    LeadingTermIndices s = leading_term_indices(5, 1, 3, 2);
    CHECK(s.j1 == Rational(13, 2));
    CHECK(s.j2 == 5);
    CHECK(s.j1_gt_j2);
    CHECK_FALSE(s.collision); // 5 <= 2 + 4

    // quartic and below: alpha_star undefined
    CHECK(leading_term_indices(4, 1, 3, 2).alpha_star == -1);
}

TEST_CASE("delta_vanishing_check identity") {
    // H = x1, alpha = 2: Delta^2 x1^4 = 24
    MultiPoly H1 = x(2, 1);
    DeltaVanishing v1 = delta_vanishing_check(H1, 1, 2);
    CHECK(v1.value == 24);
    CHECK(v1.identity_ok);

    std::mt19937 rng(3);
    std::uniform_int_distribution<int> co(-5, 5);
    for (int d = 2; d <= 3; ++d) {
        for (int m : {2, 3}) {
            MultiPoly H(d);
            Exponents e(d, 0);
            e[0] = m;
            H.add_term(e, co(rng) * 2 + 1);
            e[0] = m - 1;
            e[1] = 1;
            H.add_term(e, co(rng));
            DeltaVanishing v = delta_vanishing_check(H, m, 1);
            CHECK(v.identity_ok);
            CHECK(v.value != 0); // even powers survive the laplacians
        }
    }

    CHECK(delta_vanishing_check(MultiPoly(2), 3, 1).value == 0);
}
