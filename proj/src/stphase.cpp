#include "finphase/stphase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace finphase {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Cplx QuadPhaseExpansion::evaluate(double mu, int j_count) const {
    if (mu <= 0) throw std::invalid_argument("evaluate: mu must be positive");
    Cplx front = std::pow(kPi / mu, 0.5 * d) *
                 std::exp(Cplx(0.0, d * kPi / 4.0));
    Cplx sum = 0.0;
    Cplx iq = 1.0; // (i/(4 mu))^j / j!
    for (int j = 0; j < j_count && j < static_cast<int>(delta_at_zero.size());
         ++j) {
        sum += static_cast<double>(delta_at_zero[j]) * iq;
        iq *= Cplx(0.0, 1.0 / (4.0 * mu)) / static_cast<double>(j + 1);
    }
    return front * sum;
}

double QuadPhaseExpansion::term_magnitude(double mu, int j) const {
    if (j < 0 || j >= static_cast<int>(delta_at_zero.size())) return 0.0;
    double c = std::abs(static_cast<double>(delta_at_zero[j]));
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    return std::pow(kPi / mu, 0.5 * d) * c / (fact * std::pow(4.0 * mu, j));
}

QuadPhaseExpansion quad_phase_expand(const MultiPoly& p, int j_max) {
    if (j_max < 0) throw std::invalid_argument("quad_phase_expand: j_max < 0");
    QuadPhaseExpansion out;
    out.d = p.dim();
    MultiPoly q = p;
    for (int j = 0; j <= j_max; ++j) {
        out.delta_at_zero.push_back(q.eval(
            std::vector<Rational>(static_cast<size_t>(p.dim()), Rational(0))));
        q = laplacian(q);
    }
    return out;
}

Cplx quad_phase_quadrature(const MultiPoly& p, double mu, double R,
                           double plateau, int gl_order,
                           double panels_per_period) {
    const int d = p.dim();
    if (d < 1 || d > 2)
        throw std::invalid_argument("quad_phase_quadrature: d must be 1 or 2");
    if (mu <= 0 || R <= 0)
        throw std::invalid_argument("quad_phase_quadrature: need mu, R > 0");
    CutoffSpec spec;
    spec.c = R;
    spec.plateau = plateau;
    // phase variation mu*R^2 per axis
    int panels = std::max(
        8, static_cast<int>(std::ceil(panels_per_period * mu * R * R /
                                      (2.0 * kPi))));
    if (d == 1) {
        return integrate_panels_1d(
            [&](double x) {
                double r = std::abs(x);
                double rho = cutoff_eval(spec, r, 0);
                if (rho == 0.0) return Cplx(0.0);
                return std::exp(Cplx(0.0, mu * x * x)) *
                       (p.eval(std::vector<double>{x}) * rho);
            },
            -R, R, 2 * panels, gl_order);
    }
    auto rows = map_rows(2 * panels, [&](int row) {
        const GaussRule& gl = gauss_legendre(gl_order);
        double hx = R / panels;
        double x0 = -R + row * hx;
        Cplx acc = 0.0;
        for (size_t a = 0; a < gl.nodes.size(); ++a) {
            double x = x0 + 0.5 * hx * (gl.nodes[a] + 1.0);
            Cplx inner = integrate_panels_1d(
                [&](double y) {
                    double r = std::hypot(x, y);
                    double rho = cutoff_eval(spec, r, 0);
                    if (rho == 0.0) return Cplx(0.0);
                    return std::exp(Cplx(0.0, mu * (x * x + y * y))) *
                           (p.eval(std::vector<double>{x, y}) * rho);
                },
                -R, R, 2 * panels, gl_order);
            acc += 0.5 * hx * gl.weights[a] * inner;
        }
        return acc;
    });
    Cplx total = 0.0;
    for (const Cplx& v : rows) total += v;
    return total;
}

MorseChart morse_normalize(const GraphSurface& surface) {
    const int d = surface.d();
    Mat H0 = surface.hess(Vec::Zero(d));
    Eigen::LLT<Mat> llt(H0);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("morse_normalize: Hessian not SPD at origin");
    Mat L = llt.matrixL();
    Mat A = std::sqrt(2.0) *
            L.transpose().inverse(); // A^T H0 A = 2 I
    double anorm = A.norm();         // Frobenius bound on the 2-norm
    double s_cap = 0.95 * surface.r_dom() / anorm;

    auto f_scaled = [A, surface](const Vec& y) { return surface.f(A * y); };
    auto g_scaled = [A, surface](const Vec& y) -> Vec {
        return A.transpose() * surface.grad(A * y);
    };

    MorseChart chart;
    chart.dim = d;
    chart.prescale = A;
    chart.delta = 0.5 * s_cap;
    chart.forward = [f_scaled, g_scaled, s_cap, d](const Vec& u) -> Vec {
        double r = u.norm();
        if (r == 0.0) return Vec::Zero(d);
        Vec dir = u / r;
        double target = r * r;
        // g is strictly increasing along rays from 0 (convex, minimum at 0),
        // so bracket then run safeguarded Newton.
        double lo = 0.0, hi = std::min(2.0 * r, s_cap);
        while (f_scaled(hi * dir) < target) {
            hi = std::min(1.5 * hi, s_cap);
            if (hi >= s_cap && f_scaled(hi * dir) < target)
                throw std::runtime_error(
                    "morse_normalize: ray leaves the chart domain");
        }
        double s = std::min(r, hi);
        for (int it = 0; it < 200; ++it) {
            double q = f_scaled(s * dir) - target;
            if (std::abs(q) <= 1e-15 * std::max(1.0, target)) break;
            if (q > 0)
                hi = s;
            else
                lo = s;
            double dq = g_scaled(s * dir).dot(dir);
            double step = (dq > 0) ? s - q / dq : -1.0;
            s = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
            if (hi - lo <= 1e-17 * std::max(1.0, hi)) break;
        }
        return s * dir;
    };
    return chart;
}

double verify_phi_lemma(const MorseChart& chart, const MultiPoly& H_m, int m) {
    if (H_m.dim() != chart.dim)
        throw std::invalid_argument("verify_phi_lemma: dimension mismatch");
    if (m < 3) throw std::invalid_argument("verify_phi_lemma: need m >= 3");
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n_dirs = 32;
    std::vector<Vec> dirs;
    for (int k = 0; k < n_dirs; ++k) {
        Vec v(chart.dim);
        for (int i = 0; i < chart.dim; ++i) v[i] = gauss(rng);
        dirs.push_back(v.normalized());
    }
    std::vector<double> logs_r, logs_R;
    double r = 0.5 * chart.delta;
    for (int k = 0; k < 8; ++k, r *= 0.7) {
        double max_resid = 0.0;
        for (const Vec& dir : dirs) {
            Vec u = r * dir;
            Vec xp = chart.forward(u);
            std::vector<double> pu(u.data(), u.data() + u.size());
            double resid = xp.squaredNorm() - r * r + H_m.eval(pu);
            max_resid = std::max(max_resid, std::abs(resid));
        }
        if (max_resid > 1e-13) {
            logs_r.push_back(std::log(r));
            logs_R.push_back(std::log(max_resid));
        }
    }
    if (logs_r.size() < 3) return std::numeric_limits<double>::infinity();
    // least-squares slope
    double n = static_cast<double>(logs_r.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < logs_r.size(); ++i) {
        sx += logs_r[i];
        sy += logs_R[i];
        sxx += logs_r[i] * logs_r[i];
        sxy += logs_r[i] * logs_R[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LeadingTermIndices leading_term_indices(int m, int alpha, int n, int N0) {
    if (m < 3 || alpha < 1 || n < 2 || N0 < 0)
        throw std::invalid_argument("leading_term_indices: bad arguments");
    LeadingTermIndices out;
    out.j1 = Rational(m * (2 * alpha + 1), 2) - 1;
    out.j2 = Rational(m * alpha);
    out.j1_gt_j2 = out.j1 > out.j2;
    out.collision = m * alpha > N0 + 4 * alpha;
    out.alpha_star =
        (m > 4) ? (N0 + (m - 4) - 1) / (m - 4) + 1 : -1;
    return out;
}

std::string LeadingTermIndices::to_json() const {
    std::ostringstream os;
    os << "{\"j1\":\"" << j1 << "\",\"j2\":\"" << j2
       << "\",\"j1_gt_j2\":" << (j1_gt_j2 ? "true" : "false")
       << ",\"collision\":" << (collision ? "true" : "false")
       << ",\"alpha_star\":" << alpha_star << "}";
    return os.str();
}

DeltaVanishing delta_vanishing_check(const MultiPoly& H, int m, int alpha) {
    if (alpha < 1)
        throw std::invalid_argument("delta_vanishing_check: alpha < 1");
    if (!is_homogeneous(H, m))
        throw std::invalid_argument(
            "delta_vanishing_check: H is not homogeneous of degree m");
    const int d = H.dim();
    const int ma = m * alpha;
    MultiPoly P = H.pow(2 * alpha);
    DeltaVanishing out;
    out.value = iterated_laplacian_at_zero(P, ma);
    out.sphere_avg = spherical_average(P).coeff(2 * ma);
    PiValue omega = sphere_monomial_moment(
        Exponents(static_cast<size_t>(d), 0), d);
    Rational C = radial_laplacian_constant(ma, d);
    PiValue lhs{out.value * omega.coeff, omega.pi_power};
    PiValue rhs{C * out.sphere_avg.coeff, out.sphere_avg.pi_power};
    out.identity_ok = lhs == rhs;
    return out;
}

} // namespace finphase
