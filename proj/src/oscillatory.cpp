#include "finphase/oscillatory.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace finphase {

namespace {

struct ChartBox {
    Vec center;  // a' in chart coordinates
    double half; // half-width per coordinate
    double reach; // certified cap footprint radius about a'
    double grad_bound; // max |xi' + xi_n grad f| over the box
};

// The cap {t <= c} has the chart footprint {phi <= c}, a convex set probed
// by ray bisection; the 5% inflation certifies that every node outside the
// reach ball has rho == 0, so skipping it contributes an exact 0.
ChartBox make_box(const GraphSurface& s, const TangentFrame& fr, double c) {
    ChartBox box;
    int d = s.d();
    box.center = fr.ap;
    double r = cap_footprint_radius(s, fr, c);
    if (!std::isfinite(r))
        throw std::runtime_error("oscillatory: cap height exceeds the chart domain");
    box.reach = 1.05 * r;
    box.half = box.reach;
    double g = 0;
    int grid = 7;
    for (int idx = 0; idx < std::pow(grid, d); ++idx) {
        int rem = idx;
        Vec xp = box.center;
        for (int j = 0; j < d; ++j) {
            int ij = rem % grid;
            rem /= grid;
            xp[j] += box.half * (2.0 * ij / (grid - 1) - 1.0);
        }
        if (xp.norm() > s.r_dom()) continue;
        if ((xp - box.center).norm() > box.reach) continue; // integrand is 0 there
        Vec gp = fr.xi.head(d) + fr.xi[s.n() - 1] * s.grad(xp);
        g = std::max(g, gp.norm());
    }
    box.grad_bound = 1.1 * g + 1e-6;
    return box;
}

int panel_count(double span, double lambda, double grad_bound, const QuadSettings& qs) {
    double periods = span * std::abs(lambda) * grad_bound / (2.0 * M_PI);
    int n = static_cast<int>(std::ceil(periods * qs.panels_per_period)) + 1;
    return std::max(n, qs.min_panels);
}

// Generic 2-D (d=2) tensor-panel surface integral over the chart box.
// d=1 charts (n=2) are handled by the same code path with one dimension.
Cplx surface_integral_pass(const GraphSurface& s, const TangentFrame& fr,
                           const CutoffSpec& spec, double lambda, int k,
                           bool with_mu_term, const ChartBox& box,
                           const QuadSettings& qs, int gl_order) {
    int d = s.d();
    if (d > 2) throw std::invalid_argument("surface integrals implemented for n <= 3");
    int np = panel_count(2.0 * box.half, lambda, box.grad_bound, qs);
    const GaussRule& gl = gauss_legendre(gl_order);
    double h = 2.0 * box.half / np;
    int n = s.n();

    const Vec xi_p = fr.xi.head(d);
    const double xin = fr.xi[n - 1];

    auto node_value = [&](const Vec& xp) -> Cplx {
        if (xp.norm() > s.r_dom()) return 0.0;
        if (qs.restrict_to_cap && (xp - box.center).norm() > box.reach) return 0.0;
        double fx = s.f(xp);
        double t = xi_p.dot(xp) + xin * fx - fr.h;
        double rho = cutoff_eval(spec, t, 0);
        double rho1 = cutoff_eval(spec, t, 1);
        if (rho == 0.0 && rho1 == 0.0) return 0.0;
        Vec g = s.grad(xp);
        double gn = std::sqrt(1.0 + g.squaredNorm());
        double xi_nu = (xin - xi_p.dot(g)) / gn; // <xi, (-grad f, 1)/gn>
        Cplx w;
        if (k == 0) {
            if (with_mu_term) {
                // integrand of I: i lambda <xi,nu> rho
                w = Cplx(0.0, lambda * xi_nu) * rho;
            } else {
                // integrand of F3: rho'(t) <xi,nu>
                w = rho1 * xi_nu;
            }
        } else {
            double base = fx - xp.squaredNorm(); // x_n - |x'|^2
            double bk1 = std::pow(base, k - 1);
            double tk = bk1 * base;
            // grad T_k = k base^{k-1} (-2x', 1)
            double grad_dot_nu = k * bk1 * (2.0 * xp.dot(g) + 1.0) / gn;
            w = (Cplx(0.0, lambda * xi_nu) * tk + grad_dot_nu) * rho;
        }
        double phase = lambda * (t + fr.h);
        return w * gn * Cplx(std::cos(phase), std::sin(phase));
    };

    if (d == 1) {
        Cplx sum = 0;
        for (int p = 0; p < np; ++p) {
            double lo = box.center[0] - box.half + p * h;
            Cplx ps = 0;
            for (int i = 0; i < gl_order; ++i) {
                Vec xp(1);
                xp[0] = lo + 0.5 * h * (gl.nodes[i] + 1.0);
                ps += gl.weights[i] * node_value(xp);
            }
            sum += 0.5 * h * ps;
        }
        return sum;
    }

    // d == 2: parallel over panel rows, deterministic merge
    std::vector<Cplx> rows = map_rows(np, [&](int py) -> Cplx {
        double ylo = box.center[1] - box.half + py * h;
        Cplx row = 0;
        for (int px = 0; px < np; ++px) {
            double xlo = box.center[0] - box.half + px * h;
            Cplx ps = 0;
            for (int iy = 0; iy < gl_order; ++iy) {
                double y = ylo + 0.5 * h * (gl.nodes[iy] + 1.0);
                Cplx inner = 0;
                for (int ix = 0; ix < gl_order; ++ix) {
                    Vec xp(2);
                    xp[0] = xlo + 0.5 * h * (gl.nodes[ix] + 1.0);
                    xp[1] = y;
                    inner += gl.weights[ix] * node_value(xp);
                }
                ps += gl.weights[iy] * inner;
            }
            row += 0.25 * h * h * ps;
        }
        return row;
    });
    Cplx sum = 0;
    for (const Cplx& r : rows) sum += r;
    return sum;
}

// Suffix oscillatory integrals G(tau) = int_tau^c e^{i lambda t} rho^(j)(t) dt
// on a uniform knot grid, evaluated between knots by cubic Hermite
// interpolation with the exact derivative G'(tau) = -e^{i lambda tau} rho^(j).
struct SuffixTable {
    double c;
    double dt;
    std::vector<Cplx> G;  // at knots tau_j = j*dt
    std::vector<Cplx> Gp; // exact derivatives there

    Cplx eval(double tau) const {
        if (tau >= c) return 0.0;
        if (tau <= 0.0) return G.front();
        double s = tau / dt;
        int j = std::min(static_cast<int>(s), static_cast<int>(G.size()) - 2);
        double u = s - j;
        double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * G[j] + (u3 - 2 * u2 + u) * dt * Gp[j] +
               (-2 * u3 + 3 * u2) * G[j + 1] + (u3 - u2) * dt * Gp[j + 1];
    }
};

SuffixTable make_suffix_table(const CutoffSpec& spec, double lambda, int rho_deriv,
                              double knots_per_period) {
    SuffixTable tab;
    tab.c = spec.c;
    // cubic Hermite error ~ (dt)^4 |G''''| and F1 amplifies it by lambda^2,
    // so the knot density scales with the requested quadrature order
    int nk = std::max(4096, static_cast<int>(std::ceil(
                 knots_per_period * std::abs(lambda) * spec.c / (2.0 * M_PI))));
    tab.dt = spec.c / nk;
    tab.G.resize(nk + 1);
    tab.Gp.resize(nk + 1);
    const GaussRule& gl = gauss_legendre(8);
    tab.G[nk] = 0.0;
    for (int j = 0; j <= nk; ++j) {
        double tau = j * tab.dt;
        double w = cutoff_eval(spec, tau, rho_deriv);
        tab.Gp[j] = -w * Cplx(std::cos(lambda * tau), std::sin(lambda * tau));
    }
    for (int j = nk - 1; j >= 0; --j) {
        double lo = j * tab.dt;
        Cplx seg = 0.0;
        for (size_t i = 0; i < gl.nodes.size(); ++i) {
            double t = lo + 0.5 * tab.dt * (gl.nodes[i] + 1.0);
            double w = cutoff_eval(spec, t, rho_deriv);
            seg += gl.weights[i] * w *
                   Cplx(std::cos(lambda * t), std::sin(lambda * t));
        }
        tab.G[j] = tab.G[j + 1] + 0.5 * tab.dt * seg;
    }
    return tab;
}

// Volume integral over D = {f(x') <= x_n <= (h + c - <xi',x'>)/xi_n},
// weight(t) is rho (F1, times lambda^2 outside) or rho'' (F2).  The normal
// coordinate integrates out exactly: with t = <xi,x> - h the column over x'
// equals e^{i lambda h} / xi_n * G(phi(x')), phi(x') = <xi,(x',f(x'))> - h.
Cplx volume_integral_pass(const GraphSurface& s, const TangentFrame& fr,
                          const CutoffSpec& spec, double lambda, int rho_deriv,
                          const ChartBox& box, const QuadSettings& qs, int gl_order) {
    int d = s.d();
    if (d > 2) throw std::invalid_argument("volume integrals implemented for n <= 3");
    // F1 carries a lambda^2 prefactor, so the raw integral needs its error
    // shrunk by the same factor; with Gauss order q the panel error decays
    // like h^{2q}, hence the lambda^{1/q} density bump
    QuadSettings qv = qs;
    qv.panels_per_period *= std::pow(std::max(std::abs(lambda), 1.0), 1.0 / gl_order);
    int np = panel_count(2.0 * box.half, lambda, box.grad_bound, qv);
    const GaussRule& gl = gauss_legendre(gl_order);
    double h = 2.0 * box.half / np;
    int n = s.n();
    double xin = fr.xi[n - 1];
    const Vec xi_p = fr.xi.head(d);
    SuffixTable tab = make_suffix_table(spec, lambda, rho_deriv, 8.0 * gl_order);
    double hph = lambda * fr.h;
    Cplx front = Cplx(std::cos(hph), std::sin(hph)) / xin;

    auto column_value = [&](const Vec& xp) -> Cplx {
        if (xp.norm() > s.r_dom()) return 0.0;
        if (qs.restrict_to_cap && (xp - box.center).norm() > box.reach) return 0.0;
        double phi = xi_p.dot(xp) + xin * s.f(xp) - fr.h;
        if (phi >= spec.c) return 0.0;
        return front * tab.eval(std::max(phi, 0.0));
    };

    if (d == 1) {
        Cplx sum = 0;
        Vec xp(1);
        for (int p = 0; p < np; ++p) {
            double lo = box.center[0] - box.half + p * h;
            Cplx ps = 0;
            for (int i = 0; i < gl_order; ++i) {
                xp[0] = lo + 0.5 * h * (gl.nodes[i] + 1.0);
                ps += gl.weights[i] * column_value(xp);
            }
            sum += 0.5 * h * ps;
        }
        return sum;
    }

    std::vector<Cplx> rows = map_rows(np, [&](int py) -> Cplx {
        double ylo = box.center[1] - box.half + py * h;
        Cplx row = 0;
        Vec xp(2);
        for (int px = 0; px < np; ++px) {
            double xlo = box.center[0] - box.half + px * h;
            Cplx ps = 0;
            for (int iy = 0; iy < gl_order; ++iy) {
                xp[1] = ylo + 0.5 * h * (gl.nodes[iy] + 1.0);
                Cplx inner = 0;
                for (int ix = 0; ix < gl_order; ++ix) {
                    xp[0] = xlo + 0.5 * h * (gl.nodes[ix] + 1.0);
                    inner += gl.weights[ix] * column_value(xp);
                }
                ps += gl.weights[iy] * inner;
            }
            row += 0.25 * h * h * ps;
        }
        return row;
    });
    Cplx sum = 0;
    for (const Cplx& r : rows) sum += r;
    return sum;
}

} // namespace

OscResult integral_I(const GraphSurface& surface, const TangentFrame& frame,
                     const CutoffSpec& spec, double lambda, int k,
                     const QuadSettings& qs) {
    ChartBox box = make_box(surface, frame, spec.c);
    Cplx coarse = surface_integral_pass(surface, frame, spec, lambda, k, true,
                                        box, qs, qs.gl_order);
    Cplx fine = surface_integral_pass(surface, frame, spec, lambda, k, true,
                                      box, qs, qs.gl_order + 6);
    return {fine, std::abs(fine - coarse)};
}

OscResult integral_F3(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs) {
    ChartBox box = make_box(surface, frame, spec.c);
    Cplx coarse = surface_integral_pass(surface, frame, spec, lambda, 0, false,
                                        box, qs, qs.gl_order);
    Cplx fine = surface_integral_pass(surface, frame, spec, lambda, 0, false,
                                      box, qs, qs.gl_order + 6);
    return {fine, std::abs(fine - coarse)};
}

OscResult integral_F1(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs) {
    ChartBox box = make_box(surface, frame, spec.c);
    Cplx coarse = volume_integral_pass(surface, frame, spec, lambda, 0, box, qs, qs.gl_order);
    Cplx fine = volume_integral_pass(surface, frame, spec, lambda, 0, box, qs, qs.gl_order + 6);
    double l2 = lambda * lambda;
    return {l2 * fine, l2 * std::abs(fine - coarse)};
}

OscResult integral_F2(const GraphSurface& surface, const TangentFrame& frame,
                      const CutoffSpec& spec, double lambda,
                      const QuadSettings& qs) {
    ChartBox box = make_box(surface, frame, spec.c);
    Cplx coarse = volume_integral_pass(surface, frame, spec, lambda, 2, box, qs, qs.gl_order);
    Cplx fine = volume_integral_pass(surface, frame, spec, lambda, 2, box, qs, qs.gl_order + 6);
    return {fine, std::abs(fine - coarse)};
}

Cplx integral_F1_fubini(const TangentFrame& frame, const CutoffSpec& spec,
                        double lambda, const std::function<double(double)>& A,
                        int gl_order) {
    int np = std::max(8, static_cast<int>(std::ceil(
                 spec.c * std::abs(lambda) / (2.0 * M_PI))) + 2);
    Cplx integral = integrate_panels_1d(
        [&](double t) -> Cplx {
            double w = A(t) * cutoff_eval(spec, t, 0);
            return w * Cplx(std::cos(lambda * t), std::sin(lambda * t));
        },
        0.0, spec.c, np, gl_order);
    double ph = lambda * frame.h;
    return lambda * lambda * Cplx(std::cos(ph), std::sin(ph)) * integral;
}

OscSample compute_osc_sample(const GraphSurface& surface, const TangentFrame& frame,
                             const CutoffSpec& spec,
                             const std::vector<double>& lambda_grid, int k,
                             const QuadSettings& qs, bool with_stokes_parts) {
    OscSample s;
    s.lambda_grid = lambda_grid;
    s.k = k;
    s.frame = frame;
    s.c = spec.c;
    size_t m = lambda_grid.size();
    s.I.resize(m); s.I_err.resize(m);
    if (with_stokes_parts && k == 0) {
        s.F1.resize(m); s.F1_err.resize(m);
        s.F2.resize(m); s.F2_err.resize(m);
        s.F3.resize(m); s.F3_err.resize(m);
    }
    for (size_t i = 0; i < m; ++i) {
        double lam = lambda_grid[i];
        auto ri = integral_I(surface, frame, spec, lam, k, qs);
        s.I[i] = ri.value;
        s.I_err[i] = ri.err;
        if (with_stokes_parts && k == 0) {
            auto r1 = integral_F1(surface, frame, spec, lam, qs);
            auto r2 = integral_F2(surface, frame, spec, lam, qs);
            auto r3 = integral_F3(surface, frame, spec, lam, qs);
            s.F1[i] = r1.value; s.F1_err[i] = r1.err;
            s.F2[i] = r2.value; s.F2_err[i] = r2.err;
            s.F3[i] = r3.value; s.F3_err[i] = r3.err;
        }
    }
    return s;
}

double stokes_residual(const OscSample& sample, double eps) {
    if (sample.F1.size() != sample.I.size())
        throw std::invalid_argument("stokes_residual: F parts missing");
    double worst = 0;
    for (size_t i = 0; i < sample.I.size(); ++i) {
        double num = std::abs(sample.I[i] - (sample.F1[i] + sample.F2[i] + sample.F3[i]));
        worst = std::max(worst, num / (std::abs(sample.I[i]) + eps));
    }
    return worst;
}

ExpansionFit extract_expansion(const OscSample& sample, int k_max, int k_min) {
    int n_dim = static_cast<int>(sample.frame.xi.size());
    // leading power of I at an elliptic point: i*lambda * lambda^{-(n-1)/2}
    if (k_min < 0) k_min = std::max(0, (n_dim - 3) / 2);
    int m = static_cast<int>(sample.lambda_grid.size());
    int p = k_max - k_min + 1;
    if (m < std::max(p + 2, 12))
        throw std::invalid_argument("extract_expansion: grid too small for requested orders");
    if (m >= 2 && sample.lambda_grid.back() < 7.9 * sample.lambda_grid.front())
        throw std::invalid_argument("extract_expansion: grid span too narrow");

    Eigen::MatrixXcd A(m, p);
    Eigen::VectorXcd y(m);
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) {
        double lam = sample.lambda_grid[i];
        double sigma = std::max(sample.I_err.empty() ? 0.0 : sample.I_err[i], 1e-14);
        w[i] = 1.0 / sigma;
        double ph = -lam * sample.frame.h;
        y[i] = sample.I[i] * Cplx(std::cos(ph), std::sin(ph)) * w[i];
        for (int j = 0; j < p; ++j)
            A(i, j) = std::pow(lam, -(k_min + j)) * w[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(p - 1) < 1e-14 * svd.singularValues()(0))
        throw std::runtime_error("extract_expansion: rank-deficient design (grid too narrow)");
    Eigen::VectorXcd b = svd.solve(y);

    ExpansionFit fit;
    fit.h = sample.frame.h;
    fit.k_min = k_min;
    fit.k_max = k_max;
    fit.b.assign(b.data(), b.data() + p);
    Eigen::VectorXcd pred = A * b;
    double ss = 0;
    for (int i = 0; i < m; ++i) {
        Cplx r = (y[i] - pred[i]) / w[i];
        ss += std::norm(r);
    }
    fit.tail_rms = std::sqrt(ss / m);

    // per-coefficient standard errors from (A^H A)^{-1} of the weighted design
    Eigen::MatrixXcd ata = A.adjoint() * A;
    Eigen::MatrixXcd cov = ata.inverse();
    double sigma_hat = std::sqrt(ss / std::max(m - p, 1)); // in units of the weights
    fit.b_err.resize(p);
    for (int j = 0; j < p; ++j)
        fit.b_err[j] = std::sqrt(std::abs(cov(j, j).real())) *
                       std::max(sigma_hat, 1.0);
    return fit;
}

double decay_order(const std::vector<Cplx>& values, const std::vector<double>& lambda_grid) {
    if (values.size() < 6) throw std::invalid_argument("decay_order: need >= 6 points");
    size_t m = values.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        double av = std::abs(values[i]);
        if (av == 0.0) return -std::numeric_limits<double>::infinity();
        double lx = std::log(lambda_grid[i]);
        double ly = std::log(av);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string ExpansionFit::to_json() const {
    nlohmann::json j;
    j["h"] = h;
    j["k_min"] = k_min;
    j["k_max"] = k_max;
    j["tail_rms"] = tail_rms;
    j["b"] = nlohmann::json::array();
    for (size_t i = 0; i < b.size(); ++i) {
        j["b"].push_back({{"k", k_min + static_cast<int>(i)},
                          {"re", b[i].real()},
                          {"im", b[i].imag()},
                          {"std_err", b_err[i]}});
    }
    return j.dump();
}

std::string osc_sample_to_csv(const OscSample& s) {
    std::ostringstream os;
    os.precision(17);
    os << "# k = " << s.k << ", c = " << s.c << ", h = " << s.frame.h << ", xi =";
    for (int i = 0; i < s.frame.xi.size(); ++i) os << " " << s.frame.xi[i];
    os << "\n";
    os << "lambda,re_I,im_I,re_F1,im_F1,re_F2,im_F2,re_F3,im_F3\n";
    bool parts = s.F1.size() == s.I.size();
    for (size_t i = 0; i < s.lambda_grid.size(); ++i) {
        os << s.lambda_grid[i] << "," << s.I[i].real() << "," << s.I[i].imag();
        if (parts)
            os << "," << s.F1[i].real() << "," << s.F1[i].imag()
               << "," << s.F2[i].real() << "," << s.F2[i].imag()
               << "," << s.F3[i].real() << "," << s.F3[i].imag();
        else
            os << ",,,,,,,";
        os << "\n";
    }
    return os.str();
}

} // namespace finphase
