#include "finphase/sections.hpp"

#include "finphase/quadrature.hpp"

#include <cmath>
#include <atomic>
#include <thread>
#include <random>
#include <sstream>
#include <stdexcept>

namespace finphase {

namespace {

// signed "above the graph" margin at a point of the slice plane
inline double side(const GraphSurface& s, const Vec& x) {
    return x[s.n() - 1] - s.f(x.head(s.n() - 1));
}

// Root of side() along pc + s*v, s > 0.  side is concave along the ray
// (f convex), so there is a single crossing; bisection after bracketing.
double boundary_root(const GraphSurface& s,
                     const Vec& pc, const Vec& v, double s_init) {
    double lo = 0.0, hi = s_init;
    if (side(s, pc) <= 0)
        throw std::runtime_error("section_volume: slice center not interior");
    int guard = 0;
    while (side(s, pc + hi * v) > 0) {
        lo = hi;
        hi *= 2.0;
        Vec xp = (pc + hi * v).head(s.n() - 1);
        if (xp.norm() > s.r_dom())
            throw std::runtime_error("section_volume: slice escapes chart ball");
        if (++guard > 200)
            throw std::runtime_error("section_volume: root bracketing failed");
    }
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (side(s, pc + mid * v) > 0) lo = mid; else hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

double radial_area(const GraphSurface& s, const TangentFrame& frame,
                   const Vec& pc, double s_init, int nodes) {
    // A = 1/2 int_0^{2pi} r(phi)^2 dphi, Gauss-Legendre on [0, 2pi]
    const GaussRule& gl = gauss_legendre(nodes);
    double acc = 0;
    for (int i = 0; i < nodes; ++i) {
        double phi = M_PI * (gl.nodes[i] + 1.0);
        Vec v = std::cos(phi) * frame.frame.col(0) + std::sin(phi) * frame.frame.col(1);
        double r = boundary_root(s, pc, v, s_init);
        acc += gl.weights[i] * 0.5 * r * r;
    }
    return M_PI * acc; // jacobian of phi = pi*(u+1)
}

template <typename F>
void parallel_for(int n, F&& body) {
    unsigned nt = std::min<unsigned>(static_cast<unsigned>(max_threads()), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace

SectionResult section_volume(const GraphSurface& surface, const TangentFrame& frame,
                             double t, int angular_nodes, std::uint64_t seed,
                             std::size_t mc_samples) {
    if (!(t > 0)) throw std::invalid_argument("section_volume: t > 0 required");
    int n = surface.n();
    Vec pc = frame.a + t * frame.xi;
    double s_init = std::sqrt(2.0 * t / surface.convexity_margin());

    if (n == 2) {
        double sp = boundary_root(surface, pc, frame.frame.col(0), s_init);
        double sm = boundary_root(surface, pc, -frame.frame.col(0), s_init);
        return {sp + sm, 1e-11 * (sp + sm)};
    }
    if (n == 3) {
        double fine = radial_area(surface, frame, pc, s_init, angular_nodes);
        double coarse = radial_area(surface, frame, pc, s_init, angular_nodes / 2);
        double err = std::abs(fine - coarse) + 1e-11 * std::abs(fine);
        return {fine, err};
    }

    // n >= 4: Monte Carlo over a bounding box in the hyperplane
    int d = n - 1; // plane dimension
    double R = 0;
    std::mt19937_64 probe_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    auto probe = [&](const Vec& v) {
        R = std::max(R, boundary_root(surface, pc, v, s_init));
    };
    for (int j = 0; j < d; ++j) {
        probe(frame.frame.col(j));
        probe(-frame.frame.col(j));
    }
    for (int k = 0; k < 16; ++k) {
        Vec y(d);
        for (int j = 0; j < d; ++j) y[j] = gauss(probe_rng);
        probe(frame.frame * (y / y.norm()));
    }
    R *= 1.05;

    const unsigned nchunks = 64;
    std::vector<std::size_t> hits(nchunks, 0);
    std::size_t per_chunk = mc_samples / nchunks;
    parallel_for(nchunks, [&](int chunk) {
        std::mt19937_64 rng(seed + 1000003ULL * (chunk + 1));
        std::uniform_real_distribution<double> unif(-R, R);
        std::size_t h = 0;
        Vec y(d), x(n);
        for (std::size_t i = 0; i < per_chunk; ++i) {
            for (int j = 0; j < d; ++j) y[j] = unif(rng);
            x = pc + frame.frame * y;
            Vec xp = x.head(d);
            if (xp.norm() <= surface.r_dom() && side(surface, x) >= 0) ++h;
        }
        hits[chunk] = h;
    });
    std::size_t total = per_chunk * nchunks, h = 0;
    for (auto v : hits) h += v;
    double p = double(h) / double(total);
    double box = std::pow(2.0 * R, d);
    double value = box * p;
    double err = box * std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(total));
    return {value, err};
}

VolumeProfile volume_profile(const GraphSurface& surface, const Vec& xi,
                             const std::vector<double>& t_grid, double c,
                             int angular_nodes, std::uint64_t seed,
                             std::size_t mc_samples) {
    for (size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw std::invalid_argument("volume_profile: t_grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.back() > c)
        throw std::invalid_argument("volume_profile: max(t_grid) > c");

    TangentFrame frame = inverse_gauss(surface, xi);
    VolumeProfile p;
    p.xi = frame.xi;
    p.t_grid = t_grid;
    p.c = c;
    p.seed = seed;
    p.method = surface.n() == 2 ? "chord"
             : surface.n() == 3 ? "radial_quadrature" : "monte_carlo";
    p.values.resize(t_grid.size());
    p.err.resize(t_grid.size());
    int nt = static_cast<int>(t_grid.size());
    if (surface.n() >= 4) {
        // MC points are internally parallel; keep the t loop serial
        for (int i = 0; i < nt; ++i) {
            auto r = section_volume(surface, frame, t_grid[i], angular_nodes, seed, mc_samples);
            p.values[i] = r.value;
            p.err[i] = r.err;
        }
    } else {
        parallel_for(nt, [&](int i) {
            auto r = section_volume(surface, frame, t_grid[i], angular_nodes, seed, mc_samples);
            p.values[i] = r.value;
            p.err[i] = r.err;
        });
    }
    return p;
}

ExponentFit leading_exponent(const VolumeProfile& profile) {
    double t_min = profile.t_grid.front();
    std::vector<double> lx, ly;
    for (size_t i = 0; i < profile.t_grid.size(); ++i) {
        if (profile.t_grid[i] <= 10.0 * t_min) {
            if (!(profile.values[i] > 0))
                throw std::runtime_error("leading_exponent: non-positive profile value");
            lx.push_back(std::log(profile.t_grid[i]));
            ly.push_back(std::log(profile.values[i]));
        }
    }
    size_t m = lx.size();
    if (m < 6) throw std::invalid_argument("leading_exponent: need >= 6 points in the smallest decade");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double inter = (sy - slope * sx) / m;
    double ss = 0;
    for (size_t i = 0; i < m; ++i) {
        double r = ly[i] - slope * lx[i] - inter;
        ss += r * r;
    }
    double se = std::sqrt(ss / std::max<size_t>(m - 2, 1) * m / denom);
    return {slope, se};
}

double default_cap_height(const GraphSurface& surface, const TangentFrame& frame) {
    double c = 0.3;
    double limit = 0.8 * surface.r_dom();
    for (int it = 0; it < 60; ++it) {
        bool ok = true;
        try {
            Vec pc = frame.a + c * frame.xi;
            double s_init = std::sqrt(2.0 * c / surface.convexity_margin());
            for (int j = 0; j < surface.n() - 1 && ok; ++j) {
                for (double sgn : {1.0, -1.0}) {
                    double r = boundary_root(surface, pc,
                                             sgn * frame.frame.col(j), s_init);
                    Vec xp = (pc + r * sgn * frame.frame.col(j)).head(surface.n() - 1);
                    if (xp.norm() > limit) { ok = false; break; }
                }
            }
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok) return c;
        c *= 0.75;
    }
    throw std::runtime_error("default_cap_height: no admissible cap height found");
}

SectionResult cap_volume_mc(const GraphSurface& surface, const TangentFrame& frame,
                            double c, std::size_t n_samples, std::uint64_t seed) {
    int n = surface.n(), d = n - 1;
    // bounding box in graph coordinates: |x'|_inf <= R, 0 <= x_n <= H
    Vec pc = frame.a + c * frame.xi;
    double s_init = std::sqrt(2.0 * c / surface.convexity_margin());
    double R = 0;
    for (int j = 0; j < d; ++j) {
        for (double sgn : {1.0, -1.0}) {
            double r = boundary_root(surface, pc, sgn * frame.frame.col(j), s_init);
            Vec xp = (pc + r * sgn * frame.frame.col(j)).head(d);
            R = std::max(R, xp.template lpNorm<Eigen::Infinity>());
        }
    }
    R *= 1.1;
    double xin = frame.xi[n - 1];
    double H = (c + frame.h + frame.xi.head(d).cwiseAbs().sum() * R) / xin + 1e-9;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(-R, R), uh(0.0, H);
    std::size_t hits = 0;
    Vec x(n);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (int j = 0; j < d; ++j) x[j] = ur(rng);
        x[n - 1] = uh(rng);
        if (x.head(d).norm() > surface.r_dom()) continue;
        if (x[n - 1] >= surface.f(x.head(d)) && x.dot(frame.xi) - frame.h <= c) ++hits;
    }
    double p = double(hits) / double(n_samples);
    double box = std::pow(2.0 * R, d) * H;
    return {box * p, box * std::sqrt(std::max(p * (1 - p), 1e-12) / double(n_samples))};
}

std::string profile_to_csv(const VolumeProfile& p) {
    std::ostringstream os;
    os.precision(17);
    os << "# xi =";
    for (int i = 0; i < p.xi.size(); ++i) os << " " << p.xi[i];
    os << ", c = " << p.c << ", method = " << p.method << ", seed = " << p.seed << "\n";
    os << "t,A,err\n";
    for (size_t i = 0; i < p.t_grid.size(); ++i)
        os << p.t_grid[i] << "," << p.values[i] << "," << p.err[i] << "\n";
    return os.str();
}

} // namespace finphase
