#include "finphase/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace finphase {

namespace {

GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p1 = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, pm;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                pm = p0;
                p0 = p1;
                p1 = ((2 * k - 1) * x * p0 - (k - 1) * pm) / k;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                p1 = dp;
                break;
            }
            p1 = dp;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * p1 * p1);
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: bad order");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

Cplx integrate_panels_1d(const std::function<Cplx(double)>& f,
                         double a, double b, int n_panels, int gl_order) {
    const GaussRule& gl = gauss_legendre(gl_order);
    double h = (b - a) / n_panels;
    Cplx sum = 0;
    for (int p = 0; p < n_panels; ++p) {
        double lo = a + p * h;
        Cplx s = 0;
        for (size_t i = 0; i < gl.nodes.size(); ++i)
            s += gl.weights[i] * f(lo + 0.5 * h * (gl.nodes[i] + 1.0));
        sum += 0.5 * h * s;
    }
    return sum;
}

double integrate_panels_1d_real(const std::function<double(double)>& f,
                                double a, double b, int n_panels, int gl_order) {
    const GaussRule& gl = gauss_legendre(gl_order);
    double h = (b - a) / n_panels;
    double sum = 0;
    for (int p = 0; p < n_panels; ++p) {
        double lo = a + p * h;
        double s = 0;
        for (size_t i = 0; i < gl.nodes.size(); ++i)
            s += gl.weights[i] * f(lo + 0.5 * h * (gl.nodes[i] + 1.0));
        sum += 0.5 * h * s;
    }
    return sum;
}

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
    int n = g_max_threads.load();
    if (n > 0) return n;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<Cplx> map_rows(int nrows, const std::function<Cplx(int)>& fn) {
    std::vector<Cplx> out(nrows);
    unsigned nt = static_cast<unsigned>(max_threads());
    nt = std::min<unsigned>(nt, nrows > 0 ? nrows : 1);
    if (nt <= 1) {
        for (int r = 0; r < nrows; ++r) out[r] = fn(r);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int r = next.fetch_add(1);
                if (r >= nrows) return;
                out[r] = fn(r);
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

} // namespace finphase
