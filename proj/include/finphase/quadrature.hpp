#ifndef FINPHASE_QUADRATURE_HPP
#define FINPHASE_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <vector>

namespace finphase {

struct GaussRule {
    std::vector<double> nodes;   // on [-1,1]
    std::vector<double> weights;
};

// Gauss-Legendre rule, computed by Newton iteration on P_n and cached.
const GaussRule& gauss_legendre(int n);

using Cplx = std::complex<double>;

// sum over n_panels equal panels of [a,b], fixed accumulation order
Cplx integrate_panels_1d(const std::function<Cplx(double)>& f,
                         double a, double b, int n_panels, int gl_order);

double integrate_panels_1d_real(const std::function<double(double)>& f,
                                double a, double b, int n_panels, int gl_order);

// Evaluates fn(row) for row = 0..nrows-1 on a thread pool and returns the
// results indexed by row, so callers can reduce in a fixed order.
std::vector<Cplx> map_rows(int nrows, const std::function<Cplx(int)>& fn);

// Worker-pool size used by map_rows and other internal parallel loops;
// 0 (default) means hardware concurrency.  Thread counts never affect
// results: all reductions happen in a fixed order.
void set_max_threads(int n);
int max_threads();

} // namespace finphase

#endif
