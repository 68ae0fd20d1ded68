#ifndef FINPHASE_SURFACES_HPP
#define FINPHASE_SURFACES_HPP

#include "finphase/multipoly.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

namespace finphase {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class QuadricKind { ellipsoid, two_sheet_hyperboloid, elliptic_paraboloid };

struct QuadricSpec {
    QuadricKind kind;
    std::vector<double> a; // positive coefficients, see make_quadric
};

// Strictly convex hypersurface as a graph x_n = f(x') over a ball of radius
// r_dom about 0, pre-normalized so f(0)=0, grad f(0)=0 and the inward normal
// at the origin is e_n.
class GraphSurface {
public:
    GraphSurface(int n,
                 std::function<double(const Vec&)> f,
                 std::function<Vec(const Vec&)> grad,
                 std::function<Mat(const Vec&)> hess,
                 double r_dom, double convexity_margin,
                 std::optional<MultiPoly> taylor = std::nullopt,
                 std::string name = "custom");

    static GraphSurface from_poly(const MultiPoly& f_poly, double r_dom,
                                  std::string name = "custom_poly");

    int n() const { return n_; }
    int d() const { return n_ - 1; } // chart dimension
    double f(const Vec& xp) const { return f_(xp); }
    Vec grad(const Vec& xp) const { return grad_(xp); }
    Mat hess(const Vec& xp) const { return hess_(xp); }
    double r_dom() const { return r_dom_; }
    double convexity_margin() const { return margin_; }
    const std::optional<MultiPoly>& taylor() const { return taylor_; }
    const std::string& name() const { return name_; }

    // point on M over xp, and the inward unit normal there
    Vec point(const Vec& xp) const;
    Vec inward_normal(const Vec& xp) const;

private:
    int n_;
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
    std::function<Mat(const Vec&)> hess_;
    double r_dom_;
    double margin_;
    std::optional<MultiPoly> taylor_;
    std::string name_;
};

// Tangency data at a chart direction xi.
struct TangentFrame {
    Vec xi;     // unit inward normal, |xi| = 1
    Vec a;      // tangency point gamma^{-1}(xi) on M
    Vec ap;     // chart coordinates of a (first n-1 components)
    double h;   // support value <a, xi>
    Mat frame;  // n x (n-1), orthonormal basis of xi^perp
    double residual; // gradient residual of the Newton solve
};

GraphSurface make_quadric(const QuadricSpec& spec, int n, int taylor_degree = 12);

// Solves grad f(a') = -xi'/xi_n by damped Newton; throws on non-convergence.
TangentFrame inverse_gauss(const GraphSurface& surface, const Vec& xi,
                           double tol = 1e-12, int max_iter = 100);

double gaussian_curvature(const GraphSurface& surface, const Vec& ap);

// Degree-2 truncation of the Taylor expansion at 0.
MultiPoly osculating_paraboloid(const GraphSurface& surface);

// Largest k <= k_max with Taylor components of degrees 3..k all zero;
// returns k_max+1 ("infinity within k_max") when everything beyond 2 vanishes.
int contact_order(const GraphSurface& surface, int k_max);

// Chart radius about a' of the cap footprint {x' : phi(x') <= c}, where
// phi(x') = <xi,(x',f(x'))> - h.  phi is convex with its minimum 0 at a',
// so ray bisection is exact; returns +inf when the cap leaves the chart ball
// of radius 0.95 * r_dom.
double cap_footprint_radius(const GraphSurface& surface, const TangentFrame& frame,
                            double c, int n_rays = 64);

// Largest c whose footprint stays inside 0.8 * r_dom (min of phi over the
// sampled boundary rays).
double cap_height_limit(const GraphSurface& surface, const TangentFrame& frame,
                        int n_rays = 128);

// Surface definition JSON: {"kind": ..., "a": [...], "n": ..., "taylor_degree": ...}
// or {"kind":"custom_poly", "poly": <MultiPoly JSON>, "r_dom": ...}.
GraphSurface surface_from_json(const std::string& json_text);

} // namespace finphase

#endif
