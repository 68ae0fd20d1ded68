#include "finphase/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace finphase {

namespace {

// g(s) = E(s)/(E(s)+E(1-s)), E(s) = exp(-1/s) for s>0, else 0;
// g(0)=0, g(1)=1, all derivatives vanish at both ends.
void bump(double s, double& g, double& g1, double& g2) {
    if (s <= 0) { g = g1 = g2 = 0; return; }
    if (s >= 1) { g = 1; g1 = g2 = 0; return; }
    double a = std::exp(-1.0 / s);
    double b = std::exp(-1.0 / (1.0 - s));
    double u = 1.0 / (s * s);                    // a' = a*u
    double v = 1.0 / ((1.0 - s) * (1.0 - s));    // b' = -b*v
    double ap = a * u;
    double bp = -b * v;
    double app = a * (u * u - 2.0 / (s * s * s));
    double bpp = b * (v * v - 2.0 / std::pow(1.0 - s, 3));
    double w = a + b, wp = ap + bp, wpp = app + bpp;
    g = a / w;
    g1 = (ap * w - a * wp) / (w * w);
    double num = app * w - a * wpp;
    g2 = (num * w - 2.0 * (ap * w - a * wp) * wp) / (w * w * w);
}

} // namespace

double cutoff_eval(const CutoffSpec& spec, double t, int deriv) {
    if (!(spec.c > 0) || !(spec.plateau > 0) || !(spec.plateau < 1))
        throw std::invalid_argument("cutoff_eval: bad CutoffSpec");
    double at = std::abs(t);
    double p = spec.plateau * spec.c;
    if (at <= p) return deriv == 0 ? 1.0 : 0.0;
    if (at >= spec.c) return 0.0;
    // s runs from 1 at |t|=p down to 0 at |t|=c
    double width = spec.c - p;
    double s = (spec.c - at) / width;
    double g, g1, g2;
    bump(s, g, g1, g2);
    double ds = -((t >= 0) ? 1.0 : -1.0) / width; // ds/dt
    switch (deriv) {
        case 0: return g;
        case 1: return g1 * ds;
        case 2: return g2 * ds * ds;
        default: throw std::invalid_argument("cutoff_eval: deriv must be 0, 1 or 2");
    }
}

} // namespace finphase
