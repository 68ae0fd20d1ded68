#include "finphase/polydetect.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace finphase {

namespace {

// coefficients of T_j in the power basis of its argument
std::vector<std::vector<double>> cheb_power_coeffs(int jmax) {
    std::vector<std::vector<double>> T(jmax + 1);
    T[0] = {1.0};
    if (jmax >= 1) T[1] = {0.0, 1.0};
    for (int j = 2; j <= jmax; ++j) {
        T[j].assign(j + 1, 0.0);
        for (size_t k = 0; k < T[j - 1].size(); ++k) T[j][k + 1] += 2.0 * T[j - 1][k];
        for (size_t k = 0; k < T[j - 2].size(); ++k) T[j][k] -= T[j - 2][k];
    }
    return T;
}

// expand p(y) with y = s*t - 1 into powers of t
std::vector<double> substitute_affine(const std::vector<double>& p, double s) {
    std::vector<double> out(p.size(), 0.0);
    std::vector<double> ypow = {1.0}; // (s t - 1)^k
    for (size_t k = 0; k < p.size(); ++k) {
        for (size_t i = 0; i < ypow.size(); ++i) out[i] += p[k] * ypow[i];
        // multiply ypow by (s t - 1)
        std::vector<double> nxt(ypow.size() + 1, 0.0);
        for (size_t i = 0; i < ypow.size(); ++i) {
            nxt[i] -= ypow[i];
            nxt[i + 1] += s * ypow[i];
        }
        ypow = std::move(nxt);
    }
    return out;
}

} // namespace

PolyFit fit_poly(const VolumeProfile& profile, int degree) {
    int N = static_cast<int>(profile.t_grid.size());
    if (degree < 1) throw std::invalid_argument("fit_poly: degree >= 1 required");
    if (N < degree + 3) throw std::invalid_argument("fit_poly: need at least degree+3 points");

    double t_max = profile.t_grid.back();
    auto T = cheb_power_coeffs(degree);
    auto tau = [t_max](double t) { return 2.0 * t / t_max - 1.0; };
    auto cheb = [&](int j, double y) {
        double v = 0, p = 1;
        for (int k = 0; k <= j; ++k) {
            v += T[j][k] * p;
            p *= y;
        }
        return v;
    };

    Eigen::MatrixXd A(N, degree);
    Eigen::VectorXd b(N), w(N);
    for (int i = 0; i < N; ++i) {
        double sigma = std::max(profile.err[i], 1e-14);
        w[i] = 1.0 / sigma;
        double y = tau(profile.t_grid[i]);
        for (int j = 1; j <= degree; ++j) {
            // basis vanishing at t=0: T_j(tau(t)) - T_j(-1)
            double tj0 = (j % 2 == 0) ? 1.0 : -1.0;
            A(i, j - 1) = (cheb(j, y) - tj0) * w[i];
        }
        b[i] = profile.values[i] * w[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) /
                  svd.singularValues()(svd.singularValues().size() - 1);
    if (cond > 1e12)
        throw std::runtime_error("fit_poly: ill-conditioned system, cond ~ " +
                                 std::to_string(cond));
    Eigen::VectorXd c = svd.solve(b);

    double ss = 0;
    for (int i = 0; i < N; ++i) {
        double r = (b[i] - A.row(i).dot(c)) / w[i];
        ss += r * r;
    }

    // back to the monomial basis in t
    std::vector<double> mono(degree + 1, 0.0);
    for (int j = 1; j <= degree; ++j) {
        auto pj = substitute_affine(T[j], 2.0 / t_max); // T_j(2t/t_max - 1) in powers of t
        double tj0 = (j % 2 == 0) ? 1.0 : -1.0;
        pj[0] -= tj0;
        for (size_t k = 0; k < pj.size(); ++k) mono[k] += c[j - 1] * pj[k];
    }
    PolyFit fit;
    fit.coeffs.assign(mono.begin() + 1, mono.end()); // constant term is exactly cancelled
    fit.residual_rms = std::sqrt(ss / N);
    fit.condition = cond;
    return fit;
}

PolyVerdict detect(const VolumeProfile& profile, int max_degree) {
    if (max_degree < 1) throw std::invalid_argument("detect: max_degree >= 1 required");
    int N = static_cast<int>(profile.t_grid.size());

    double err2 = 0;
    for (double e : profile.err) err2 += e * e;
    double threshold = 3.0 * std::sqrt(err2 / N);

    PolyVerdict v;
    v.threshold = threshold;

    PolyFit best{};
    int best_deg = 0;
    for (int deg = 1; deg <= max_degree && N >= deg + 3; ++deg) {
        PolyFit f = fit_poly(profile, deg);
        if (best_deg == 0 || f.residual_rms < best.residual_rms) {
            best = f;
            best_deg = deg;
        }
        if (f.residual_rms <= threshold) {
            v.is_polynomial = true;
            v.degree = deg;
            v.coeffs = f.coeffs;
            v.residual_rms = f.residual_rms;
            return v;
        }
    }

    // no polynomial degree passed; compare against a power law
    v.is_polynomial = false;
    v.coeffs = best.coeffs;
    v.residual_rms = best.residual_rms;
    try {
        ExponentFit ef = leading_exponent(profile);
        // kappa from LS intercept over all points
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < N; ++i) {
            double lx = std::log(profile.t_grid[i]);
            double ly = std::log(profile.values[i]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        double alpha = (N * sxy - sx * sy) / (N * sxx - sx * sx);
        double kappa = std::exp((sy - alpha * sx) / N);
        double ssp = 0;
        for (int i = 0; i < N; ++i) {
            double r = profile.values[i] - kappa * std::pow(profile.t_grid[i], alpha);
            ssp += r * r;
        }
        double rms_pow = std::sqrt(ssp / N);
        double ic_pow = N * std::log(std::max(rms_pow * rms_pow, 1e-300)) + 2.0 * 2;
        double ic_poly = N * std::log(std::max(best.residual_rms * best.residual_rms, 1e-300)) +
                         2.0 * best_deg;
        if (ic_pow < ic_poly) {
            v.exponent = ef.exponent;
            v.exponent_err = ef.std_error;
        }
    } catch (const std::exception&) {
        // power-law fit unavailable (e.g. non-positive values); keep poly verdict
    }
    return v;
}

std::string PolyVerdict::to_json() const {
    nlohmann::json j;
    j["is_polynomial"] = is_polynomial;
    if (degree) j["degree"] = *degree; else j["degree"] = nullptr;
    j["coeffs"] = coeffs;
    j["residual_rms"] = residual_rms;
    j["threshold"] = threshold;
    if (exponent) {
        j["exponent"] = *exponent;
        j["exponent_err"] = exponent_err.value_or(0.0);
    }
    return j.dump();
}

} // namespace finphase
