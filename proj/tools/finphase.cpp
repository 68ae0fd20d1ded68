// finphase: runs the section-volume, oscillatory-integral and exact-lemma
// verification suites from a JSON config.  Exit codes: 0 all checks pass,
// 1 check failure, 2 config error, 3 numerical failure.

#include "finphase/multipoly.hpp"
#include "finphase/oscillatory.hpp"
#include "finphase/polydetect.hpp"
#include "finphase/sections.hpp"
#include "finphase/stphase.hpp"
#include "finphase/surfaces.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace finphase;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct GridSpec {
    double lo = 0, hi = 0;
    int count = 0;
    bool log = true;

    std::vector<double> points() const {
        std::vector<double> out;
        if (count == 1) {
            out.push_back(lo);
            return out;
        }
        for (int i = 0; i < count; ++i) {
            double s = static_cast<double>(i) / (count - 1);
            out.push_back(log ? lo * std::pow(hi / lo, s)
                              : lo + s * (hi - lo));
        }
        return out;
    }
};

GridSpec parse_grid(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("min") || !j.contains("max") ||
        !j.contains("count"))
        throw ConfigError(std::string(what) + ": need {min, max, count}");
    GridSpec g;
    g.lo = j["min"].get<double>();
    g.hi = j["max"].get<double>();
    g.count = j["count"].get<int>();
    g.log = j.value("log", true);
    if (g.count < 1 || g.lo <= 0 || g.hi < g.lo)
        throw ConfigError(std::string(what) + ": empty or unordered grid");
    return g;
}

std::vector<Vec> parse_directions(const json& j, int n) {
    std::vector<Vec> dirs;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.rfind("grid:", 0) != 0)
            throw ConfigError("directions: expected \"grid:k\" or a list");
        int k = std::stoi(s.substr(5));
        if (k < 1) throw ConfigError("directions: grid size must be >= 1");
        // deterministic cap grid around e_n
        std::mt19937_64 rng(424242);
        std::normal_distribution<double> gauss(0.0, 1.0);
        dirs.push_back(Vec::Unit(n, n - 1));
        while (static_cast<int>(dirs.size()) < k) {
            Vec v(n);
            for (int i = 0; i + 1 < n; ++i) v[i] = 0.25 * gauss(rng);
            v[n - 1] = 1.0;
            dirs.push_back(v.normalized());
        }
        return dirs;
    }
    if (!j.is_array() || j.empty())
        throw ConfigError("directions: nonempty list required");
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ConfigError("directions: each entry needs n components");
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = row[i].get<double>();
        if (v.norm() == 0) throw ConfigError("directions: zero vector");
        dirs.push_back(v.normalized()); // normalized on load
    }
    return dirs;
}

struct Config {
    GraphSurface surface;
    std::vector<Vec> directions;
    double c;
    double plateau;
    GridSpec t_grid;
    GridSpec lambda_grid;
    std::vector<int> k_list;
    std::uint64_t seed;
    int max_degree;
    std::size_t mc_samples;
    int expansion_k_max;
    double tail_factor;
    double tail_floor;
    json lemma_table;
};

Config load_config(const std::string& path, std::uint64_t seed_override,
                   bool have_seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    if (!j.contains("surface")) throw ConfigError("config: missing surface");
    GraphSurface surface = surface_from_json(j["surface"].dump());
    int n = surface.n();
    Config cfg{
        surface,
        j.contains("directions")
            ? parse_directions(j["directions"], n)
            : std::vector<Vec>{Vec::Unit(n, n - 1)},
        j.value("c", 0.3),
        j.value("plateau", 1.0 / 3.0),
        j.contains("t_grid")
            ? parse_grid(j["t_grid"], "t_grid")
            : GridSpec{1e-3, 0.25, 40, true},
        j.contains("lambda_grid")
            ? parse_grid(j["lambda_grid"], "lambda_grid")
            : GridSpec{20, 160, 16, true},
        j.value("k_list", std::vector<int>{}),
        j.value("seed", std::uint64_t{20240901}),
        j.value("max_degree", 8),
        j.value("mc_samples", std::size_t{2000000}),
        j.value("expansion_k_max", 4),
        j.value("tail_factor", 3.0),
        j.value("tail_floor", 1e-14),
        j.value("lemma_table", json::array()),
    };
    if (have_seed_override) cfg.seed = seed_override;
    if (!(cfg.c > 0)) throw ConfigError("config: c must be positive");
    return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::string dat_from_columns(const std::vector<double>& x,
                             const std::vector<double>& y) {
    std::ostringstream os;
    for (size_t i = 0; i < x.size(); ++i)
        os << fmt(x[i]) << " " << fmt(y[i]) << "\n";
    return os.str();
}

// minimal line plot, log-log when requested
std::string svg_plot(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& title, bool loglog) {
    const int W = 640, H = 420, M = 50;
    auto tx = [&](double v) { return loglog ? std::log10(v) : v; };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (size_t i = 0; i < x.size(); ++i) {
        double xv = tx(x[i]), yv = tx(std::max(y[i], loglog ? 1e-300 : y[i]));
        x0 = std::min(x0, xv); x1 = std::max(x1, xv);
        y0 = std::min(y0, yv); y1 = std::max(y1, yv);
    }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\">\n<rect width=\"100%\" height=\"100%\" "
          "fill=\"white\"/>\n<text x=\"10\" y=\"20\">" << title
       << "</text>\n<polyline fill=\"none\" stroke=\"steelblue\" "
          "stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < x.size(); ++i) {
        double px = M + (tx(x[i]) - x0) / (x1 - x0) * (W - 2 * M);
        double py = H - M - (tx(y[i]) - y0) / (y1 - y0) * (H - 2 * M);
        os << fmt(px) << "," << fmt(py) << " ";
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

struct RunFlags {
    fs::path out = "out";
    bool svg = false;
};

int cmd_volume(const Config& cfg, const RunFlags& flags) {
    json verdicts = json::array();
    for (size_t di = 0; di < cfg.directions.size(); ++di) {
        TangentFrame frame = inverse_gauss(cfg.surface, cfg.directions[di]);
        double cap = std::min(cfg.c, 0.95 * cap_height_limit(cfg.surface, frame));
        GridSpec tg = cfg.t_grid;
        tg.hi = std::min(tg.hi, cap);
        tg.lo = std::min(tg.lo, tg.hi / 2);
        VolumeProfile prof =
            volume_profile(cfg.surface, cfg.directions[di], tg.points(), cap,
                           256, cfg.seed, cfg.mc_samples);
        PolyVerdict verdict = detect(prof, cfg.max_degree);
        ExponentFit expo = leading_exponent(prof);

        std::string tag = cfg.surface.name() + "_dir" + std::to_string(di);
        write_file(flags.out / ("volume_" + tag + ".csv"), profile_to_csv(prof));
        write_file(flags.out / ("volume_" + tag + ".dat"),
                   dat_from_columns(prof.t_grid, prof.values));
        if (flags.svg)
            write_file(flags.out / ("volume_" + tag + ".svg"),
                       svg_plot(prof.t_grid, prof.values, "A(t) " + tag, false));

        json v = json::parse(verdict.to_json());
        v["direction_index"] = di;
        v["leading_exponent"] = expo.exponent;
        v["leading_exponent_err"] = expo.std_error;
        verdicts.push_back(v);
        std::cout << "volume " << tag << ": "
                  << (verdict.is_polynomial
                          ? "polynomial degree " +
                                std::to_string(*verdict.degree)
                          : "power-law exponent " +
                                fmt(verdict.exponent.value_or(
                                    expo.exponent)))
                  << "\n";
    }
    write_file(flags.out / "volume_verdicts.json", verdicts.dump(2) + "\n");
    return 0;
}

int cmd_oscillate(const Config& cfg, const RunFlags& flags) {
    if (cfg.lambda_grid.count < 1) throw ConfigError("empty lambda grid");
    bool all_pass = true;
    json report = json::array();
    std::vector<double> lg = cfg.lambda_grid.points();
    for (size_t di = 0; di < cfg.directions.size(); ++di) {
        TangentFrame frame = inverse_gauss(cfg.surface, cfg.directions[di]);
        CutoffSpec spec;
        spec.c = std::min(cfg.c, 0.95 * cap_height_limit(cfg.surface, frame));
        spec.plateau = cfg.plateau;
        OscSample sample =
            compute_osc_sample(cfg.surface, frame, spec, lg, 0, {}, false);
        std::string tag = cfg.surface.name() + "_dir" + std::to_string(di);
        write_file(flags.out / ("osc_" + tag + ".csv"),
                   osc_sample_to_csv(sample));

        // the Stokes split is the expensive part; check it on a log-spread
        // subset of the grid rather than every lambda
        std::vector<double> lg_sub;
        size_t nsub = std::min<size_t>(6, lg.size());
        for (size_t j = 0; j < nsub; ++j)
            lg_sub.push_back(lg[j * (lg.size() - 1) / std::max<size_t>(nsub - 1, 1)]);
        OscSample parts =
            compute_osc_sample(cfg.surface, frame, spec, lg_sub, 0, {});
        write_file(flags.out / ("osc_" + tag + "_stokes.csv"),
                   osc_sample_to_csv(parts));

        double sres = stokes_residual(parts);
        double d2 = decay_order(parts.F2, lg_sub);
        double d3 = decay_order(parts.F3, lg_sub);
        ExpansionFit fit = extract_expansion(sample, cfg.expansion_k_max);
        double qerr = 0;
        for (double e : sample.I_err) qerr += e * e;
        qerr = std::sqrt(qerr / sample.I_err.size());
        // tail_floor covers what the quadrature estimate cannot see: the
        // O(lambda^-infinity) cutoff remainder at the low end of the grid
        double thresh = cfg.tail_factor * std::max(qerr, cfg.tail_floor);
        bool p_stokes = sres <= 1e-5;
        bool p_decay = d2 <= -5.0 && d3 <= -5.0;
        bool p_finite = fit.tail_rms <= thresh;
        all_pass = all_pass && p_stokes && p_decay && p_finite;

        std::cout << (p_stokes ? "PASS" : "FAIL") << " stokes " << tag
                  << " residual=" << fmt(sres) << "\n"
                  << (p_decay ? "PASS" : "FAIL") << " decay " << tag
                  << " F2=" << fmt(d2) << " F3=" << fmt(d3) << "\n"
                  << (p_finite ? "PASS" : "FAIL") << " finite-expansion "
                  << tag << " tail_rms=" << fmt(fit.tail_rms)
                  << " threshold=" << fmt(thresh) << "\n";

        json r = json::parse(fit.to_json());
        r["direction_index"] = di;
        r["stokes_residual"] = sres;
        r["decay_F2"] = d2;
        r["decay_F3"] = d3;
        r["tail_threshold"] = thresh;
        r["finite_expansion"] = p_finite;
        report.push_back(r);

        for (int k : cfg.k_list) {
            if (k < 1) continue;
            OscSample sk = compute_osc_sample(cfg.surface, frame, spec, lg, k,
                                              {}, false);
            write_file(flags.out / ("osc_" + tag + "_k" + std::to_string(k) +
                                    ".csv"),
                       osc_sample_to_csv(sk));
        }
        if (flags.svg) {
            std::vector<double> absI;
            for (const Cplx& v : sample.I) absI.push_back(std::abs(v));
            write_file(flags.out / ("osc_" + tag + ".svg"),
                       svg_plot(lg, absI, "|I(lambda)| " + tag, true));
        }
    }
    write_file(flags.out / "oscillate_report.json", report.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int cmd_lemmas(const Config& cfg, const RunFlags& flags) {
    json table = cfg.lemma_table;
    if (table.empty())
        table = json::parse(
            R"([{"m":5,"alpha":1,"n":3,"N0":2},{"m":6,"alpha":2,"n":3,"N0":2},
                {"m":7,"alpha":2,"n":4,"N0":3}])");
    bool all_pass = true;
    json report = json::array();
    std::mt19937_64 rng(cfg.seed);
    for (const auto& row : table) {
        int m = row.at("m").get<int>();
        int alpha = row.at("alpha").get<int>();
        int n = row.at("n").get<int>();
        int N0 = row.at("N0").get<int>();
        int d = n - 1;
        LeadingTermIndices lti = leading_term_indices(m, alpha, n, N0);

        // random nonzero homogeneous H of degree m in the chart variables
        MultiPoly H(d);
        std::uniform_int_distribution<int> coeff(-5, 5);
        for (int tries = 0; H.is_zero(); ++tries) {
            H = MultiPoly(d);
            Exponents e(static_cast<size_t>(d), 0);
            std::function<void(int, int)> emit = [&](int i, int left) {
                if (i == d - 1) {
                    e[i] = left;
                    H.add_term(e, Rational(coeff(rng)));
                    return;
                }
                for (int k = 0; k <= left; ++k) {
                    e[i] = k;
                    emit(i + 1, left - k);
                }
            };
            emit(0, m);
            (void)tries;
        }
        DeltaVanishing dv = delta_vanishing_check(H, m, alpha);
        DeltaVanishing dz =
            delta_vanishing_check(MultiPoly(d), m, alpha);
        bool p_nonzero = dv.value > 0 && dv.identity_ok;
        bool p_zero = dz.value == 0 && dz.identity_ok;
        bool c_prod_nonzero =
            descending_factor_product(m * alpha, n) != 0 &&
            radial_laplacian_constant(m * alpha, d) != 0;
        bool pass = p_nonzero && p_zero && c_prod_nonzero;
        all_pass = all_pass && pass;

        std::ostringstream val;
        val << dv.value;
        json r;
        r["m"] = m;
        r["alpha"] = alpha;
        r["n"] = n;
        r["N0"] = N0;
        r["indices"] = json::parse(lti.to_json());
        r["delta_value"] = val.str();
        r["identity_ok"] = dv.identity_ok;
        r["zero_case_ok"] = p_zero;
        r["pass"] = pass;
        report.push_back(r);
        std::cout << (pass ? "PASS" : "FAIL") << " lemmas m=" << m
                  << " alpha=" << alpha << " n=" << n
                  << " collision=" << (lti.collision ? "true" : "false")
                  << " alpha_star=" << lti.alpha_star << "\n";
    }
    write_file(flags.out / "lemmas_report.json", report.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite stationary-phase verification suites"};
    app.require_subcommand(1);

    std::string config_path;
    RunFlags flags;
    int jobs = 0;
    std::uint64_t seed_override = 0;
    bool have_seed = false;

    std::string out_str = "out";
    app.add_option("--out", out_str, "output directory");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)");
    auto* seed_opt = app.add_option("--seed", seed_override, "RNG seed");
    app.add_flag("--svg", flags.svg, "also write SVG line plots");

    auto add_sub = [&](const char* name, const char* desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("config", config_path, "config JSON")->required();
        s->fallthrough();
        return s;
    };
    CLI::App* s_volume = add_sub("volume", "section-volume profiles + verdicts");
    CLI::App* s_osc = add_sub("oscillate", "oscillatory integral checks");
    CLI::App* s_lemmas = add_sub("lemmas", "exact lemma suite");
    CLI::App* s_all = add_sub("all", "run every suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    flags.out = out_str;
    have_seed = seed_opt->count() > 0;
    set_max_threads(jobs);

    try {
        fs::create_directories(flags.out);
        Config cfg = load_config(config_path, seed_override, have_seed);
        int rc = 0;
        if (s_volume->parsed() || s_all->parsed())
            rc = std::max(rc, cmd_volume(cfg, flags));
        if (s_osc->parsed() || s_all->parsed())
            rc = std::max(rc, cmd_oscillate(cfg, flags));
        if (s_lemmas->parsed() || s_all->parsed())
            rc = std::max(rc, cmd_lemmas(cfg, flags));
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
