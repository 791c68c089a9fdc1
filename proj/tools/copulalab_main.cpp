// Command-line front end: construct family members, run class checks, and
// reproduce the quantitative tables as CSV/JSON.
//
//   copulalab construct --family c_theta --theta 0.7 --grid 128 --out ct.grid
//   copulalab check --family q_c --base m2 --which copula --grid 9
//   copulalab experiment tv-vs-d1 --grid 2048 --format csv
//
// Exit codes: 0 success/pass, 1 checked-property failure, 2 usage or
// configuration error. COPULA_LAB_THREADS caps sweep parallelism (0 = auto).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "copulalab/core.hpp"
#include "copulalab/families.hpp"
#include "copulalab/metrics.hpp"
#include "copulalab/registry.hpp"
#include "copulalab/witness.hpp"
#include "json.hpp"

namespace {

using namespace copulalab;
using nlohmann::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ----------------------------------------------------------------------------
// Table output
// ----------------------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    void write_csv(std::ostream& os) const {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                os << row[c] << (c + 1 < row.size() ? "," : "\n");
    }

    void write_json(std::ostream& os) const {
        json out = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c)
                obj[columns[c]] = row[c];
            out.push_back(obj);
        }
        os << out.dump(2) << '\n';
    }
};

void emit(const Table& table, const std::string& out_path, const std::string& format) {
    std::ostringstream buffer;
    if (format == "json")
        table.write_json(buffer);
    else
        table.write_csv(buffer);
    if (out_path.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open output file " + out_path);
        os << buffer.str();
    }
}

// ----------------------------------------------------------------------------
// Family flags -> descriptor
// ----------------------------------------------------------------------------

struct FamilyFlags {
    std::string family;
    std::string config_path;
    std::optional<double> theta, c, a, lambda, alpha, r, t0, delta_exp, tol;
    std::optional<int> n, big_n, depth, max_iter;
    std::string base;

    json descriptor() const {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot open config file " + config_path);
            json parsed;
            try {
                parsed = json::parse(is);
            } catch (const json::exception& e) {
                throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
            }
            return parsed;
        }
        if (family.empty()) throw std::invalid_argument("missing --family (or --config)");
        json params = json::object();
        auto put = [&params](const char* key, const auto& opt) {
            if (opt) params[key] = *opt;
        };
        put("theta", theta);
        put("c", c);
        put("a", a);
        put("lambda", lambda);
        put("alpha", alpha);
        put("r", r);
        put("t0", t0);
        put("delta_exp", delta_exp);
        put("tol", tol);
        put("n", n);
        put("N", big_n);
        put("depth", depth);
        put("max_iter", max_iter);
        if (!base.empty()) params["base"] = base;
        json out{{"family", family}};
        if (!params.empty()) out["params"] = params;
        return out;
    }
};

void add_family_flags(CLI::App* cmd, FamilyFlags& flags) {
    cmd->add_option("--family", flags.family, "family name (see 'experiment --help')");
    cmd->add_option("--config", flags.config_path, "JSON descriptor file {family, params}");
    cmd->add_option("--theta", flags.theta, "c_theta parameter in [2/3, 3/4]");
    cmd->add_option("--c", flags.c, "c_lip / c_lambda / a_alpha parameter in [0,1]");
    cmd->add_option("--a", flags.a, "d_lip / c_lambda / a_alpha parameter in [1/2,1]");
    cmd->add_option("--lambda", flags.lambda, "mixture weight in [0,1]");
    cmd->add_option("--alpha", flags.alpha, "almost-disjoint index in [0,1]");
    cmd->add_option("--r", flags.r, "corner matrix parameter in (0,1/2)");
    cmd->add_option("--t0", flags.t0, "omega_tilde splice point in (0,1)");
    cmd->add_option("--delta-exp", flags.delta_exp, "diagonal exponent, delta(t) = t^e");
    cmd->add_option("--inv-tol", flags.tol, "invariant-copula stopping tolerance");
    cmd->add_option("--n", flags.n, "dimension (lift) or family index (c_n)");
    cmd->add_option("--N", flags.big_n, "blocks per axis for the interval shuffles");
    cmd->add_option("--depth", flags.depth, "a_alpha truncation depth");
    cmd->add_option("--max-iter", flags.max_iter, "invariant-copula iteration cap");
    cmd->add_option("--base", flags.base, "base family name for phi/q_c/lift/shuffles");
}

// ----------------------------------------------------------------------------
// Experiments
// ----------------------------------------------------------------------------

Table experiment_d1_vs_dinf(int grid, double tol) {
    using namespace families;
    const DependenceFunction pi = frechet(FrechetKind::Pi, 2);
    const DependenceFunction m = frechet(FrechetKind::M, 2);
    Table t;
    t.columns = {"N", "dinf_theta_vs_pi", "d1_psi_vs_pi", "sandwich_lower", "sandwich_upper",
                 "dinf_grid", "d1_grid", "tolerance"};
    for (int N : {2, 3, 4, 6, 8}) {
        const double n2 = static_cast<double>(N) * N;
        const double n4 = n2 * n2;
        const double lower = (2.0 * n4 - 3.0 * n2 + 1.0) / (6.0 * n4);
        const double upper = (2.0 * n4 + 3.0 * n2 + 1.0) / (6.0 * n4);
        const double dinf = metrics::d_inf(theta_shuffle(m, N), pi, 512).value;
        const double d1 = metrics::d1(psi_diagonal(m, N), pi, grid).value;
        t.add_row({std::to_string(N), fmt(dinf), fmt(d1), fmt(lower), fmt(upper), "512",
                   std::to_string(grid), fmt(tol)});
    }
    return t;
}

Table experiment_tv_vs_d1(int grid, double tol) {
    using namespace families;
    const DependenceFunction pi = frechet(FrechetKind::Pi, 2);
    Table t;
    t.columns = {"n", "d1", "d1_bound", "tv", "tv_limit", "grid", "tolerance"};
    const double tv_limit = 2.0 / (std::numbers::pi * std::numbers::pi);
    for (int n : {1, 2, 5, 10}) {
        const DependenceFunction cn = c_n_oscillating(n);
        const double d1 = metrics::d1(cn, pi, grid).value;
        const double tv = metrics::total_variation(cn, pi, grid).value;
        const double bound = 1.0 / (std::numbers::pi * std::numbers::pi * n);
        t.add_row({std::to_string(n), fmt(d1), fmt(bound), fmt(tv), fmt(tv_limit),
                   std::to_string(grid), fmt(tol)});
    }
    return t;
}

Table experiment_max_asym(int grid, double tol, std::uint64_t seed) {
    using namespace families;
    const int m = (grid % 3 == 0) ? grid : grid + (3 - grid % 3);
    Table t;
    t.columns = {"case", "value", "expected", "grid", "tolerance"};
    std::vector<DependenceFunction> images;
    for (const char* name : {"pi2", "m2", "w2"}) {
        DependenceFunction base = registry::from_descriptor(json{{"family", name}});
        DependenceFunction image = phi_max_asym(base);
        t.add_row({"phi(" + std::string(name) + ")", fmt(metrics::asymmetry(image, m).value),
                   fmt(1.0 / 3.0), std::to_string(m), fmt(tol)});
        images.push_back(std::move(image));
    }
    Lcg64 rng(seed);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> weights;
        for (std::size_t k = 0; k < images.size(); ++k) weights.push_back(rng.next_unit() + 1e-12);
        const DependenceFunction mixture = convex_mixture(images, weights);
        t.add_row({"phi-mixture-" + std::to_string(trial),
                   fmt(metrics::asymmetry(mixture, m).value), fmt(1.0 / 3.0), std::to_string(m),
                   fmt(tol)});
    }
    for (double eps : {0.5, 0.1, 0.01}) {
        const double escape = witness::nowhere_dense_escape(images.front(), eps, m);
        t.add_row({"escape-eps=" + fmt(eps), fmt(escape), fmt((1.0 - eps) / 3.0),
                   std::to_string(m), fmt(tol)});
    }
    return t;
}

Table experiment_fractal_dim(double tol) {
    using namespace families;
    Table t;
    t.columns = {"r", "s", "equation_residual", "invariant_residual", "iterations", "converged",
                 "probe_grid", "tolerance"};
    for (int i = 1; i <= 9; ++i) {
        const double r = 0.05 * i;
        const double s = witness::hausdorff_dimension(r);
        const double residual =
            std::abs(4.0 * std::pow(r, s) + std::pow(1.0 - 2.0 * r, s) - 1.0);
        const auto inv = invariant_copula(corner_matrix(r, r / 2.0), tol, 400);
        t.add_row({fmt(r), fmt(s), fmt(residual), fmt(inv.residual),
                   std::to_string(inv.iterations), inv.converged ? "yes" : "no", "257",
                   fmt(tol)});
    }
    return t;
}

Table experiment_quasi_volume(double tol) {
    using namespace families;
    Table t;
    t.columns = {"family", "min_volume", "lo1", "hi1", "lo2", "hi2", "lo3", "hi3",
                 "dyadic_grid", "tolerance"};
    struct Case {
        DependenceFunction f;
        int grid;
    };
    std::vector<Case> cases;
    cases.push_back({q_c_quasi(frechet(FrechetKind::M, 2)), 16});
    cases.push_back({frechet(FrechetKind::W, 3), 8});
    cases.push_back({lift_to_n(q_c_quasi(frechet(FrechetKind::M, 2)), 3), 8});
    for (const auto& c : cases) {
        const int n = c.f.dimension();
        const int g = c.grid;
        double best = 0.0;
        std::vector<int> best_lo(static_cast<std::size_t>(n), 0),
            best_hi(static_cast<std::size_t>(n), g);
        std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
        // Enumerate every dyadic box on the g-lattice.
        std::function<void(int)> sweep = [&](int axis) {
            if (axis == n) {
                std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k) {
                    a[static_cast<std::size_t>(k)] = static_cast<double>(lo[static_cast<std::size_t>(k)]) / g;
                    b[static_cast<std::size_t>(k)] = static_cast<double>(hi[static_cast<std::size_t>(k)]) / g;
                }
                const double v = box_volume(c.f, NBox(UnitPoint(a), UnitPoint(b)));
                if (v < best) {
                    best = v;
                    best_lo = lo;
                    best_hi = hi;
                }
                return;
            }
            for (int s = 0; s < g; ++s)
                for (int e = s + 1; e <= g; ++e) {
                    lo[static_cast<std::size_t>(axis)] = s;
                    hi[static_cast<std::size_t>(axis)] = e;
                    sweep(axis + 1);
                }
        };
        sweep(0);
        std::vector<std::string> row{c.f.name(), fmt(best)};
        for (int k = 0; k < 3; ++k) {
            if (k < n) {
                row.push_back(fmt(static_cast<double>(best_lo[static_cast<std::size_t>(k)]) / g));
                row.push_back(fmt(static_cast<double>(best_hi[static_cast<std::size_t>(k)]) / g));
            } else {
                row.push_back("");
                row.push_back("");
            }
        }
        row.push_back(std::to_string(g));
        row.push_back(fmt(tol));
        t.add_row(std::move(row));
    }
    return t;
}

Table experiment_independence(std::uint64_t seed, double tol) {
    using namespace families;
    Table t;
    t.columns = {"family", "size", "samples", "rank", "independent", "seed", "pivot_tol"};
    auto report_row = [&](const std::string& label, const std::vector<DependenceFunction>& fam,
                          std::size_t samples) {
        const auto rep = witness::independence_rank(fam, samples, seed, tol);
        t.add_row({label, std::to_string(rep.family_size), std::to_string(rep.sample_count),
                   std::to_string(rep.numerical_rank), rep.independent ? "yes" : "no",
                   std::to_string(seed), fmt(tol)});
    };

    std::vector<DependenceFunction> thetas;
    for (double theta : {2.0 / 3.0, 0.69, 0.71, 0.73, 0.75}) thetas.push_back(c_theta(theta));
    report_row("c_theta[5]", thetas, 200);
    thetas.push_back(mix(0.5, thetas[0], thetas[1]));
    report_row("c_theta[5]+mixture", thetas, 200);

    // Functions differ only where both coordinates land in a shared ordinal
    // block, so pick indices whose first differing binary digit is early
    // (large blocks) and sample densely.
    std::vector<DependenceFunction> ordinals;
    for (double alpha : {0.0, 0.125, 0.25, 0.5, 0.75})
        ordinals.push_back(a_alpha(AlmostDisjointIndex(alpha), 0.5, 0.75, 32));
    report_row("a_alpha[5]", ordinals, 100000);
    ordinals.push_back(mix(0.4, ordinals[0], ordinals[1]));
    report_row("a_alpha[5]+mixture", ordinals, 100000);

    std::vector<DependenceFunction> images;
    for (const char* name : {"pi2", "m2", "w2"})
        images.push_back(phi_max_asym(registry::from_descriptor(json{{"family", name}})));
    report_row("phi-images[3]", images, 100);
    images.push_back(mix(0.25, images[1], images[2]));
    report_row("phi-images[3]+mixture", images, 100);
    return t;
}

// ----------------------------------------------------------------------------
// Subcommands
// ----------------------------------------------------------------------------

int run_construct(const FamilyFlags& flags, int grid, const std::string& out_path) {
    const json descriptor = flags.descriptor();
    const DependenceFunction f = registry::from_descriptor(descriptor);
    std::cout << json{{"name", f.name()},
                      {"dimension", f.dimension()},
                      {"class_tag", to_string(f.class_tag())},
                      {"descriptor", descriptor}}
                     .dump()
              << '\n';
    if (!out_path.empty()) {
        write_grid_file(discretize(f, grid), out_path);
        std::cerr << "grid dump (" << f.dimension() << " " << grid << ") written to " << out_path
                  << '\n';
    }
    return 0;
}

int run_check(const FamilyFlags& flags, const std::string& dump_path, const std::string& which,
              double p, int grid, double tol) {
    std::optional<DependenceFunction> f;
    int resolution = grid;
    if (!dump_path.empty()) {
        GridFunction loaded = read_grid_file(dump_path);
        if (grid <= 0) resolution = loaded.resolution();
        f = grid_interpolant(std::move(loaded), ClassTag::unverified, "dump:" + dump_path);
    } else {
        f = registry::from_descriptor(flags.descriptor());
        if (resolution <= 0) resolution = 64;
    }

    CheckReport report;
    if (which == "copula") {
        report = check_copula_axioms(*f, resolution, tol);
        if (report.passed) f->certify(ClassTag::copula, resolution, tol);
    } else if (which == "quasi") {
        report = check_quasicopula_axioms(*f, resolution, tol);
        if (report.passed && f->class_tag() != ClassTag::copula)
            f->certify(ClassTag::quasi_copula, resolution, tol);
    } else if (which == "p-lip") {
        const std::size_t samples = resolution > 128 ? 2'000'000 : 0;
        report = check_p_lipschitz(*f, p, resolution, tol, samples);
    } else {
        throw std::invalid_argument("--which must be one of copula|quasi|p-lip");
    }
    std::cout << report.to_json() << '\n';
    return report.passed ? 0 : kExitCheckFailed;
}

int run_experiment(const std::string& name, int grid, double tol, std::uint64_t seed,
                   const std::string& out_path, const std::string& format) {
    Table table;
    if (name == "d1-vs-dinf") {
        table = experiment_d1_vs_dinf(grid > 0 ? grid : 512, tol);
    } else if (name == "tv-vs-d1") {
        table = experiment_tv_vs_d1(grid > 0 ? grid : 2048, tol);
    } else if (name == "max-asym") {
        table = experiment_max_asym(grid > 0 ? grid : 300, tol, seed);
    } else if (name == "fractal-dim") {
        table = experiment_fractal_dim(tol > 0 ? std::min(tol, 1e-4) : 1e-4);
    } else if (name == "quasi-volume") {
        table = experiment_quasi_volume(tol);
    } else if (name == "independence") {
        table = experiment_independence(seed, 1e-8);
    } else {
        throw std::invalid_argument(
            "unknown experiment '" + name +
            "' (expected d1-vs-dinf, tv-vs-d1, max-asym, fractal-dim, quasi-volume, independence)");
    }
    emit(table, out_path, format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"copulalab: construction and grid certification of copulas and quasi-copulas"};
    app.require_subcommand(1);

    FamilyFlags construct_flags;
    int construct_grid = 128;
    std::string construct_out;
    CLI::App* construct = app.add_subcommand("construct", "build a family member");
    add_family_flags(construct, construct_flags);
    construct->add_option("--grid", construct_grid, "dump resolution");
    construct->add_option("--out", construct_out, "grid dump path");

    FamilyFlags check_flags;
    std::string check_dump, check_which = "copula";
    double check_p = 2.0, check_tol = 1e-9;
    int check_grid = 0;
    CLI::App* check = app.add_subcommand("check", "run an axiom check");
    add_family_flags(check, check_flags);
    check->add_option("--dump", check_dump, "load a grid dump instead of a family");
    check->add_option("--which", check_which, "copula | quasi | p-lip");
    check->add_option("--p", check_p, "norm exponent for p-lip");
    check->add_option("--grid", check_grid, "check resolution (default 64, dumps: their own)");
    check->add_option("--tol", check_tol, "violation tolerance");

    std::string exp_name, exp_out, exp_format = "csv";
    int exp_grid = 0;
    double exp_tol = 1e-9;
    std::uint64_t exp_seed = 20240001ULL;
    CLI::App* experiment = app.add_subcommand(
        "experiment",
        "named tables: d1-vs-dinf | tv-vs-d1 | max-asym | fractal-dim | quasi-volume | independence");
    experiment->add_option("name", exp_name, "experiment name")->required();
    experiment->add_option("--grid", exp_grid, "metric resolution (defaults per experiment)");
    experiment->add_option("--tol", exp_tol, "tolerance recorded with each row");
    experiment->add_option("--seed", exp_seed, "seed for randomized rows");
    experiment->add_option("--out", exp_out, "output file (default stdout)");
    experiment->add_option("--format", exp_format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (construct->parsed()) return run_construct(construct_flags, construct_grid, construct_out);
        if (check->parsed())
            return run_check(check_flags, check_dump, check_which, check_p, check_grid, check_tol);
        if (experiment->parsed())
            return run_experiment(exp_name, exp_grid, exp_tol, exp_seed, exp_out, exp_format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
