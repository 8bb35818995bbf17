// stickycli: evaluate laws, simulate paths, run validation suites, emit plot data.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/invlap.hpp"
#include "sticky/laws.hpp"
#include "sticky/mcstat.hpp"
#include "sticky/parallel.hpp"
#include "sticky/pathsim.hpp"

namespace {

using namespace sticky;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Grid {
    std::string var;
    std::vector<double> values;
};

Grid parse_grid(const std::vector<std::string>& tokens) {
    Grid g;
    g.var = tokens.at(0);
    double lo, hi;
    long points;
    try {
        lo = std::stod(tokens.at(1));
        hi = std::stod(tokens.at(2));
        points = std::stol(tokens.at(3));
    } catch (const std::exception&) {
        throw UsageError("--grid expects VAR MIN MAX POINTS");
    }
    if (points < 1) throw UsageError("--grid: empty grid");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw UsageError("--grid: need finite MIN <= MAX");
    for (long i = 0; i < points; ++i) {
        g.values.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return g;
}

// Named numeric inputs; unset flags stay empty.
using Inputs = std::map<std::string, std::optional<double>>;

struct LawSpec {
    std::string primary;              // column used when there is no grid
    std::vector<std::string> needs;   // required inputs
};

const std::map<std::string, LawSpec> law_specs = {
    {"resolvent", {"y", {"theta", "lambda", "y"}}},
    {"cond-exp", {"x", {"theta", "lambda", "x", "b"}}},
    {"cond-fixed", {"x", {"theta", "t", "x", "b"}}},
    {"marginal-fixed", {"x", {"theta", "t", "x"}}},
    {"occ-zero", {"t", {"theta", "t"}}},
    {"occ-pos", {"t", {"theta", "t"}}},
    {"occ-onesided", {"t", {"theta", "s", "t"}}},
    {"warren", {"x", {"theta", "level", "x"}}},
};

std::vector<std::string> law_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : law_specs) names.push_back(k);
    return names;
}

struct Options {
    laws::Variant variant = laws::Variant::normalized;
    invlap::InversionSpec inversion;
};

double evaluate(const std::string& law, const std::map<std::string, double>& in, const Options& o) {
    const auto get = [&](const char* k) { return in.at(k); };
    if (law == "resolvent") {
        return laws::resolvent_measure(laws::make_params(get("theta"), get("lambda"))).density(get("y"));
    }
    if (law == "cond-exp") {
        return laws::cond_cdf_exp(get("x"), get("b"), laws::make_params(get("theta"), get("lambda")), o.variant);
    }
    if (law == "cond-fixed") return invlap::cond_cdf_t(get("x"), get("b"), get("t"), get("theta"), o.inversion).value;
    if (law == "marginal-fixed") return invlap::marginal_cdf_t(get("x"), get("t"), get("theta"), o.inversion).value;
    if (law == "occ-zero") {
        const auto s = in.find("s");
        return laws::occ_zero_tail(get("t"), get("theta"), s == in.end() ? 1.0 : s->second);
    }
    if (law == "occ-pos") return laws::occ_pos_tail(get("t"), get("theta"), {}, o.variant);
    if (law == "occ-onesided") return laws::occ_pos_cdf_onesided(get("s"), get("t"), get("theta"));
    if (law == "warren") return laws::warren_cdf(get("level"), get("x"), get("theta"));
    throw UsageError("unknown law: " + law);
}

// Resolves required inputs; the grid variable substitutes for its flag.
std::map<std::string, double> resolve(const std::string& law, const Inputs& inputs, const std::string& grid_var) {
    const auto& spec = law_specs.at(law);
    std::map<std::string, double> out;
    for (const auto& [k, v] : inputs) {
        if (v) out[k] = *v;
    }
    for (const auto& need : spec.needs) {
        if (need != grid_var && !out.count(need)) throw UsageError(law + " requires --" + need);
    }
    if (!grid_var.empty() && std::find(spec.needs.begin(), spec.needs.end(), grid_var) == spec.needs.end() &&
        !(law == "occ-zero" && grid_var == "s")) {
        throw UsageError("--grid variable " + grid_var + " is not an input of " + law);
    }
    return out;
}

std::string echo(int argc, char** argv) {
    std::string s = "# stickycli";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return &std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return &file;
}

void finish(std::ostream* out, std::ofstream& file, const std::string& path) {
    out->flush();
    if (file.is_open()) {
        file.close();
        if (!file) throw std::runtime_error("failed writing output file: " + path);
    }
}

std::string variant_name(laws::Variant v) { return v == laws::Variant::printed ? "printed" : "normalized"; }
std::string method_name(invlap::InversionMethod m) { return m == invlap::InversionMethod::talbot ? "talbot" : "stehfest"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sided sticky Brownian motion: laws, simulation and validation"};
    app.require_subcommand(1);

    // Shared numeric inputs.
    Inputs inputs;
    std::optional<double> theta, lambda, t, x, b, s, y, level;
    std::vector<std::string> grid_tokens;
    std::string variant = "normalized", method = "talbot", output;
    unsigned workers = 0;

    const std::map<std::string, laws::Variant> variants{{"printed", laws::Variant::printed},
                                                         {"normalized", laws::Variant::normalized}};
    const std::map<std::string, invlap::InversionMethod> methods{{"talbot", invlap::InversionMethod::talbot},
                                                                  {"stehfest", invlap::InversionMethod::stehfest}};

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate one law at a point or over a grid");
    std::string law;
    eval->add_option("law", law, "Law name")->required()->check(CLI::IsMember(law_names()));
    const auto add_inputs = [&](CLI::App* sub) {
        sub->add_option("--theta", theta, "Stickiness");
        sub->add_option("--lambda", lambda, "Exponential rate");
        sub->add_option("--t", t, "Time");
        sub->add_option("--x", x, "State level");
        sub->add_option("--b", b, "Driving motion level");
        sub->add_option("--s", s, "Horizon");
        sub->add_option("--y", y, "Resolvent argument");
        sub->add_option("--level", level, "Reflected one-sided driving level B + L");
        sub->add_option("--grid", grid_tokens, "VAR MIN MAX POINTS")->expected(4);
        sub->add_option("--variant", variant)->check(CLI::IsMember({"printed", "normalized"}));
        sub->add_option("--method", method)->check(CLI::IsMember({"talbot", "stehfest"}));
        sub->add_option("--output,-o", output, "Output file (default stdout)");
    };
    add_inputs(eval);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Write sticky paths as CSV");
    double sim_theta = 1.0, t_max = 1.0, step = 1e-4, grid_step = 0.0;
    std::size_t paths = 1;
    std::uint64_t seed = 0;
    std::string sim_output = "paths.csv";
    sim->add_option("--theta", sim_theta, "Stickiness (inf allowed)")->required();
    sim->add_option("--t-max", t_max, "Horizon")->required()->check(CLI::PositiveNumber);
    sim->add_option("--step", step, "Base step")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--grid-step", grid_step, "Output spacing (default: step)");
    sim->add_option("--paths", paths, "Number of paths")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Master seed")->capture_default_str();
    sim->add_option("--output,-o", sim_output, "CSV file")->capture_default_str();
    sim->add_option("--workers", workers, "Worker threads (0: STICKY_WORKERS or hardware)");

    // validate
    auto* val = app.add_subcommand("validate", "Run validation suites, write JSON reports");
    std::string suite;
    std::size_t val_paths = 100000;
    mcstat::SuiteConfig config;
    val->add_option("--suite", suite, "Suite name")
        ->required()
        ->check(CLI::IsMember({"resolvent", "joint", "conditional", "occupation", "onesided", "warren", "corollary", "all"}));
    val->add_option("--paths", val_paths, "Samples per ensemble")->capture_default_str()->check(CLI::PositiveNumber);
    val->add_option("--seed", seed, "Master seed")->capture_default_str();
    val->add_option("--step", config.step, "Base step")->capture_default_str()->check(CLI::PositiveNumber);
    val->add_option("--alpha", config.alpha, "DKW level")->capture_default_str()->check(CLI::Range(1e-12, 1.0 - 1e-12));
    val->add_option("--bandwidth", config.bandwidth, "Conditioning bin half-width")->capture_default_str()->check(CLI::PositiveNumber);
    val->add_option("--output,-o", output, "JSON file (default stdout)");
    val->add_option("--workers", workers, "Worker threads (0: STICKY_WORKERS or hardware)");

    // plotdata
    auto* plot = app.add_subcommand("plotdata", "Plot-ready CSV: curves by theta, arcsine reference, MC overlay");
    std::string curve;
    std::vector<double> thetas;
    bool arcsine = false, overlay = false;
    plot->add_option("curve", curve, "Law name")->required()->check(CLI::IsMember(law_names()));
    plot->add_option("--theta", thetas, "Stickiness; repeat for several series");
    plot->add_option("--lambda", lambda);
    plot->add_option("--t", t);
    plot->add_option("--x", x);
    plot->add_option("--b", b);
    plot->add_option("--s", s);
    plot->add_option("--y", y);
    plot->add_option("--level", level);
    plot->add_option("--grid", grid_tokens, "VAR MIN MAX POINTS")->expected(4)->required();
    plot->add_option("--variant", variant)->check(CLI::IsMember({"printed", "normalized"}));
    plot->add_option("--method", method)->check(CLI::IsMember({"talbot", "stehfest"}));
    plot->add_flag("--arcsine", arcsine, "Add the arcsine tail column");
    plot->add_flag("--overlay", overlay, "Add an ECDF column from simulation (occ-zero, occ-pos, marginal-fixed)");
    plot->add_option("--paths", val_paths, "Paths for --overlay")->check(CLI::PositiveNumber);
    plot->add_option("--seed", seed);
    plot->add_option("--step", step)->check(CLI::PositiveNumber);
    plot->add_option("--workers", workers);
    plot->add_option("--output,-o", output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Options opts;
        opts.variant = variants.at(variant);
        opts.inversion.method = methods.at(method);
        inputs = {{"theta", theta}, {"lambda", lambda}, {"t", t}, {"x", x}, {"b", b}, {"s", s}, {"y", y}, {"level", level}};

        if (*eval) {
            std::optional<Grid> grid;
            if (!grid_tokens.empty()) grid = parse_grid(grid_tokens);
            if (grid && !inputs.count(grid->var)) throw UsageError("--grid: unknown variable " + grid->var);
            auto in = resolve(law, inputs, grid ? grid->var : "");
            const std::string column = grid ? grid->var : law_specs.at(law).primary;
            const std::vector<double> values = grid ? grid->values : std::vector<double>{in.at(column)};

            std::ostringstream body;
            body << echo(argc, argv) << "\n# variant=" << variant_name(opts.variant)
                 << " method=" << method_name(opts.inversion.method) << "\n";
            body << column << ",value\n";
            for (double v : values) {
                in[column] = v;
                body << fmt(v) << ',' << fmt(evaluate(law, in, opts)) << '\n';
            }
            if (law == "resolvent") {
                body << "atom," << fmt(laws::resolvent_measure(laws::make_params(in.at("theta"), in.at("lambda"))).atom_mass)
                     << '\n';
            }
            std::ofstream file;
            auto* out = open_output(output, file);
            *out << body.str();
            finish(out, file, output);
            return 0;
        }

        if (*sim) {
            if (std::isnan(sim_theta) || sim_theta <= 0.0) throw UsageError("--theta must be positive or inf");
            if (grid_step < 0.0) throw UsageError("--grid-step must be nonnegative");
            std::ofstream file;
            auto* out = open_output(sim_output, file);
            *out << echo(argc, argv) << '\n';
            pathsim::write_csv_header(*out, paths > 1);
            const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / step)) + 1;
            const unsigned w = workers ? workers : default_workers();
            const std::size_t chunk = std::max<std::size_t>(1, 4 * w);
            for (std::size_t start = 0; start < paths; start += chunk) {
                const std::size_t count = std::min(chunk, paths - start);
                std::vector<pathsim::SPath> batch(count);
                parallel_for(count, w, [&](std::size_t i) {
                    const std::size_t k = start + i;
                    const auto base = pathsim::sample_base(n_steps, step, pathsim::mix_seed(seed, k, 0));
                    pathsim::BuildOptions bo;
                    bo.grid_step = grid_step;
                    batch[i] = pathsim::build_sticky(base, sim_theta, t_max, pathsim::mix_seed(seed, k, 1),
                                                     pathsim::mix_seed(seed, k, 2), bo);
                });
                for (std::size_t i = 0; i < count; ++i) {
                    pathsim::write_csv_rows(*out, batch[i],
                                            paths > 1 ? std::optional<std::size_t>(start + i) : std::nullopt);
                }
            }
            finish(out, file, sim_output);
            std::ostream& summary = (sim_output.empty() || sim_output == "-") ? std::cerr : std::cout;
            summary << "simulated paths=" << paths << " step=" << fmt(step) << " seed=" << seed
                      << " theta=" << fmt(sim_theta) << " t_max=" << fmt(t_max) << " output=" << sim_output << '\n';
            return 0;
        }

        if (*val) {
            config.workers = workers;
            const auto reports = mcstat::run_suite(mcstat::parse_suite(suite), val_paths, seed, config);
            std::ofstream file;
            auto* out = open_output(output, file);
            *out << mcstat::to_json(reports);
            finish(out, file, output);
            return mcstat::all_passed(reports) ? 0 : 1;
        }

        if (*plot) {
            const Grid grid = parse_grid(grid_tokens);
            if (!inputs.count(grid.var) && grid.var != "theta") throw UsageError("--grid: unknown variable " + grid.var);
            if (grid.var == "theta") throw UsageError("plotdata: theta labels the series; grid over another variable");
            if (thetas.empty()) thetas.push_back(1.0);
            if (overlay && thetas.size() != 1) throw UsageError("--overlay takes a single --theta");
            if (overlay && curve != "occ-zero" && curve != "occ-pos" && curve != "marginal-fixed") {
                throw UsageError("--overlay supports occ-zero, occ-pos and marginal-fixed");
            }
            if (overlay && curve == "marginal-fixed" && grid.var != "x") throw UsageError("--overlay marginal-fixed grids over x");
            if (overlay && curve != "marginal-fixed" && grid.var != "t") throw UsageError("--overlay " + curve + " grids over t");

            std::vector<std::vector<double>> columns;
            std::vector<std::string> headers;
            for (double th : thetas) {
                inputs["theta"] = th;
                auto in = resolve(curve, inputs, grid.var);
                std::vector<double> col;
                for (double v : grid.values) {
                    in[grid.var] = v;
                    col.push_back(evaluate(curve, in, opts));
                }
                columns.push_back(std::move(col));
                headers.push_back(overlay ? "analytic" : "theta=" + label(th));
            }
            if (arcsine) {
                if (grid.var != "t") throw UsageError("--arcsine needs a grid over t");
                std::vector<double> col;
                for (double v : grid.values) col.push_back(laws::arcsine_tail(v));
                columns.push_back(std::move(col));
                headers.push_back("arcsine");
            }
            if (overlay) {
                const double th = thetas[0];
                const double horizon = curve == "marginal-fixed" ? inputs.at("t").value_or(1.0) : 1.0;
                const auto snaps = pathsim::sample_at_time(th, horizon, val_paths, step, seed, workers);
                std::vector<double> samples;
                for (const auto& sn : snaps) {
                    samples.push_back(curve == "occ-zero" ? sn.a0 : curve == "occ-pos" ? sn.apos : sn.x);
                }
                const mcstat::ECDF e(std::move(samples));
                std::vector<double> col;
                for (double v : grid.values) col.push_back(curve == "marginal-fixed" ? e(v) : 1.0 - e(v));
                columns.push_back(std::move(col));
                headers.push_back("ecdf");
            }

            std::ostringstream body;
            body << echo(argc, argv) << "\n# variant=" << variant_name(opts.variant)
                 << " method=" << method_name(opts.inversion.method) << "\n";
            body << grid.var;
            for (const auto& h : headers) body << ',' << h;
            body << '\n';
            for (std::size_t i = 0; i < grid.values.size(); ++i) {
                body << fmt(grid.values[i]);
                for (const auto& col : columns) body << ',' << fmt(col[i]);
                body << '\n';
            }
            std::ofstream file;
            auto* out = open_output(output, file);
            *out << body.str();
            finish(out, file, output);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
