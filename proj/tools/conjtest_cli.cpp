#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conjtest/conjugacy.hpp"
#include "conjtest/embedding.hpp"
#include "conjtest/generators.hpp"
#include "conjtest/harness.hpp"

namespace fs = std::filesystem;
using namespace conjtest;

namespace {

void emit_series(const TimeSeries& s, const std::string& out) {
    if (out.empty() || out == "-")
        write_csv(std::cout, s);
    else
        write_csv_file(out, s);
}

TimeSeries load_series(const std::string& path) {
    if (path == "-") return read_csv(std::cin);
    return read_csv_file(path);
}

ConnectingMap load_map(const std::string& text) {
    if (text.rfind("paired:", 0) == 0) return ConnectingMap::index_paired(read_csv_file(text.substr(7)), text);
    return ConnectingMap::parse(text);
}

fs::path out_dir() {
    const char* env = std::getenv("CONJTEST_OUT_DIR");
    fs::path dir = env && *env ? env : "results";
    fs::create_directories(dir);
    return dir;
}

Json load_spec(const std::string& ref) {
    for (const auto& id : builtin_ids())
        if (id == ref) return builtin_spec(id);
    std::ifstream in(ref);
    if (!in) throw Error("'" + ref + "' is neither a built-in experiment (" + [] {
                             std::string ids;
                             for (const auto& id : builtin_ids()) ids += (ids.empty() ? "" : " ") + id;
                             return ids;
                         }() + ") nor a readable spec file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SpecError({std::string("spec file is not valid JSON: ") + e.what()});
    }
}

std::string spec_name(const Json& spec, const std::string& ref) {
    if (spec.is_object() && spec.contains("output") && spec["output"].is_string()) return spec["output"];
    if (spec.is_object() && spec.contains("id") && spec["id"].is_string()) return spec["id"];
    return fs::path(ref).stem().string();
}

void report_warnings(const ExperimentResult& result) {
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conjugacy tests for time series of dynamical systems"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads for per-point loops (0 = all cores)");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a time series");
    std::string system, out;
    std::vector<double> start;
    double phi = std::sqrt(2.0) / 10.0, phi2 = std::sqrt(3.0) / 10.0, s_exp = 1.0, param = 4.0;
    double noise = 0.0, sample_time = 0.02;
    std::size_t length = 1000, burn_in = 0;
    std::uint64_t seed = 0;
    gen->add_option("--system", system, "circle, torus, logistic, tent, lorenz or klein")
        ->required()
        ->check(CLI::IsMember({"circle", "torus", "logistic", "tent", "lorenz", "klein"}));
    gen->add_option("--phi", phi, "rotation angle (circle, torus/klein first angle)");
    gen->add_option("--phi2", phi2, "second rotation angle (torus, klein)");
    gen->add_option("--s", s_exp, "circle map exponent");
    gen->add_option("--param", param, "logistic l or tent mu");
    gen->add_option("--start", start, "starting point coordinates")->delimiter(',');
    gen->add_option("--length", length, "number of samples kept")->check(CLI::PositiveNumber);
    gen->add_option("--burn-in", burn_in, "samples dropped before the first kept one (lorenz)");
    gen->add_option("--sample-time", sample_time, "sampling interval (lorenz)");
    gen->add_option("--noise", noise, "uniform noise amplitude eps");
    gen->add_option("--seed", seed, "noise seed");
    gen->add_option("--out", out, "output CSV (default stdout)");

    // embed
    auto* emb = app.add_subcommand("embed", "delay-embed a scalar observable of a series");
    std::string emb_in, emb_out;
    std::size_t dim = 2, lag = 1, coord = 0;
    bool mean_obs = false;
    emb->add_option("input", emb_in, "input CSV ('-' for stdin)")->required();
    emb->add_option("--dim", dim, "embedding dimension")->check(CLI::PositiveNumber);
    emb->add_option("--lag", lag, "delay lag")->check(CLI::PositiveNumber);
    auto* coord_opt = emb->add_option("--coord", coord, "1-based coordinate used as observable");
    emb->add_flag("--mean-observable", mean_obs, "use the mean of all coordinates")->excludes(coord_opt);
    emb->add_option("--out", emb_out, "output CSV (default stdout)");

    // compare
    auto* cmp = app.add_subcommand("compare", "run one test in both directions");
    std::string method_name = "conjtest", map_ab = "identity", map_ba = "identity", path_a, path_b;
    TestParams params;
    cmp->add_option("--method", method_name, "fnn, knn, conjtest or conjtest+");
    cmp->add_option("--r", params.r, "FNN threshold");
    cmp->add_option("--k", params.k, "neighborhood size");
    cmp->add_option("--t", params.t, "time horizon");
    cmp->add_option("--map-ab", map_ab, "map A -> B: identity, pow:s, arcsin, sinsq, proj:j, pad:d, paired:<csv>");
    cmp->add_option("--map-ba", map_ba, "map B -> A, same syntax");
    cmp->add_option("a", path_a, "series A (CSV)")->required();
    cmp->add_option("b", path_b, "series B (CSV)")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "run built-in or JSON experiment specs");
    exp->require_subcommand(1);
    auto* run = exp->add_subcommand("run", "run every comparison once; writes <id>.csv");
    auto* swp = exp->add_subcommand("sweep", "sweep one parameter; writes <id>_sweep.csv and SVG plots");
    auto* lst = exp->add_subcommand("list", "list built-in experiments");
    auto* show = exp->add_subcommand("show", "print a built-in spec as JSON");
    std::string spec_ref, axis;
    std::vector<double> values;
    unsigned jobs = 1;
    run->add_option("spec", spec_ref, "built-in id or path to a JSON spec")->required();
    run->add_option("--jobs", jobs, "comparisons evaluated concurrently");
    swp->add_option("spec", spec_ref, "built-in id or path to a JSON spec")->required();
    swp->add_option("--axis", axis, "r, k, t or series.<name>.<field> (default: the spec's own)");
    swp->add_option("--values", values, "comma-separated axis values")->delimiter(',');
    swp->add_option("--jobs", jobs, "comparisons evaluated concurrently");
    show->add_option("spec", spec_ref, "built-in id")->required();

    CLI11_PARSE(app, argc, argv);
    set_worker_threads(threads);

    try {
        if (*gen) {
            TimeSeries series = [&]() -> TimeSeries {
                auto st = [&](std::size_t i, double fallback) { return i < start.size() ? start[i] : fallback; };
                if (system == "circle") return gen_circle(phi, s_exp, st(0, 0.0), length);
                if (system == "torus") return gen_torus(phi, phi2, {st(0, 0.0), st(1, 0.0)}, length);
                if (system == "logistic") return gen_interval_map(IntervalMap::logistic, param, st(0, 0.2), length);
                if (system == "tent") return gen_interval_map(IntervalMap::tent, param, st(0, 0.2), length);
                if (system == "lorenz") {
                    LorenzParams p;
                    p.sample_time = sample_time;
                    return gen_lorenz({st(0, 1.0), st(1, 1.0), st(2, 1.0)}, length, burn_in, p);
                }
                return gen_klein(phi, phi2, {st(0, 0.0), st(1, 0.0)}, length);
            }();
            if (noise > 0.0) series = add_noise(series, noise, seed);
            emit_series(series, out);
            return 0;
        }
        if (*emb) {
            const TimeSeries input = load_series(emb_in);
            TimeSeries scalar = input;
            if (mean_obs)
                scalar = observable_mean(input);
            else if (coord > 0)
                scalar = project(input, coord);
            else if (input.dim() != 1)
                throw Error("input has dimension " + std::to_string(input.dim()) +
                            "; choose --coord or --mean-observable");
            emit_series(takens_embed(scalar, {dim, lag}), emb_out);
            return 0;
        }
        if (*cmp) {
            const Method method = parse_method(method_name);
            const TimeSeries a = load_series(path_a), b = load_series(path_b);
            const TestResult r = compare(method, a, b, params, load_map(map_ab), load_map(map_ba));
            std::cout << "method,r,k,t,value_ab,value_ba\n"
                      << to_string(method) << ',' << format_double(params.r) << ',' << params.k << ','
                      << params.t << ',' << format_double(r.ab.value) << ',' << format_double(r.ba.value) << '\n';
            return 0;
        }
        if (*lst) {
            for (const auto& id : builtin_ids())
                std::cout << id << "  " << builtin_spec(id).value("description", "") << '\n';
            return 0;
        }
        if (*show) {
            std::cout << builtin_spec(spec_ref).dump(2) << '\n';
            return 0;
        }
        if (*run) {
            const Json spec = load_spec(spec_ref);
            const ExperimentResult result = run_experiment(spec, jobs);
            report_warnings(result);
            const fs::path path = out_dir() / (spec_name(spec, spec_ref) + ".csv");
            std::ofstream csv(path);
            write_results_csv(csv, result.rows, false);
            std::cout << path.string() << '\n';
            return 0;
        }
        if (*swp) {
            const Json spec = load_spec(spec_ref);
            if (axis.empty() || values.empty()) {
                const auto def = default_sweep(spec);
                if (!def && axis.empty()) throw SpecError({"spec declares no sweep; give --axis and --values"});
                if (axis.empty()) axis = def->first;
                if (values.empty()) {
                    if (!def || def->first != axis) throw SpecError({"--values is required for axis '" + axis + "'"});
                    values = def->second;
                }
            }
            const ExperimentResult result = sweep(spec, axis, values, jobs);
            report_warnings(result);
            const std::string name = spec_name(spec, spec_ref);
            const fs::path dir = out_dir();
            const fs::path path = dir / (name + "_sweep.csv");
            std::ofstream csv(path);
            write_results_csv(csv, result.rows, true);
            std::cout << path.string() << '\n';
            std::vector<std::string> methods;
            for (const auto& row : result.rows)
                if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
                    methods.push_back(row.method);
            for (const auto& m : methods) {
                std::string file = m == "conjtest+" ? "conjtest_plus" : m;
                const fs::path svg_path = dir / (name + "_" + file + ".svg");
                std::ofstream svg(svg_path);
                svg << sweep_svg(result.rows, m, name + ": " + m + " against " + axis);
                std::cout << svg_path.string() << '\n';
            }
            return 0;
        }
    } catch (const SpecError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
