#include "argda/cli.hpp"

#include "argda/domain.hpp"
#include "argda/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace argda::cli {

namespace {

void add_data_options(CLI::App* app, Invocation& inv) {
    app->add_option("--manifest", inv.manifest, "JSON dataset manifest");
    app->add_option("--synth", inv.synth, "synthetic task, e.g. gaussian_shift:classes=3,per_class=40,seed=42");
}

void add_solver_options(CLI::App* app, Invocation& inv) {
    app->add_option("--variant", inv.variant, "dga-da, dga+f, dga+a or arg-da (default arg-da)");
    app->add_option("--k", inv.k, "subspace dimension (default 200, capped at the feature dimension)");
    app->add_option("--lambda", inv.lambda, "ridge weight (default 0.1)");
    app->add_option("--alpha", inv.alpha, "propagation trade-off in (0,1) (default 0.9)");
    app->add_option("--iters", inv.iterations, "maximum outer iterations (default 10)");
    app->add_option("--neighbors", inv.neighbors, "kNN width of the affinity graph (default 5)");
    app->add_option("--sigma", inv.sigma, "fixed heat-kernel bandwidth (default: median pairwise distance)");
    app->add_option("--kernel", inv.kernel, "none, linear or rbf (default none)");
    app->add_option("--kernel-sigma", inv.kernel_sigma, "fixed rbf bandwidth (default: median pairwise distance)");
    app->add_option("--seed", inv.seed, "seed; also seeds --synth tasks whose spec omits seed (default 42)");
    app->add_option("--attention-floor", inv.attention_floor, "remap present attention values to [floor,1] (default 0)");
    app->add_flag("--uniform-attention", inv.uniform_attention, "force every attention weight to 1");
    app->add_flag("--no-repulsive", inv.no_repulsive, "drop the repulsive terms from M*");
}

void add_output_options(CLI::App* app, Invocation& inv, bool with_jobs) {
    app->add_option("--out", inv.out, "output report path");
    app->add_option("--format", inv.format, "json or csv (default json)")->check(CLI::IsMember({"json", "csv"}));
    app->add_flag("--timing", inv.timing, "include wall-clock time in report files");
    if (with_jobs) app->add_option("--jobs", inv.jobs, "worker threads (default 1)")->check(CLI::PositiveNumber);
}

struct Problem {
    Matrix x;
    DomainSplit split;
    std::optional<Labels> truth;
    ConfigOverrides overrides;
    std::string source;
};

Problem load_problem(const Invocation& inv) {
    if (inv.manifest && inv.synth) throw Error("give either --manifest or --synth, not both");
    Problem p;
    if (inv.manifest) {
        Dataset d = load_dataset(*inv.manifest);
        p.x = std::move(d.features);
        p.split = std::move(d.split);
        p.truth = std::move(d.truth);
        p.overrides = d.manifest.config;
        p.source = "manifest:" + *inv.manifest;
        return p;
    }
    if (!inv.synth) throw Error("no data: pass --manifest <file> or --synth <spec>");
    SyntheticSpec spec = parse_synthetic_spec(*inv.synth);
    if (inv.seed && inv.synth->find("seed=") == std::string::npos) spec.seed = *inv.seed;
    SyntheticTask task = generate_synthetic(spec);
    p.x = std::move(task.features);
    p.split = std::move(task.split);
    p.truth = std::move(task.truth);
    p.source = "synth:" + to_string(spec);
    return p;
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string full(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::map<std::string, std::string> metadata(const SolverConfig& c, const std::string& source) {
    return {{"variant", to_string(c.variant)},
            {"k", std::to_string(c.k)},
            {"lambda", full(c.lambda)},
            {"alpha", full(c.alpha)},
            {"iterations", std::to_string(c.iterations)},
            {"neighbors", std::to_string(c.neighbors)},
            {"sigma", c.sigma.mode == Bandwidth::Mode::Median ? "median" : full(c.sigma.sigma)},
            {"kernel", to_string(c.kernel)},
            {"use_repulsive", c.use_repulsive ? "true" : "false"},
            {"attention_floor", full(c.attention_floor)},
            {"uniform_attention", c.uniform_attention ? "true" : "false"},
            {"seed", std::to_string(c.seed)},
            {"rng", Rng::kAlgorithm},
            {"data", source}};
}

// Runs f(0..n-1) on up to `jobs` threads; the first failure by task index is rethrown.
template <typename F>
void parallel_for(int n, int jobs, F&& f) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw Error("write to '" + path + "' failed");
}

std::string accuracy_text(const std::optional<double>& a) { return a ? fixed(*a, 4) : "na"; }

}  // namespace

std::optional<Invocation> parse_invocation(const std::vector<std::string>& args, std::ostream& out) {
    Invocation inv;
    CLI::App app{"Transductive domain adaptation with attention-regularized graphs", "argda"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "adapt one task and write a report");
    add_data_options(run, inv);
    add_solver_options(run, inv);
    add_output_options(run, inv, false);

    auto* ablate = app.add_subcommand("ablate", "compare the four variants on one task");
    add_data_options(ablate, inv);
    add_solver_options(ablate, inv);
    add_output_options(ablate, inv, true);

    auto* synth = app.add_subcommand("synth", "write a synthetic task as CSV files plus manifest");
    synth->add_option("--synth", inv.synth, "synthetic task spec")->required();
    synth->add_option("--seed", inv.seed, "seed when the spec omits one");
    synth->add_option("--out", inv.out, "output directory")->required();

    auto* bench = app.add_subcommand("bench", "parameter sweeps and convergence traces");
    add_data_options(bench, inv);
    add_solver_options(bench, inv);
    add_output_options(bench, inv, true);
    bench->add_option("--sweep-k", inv.sweep_k, "k values")->delimiter(',');
    bench->add_option("--sweep-lambda", inv.sweep_lambda, "lambda values")->delimiter(',');
    bench->add_option("--sweep-alpha", inv.sweep_alpha, "alpha values")->delimiter(',');
    bench->add_flag("--convergence", inv.convergence, "emit the per-iteration trace of the base configuration");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw Error(e.what());
    }
    for (auto* sub : {run, ablate, synth, bench})
        if (sub->parsed()) inv.subcommand = sub->get_name();
    return inv;
}

SolverConfig resolve_config(const Invocation& inv, const ConfigOverrides& m) {
    SolverConfig c;
    c.seed = 42;
    auto pick = [](auto& dst, const auto& flag, const auto& manifest) {
        if (flag)
            dst = *flag;
        else if (manifest)
            dst = *manifest;
    };
    pick(c.k, inv.k, m.k);
    pick(c.lambda, inv.lambda, m.lambda);
    pick(c.alpha, inv.alpha, m.alpha);
    pick(c.iterations, inv.iterations, m.iterations);
    pick(c.neighbors, inv.neighbors, m.neighbors);
    pick(c.seed, inv.seed, m.seed);
    std::optional<double> sigma;
    pick(sigma, inv.sigma, m.sigma);
    if (sigma) c.sigma = Bandwidth::fixed(*sigma);
    std::optional<std::string> kernel, variant;
    pick(kernel, inv.kernel, m.kernel);
    pick(variant, inv.variant, m.variant);
    if (kernel) c.kernel = parse_kernel(*kernel);
    if (inv.kernel_sigma) c.kernel.bandwidth = Bandwidth::fixed(*inv.kernel_sigma);
    if (variant) c.variant = parse_variant(*variant);
    c.attention_floor = inv.attention_floor;
    c.uniform_attention = inv.uniform_attention;
    c.use_repulsive = !inv.no_repulsive;
    c.validate();
    return c;
}

int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    Problem p = load_problem(inv);
    const SolverConfig config = resolve_config(inv, p.overrides);
    const RunReport report = run(p.x, p.split, config, p.truth);

    err << to_string(config.variant) << ": " << report.iterations.size() << " iteration(s)";
    if (report.final_accuracy)
        err << ", accuracy " << fixed(*report.final_accuracy, 4) << " (1-NN baseline " << fixed(*report.baseline_accuracy, 4) << ")";
    err << ", " << fixed(report.elapsed, 3) << " s\n";

    if (inv.out) {
        ReportOptions opts{inv.timing, metadata(config, p.source)};
        save_report(report, *inv.out, parse_report_format(inv.format), opts);
        err << "report written to " << *inv.out << "\n";
    }
    out << "variant=" << to_string(config.variant) << " accuracy=" << accuracy_text(report.final_accuracy)
        << " baseline=" << accuracy_text(report.baseline_accuracy) << " iterations=" << report.iterations.size()
        << " targets=" << report.final_labels.size() << "\n";
    return 0;
}

int cmd_ablate(const Invocation& inv, std::ostream& out, std::ostream& err) {
    Problem p = load_problem(inv);
    const SolverConfig base = resolve_config(inv, p.overrides);
    const auto& variants = all_variants();
    std::vector<RunReport> reports(variants.size());
    parallel_for(static_cast<int>(variants.size()), inv.jobs, [&](int i) {
        SolverConfig c = base;
        c.variant = variants[static_cast<std::size_t>(i)];
        reports[static_cast<std::size_t>(i)] = run(p.x, p.split, c, p.truth);
    });

    err << std::left << std::setw(10) << "variant" << std::setw(10) << "accuracy" << "iterations\n";
    nlohmann::json rows = nlohmann::json::array();
    std::string csv = "variant,accuracy,baseline,iterations\n";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& r = reports[i];
        const std::string name = to_string(variants[i]);
        err << std::left << std::setw(10) << name << std::setw(10) << accuracy_text(r.final_accuracy) << r.iterations.size() << "\n";
        out << "variant=" << name << " accuracy=" << accuracy_text(r.final_accuracy) << " iterations=" << r.iterations.size() << "\n";
        rows.push_back({{"variant", name},
                        {"accuracy", r.final_accuracy ? nlohmann::json(*r.final_accuracy) : nlohmann::json(nullptr)},
                        {"baseline", r.baseline_accuracy ? nlohmann::json(*r.baseline_accuracy) : nlohmann::json(nullptr)},
                        {"iterations", r.iterations.size()},
                        {"final_labels", r.final_labels}});
        csv += name + "," + (r.final_accuracy ? full(*r.final_accuracy) : "") + "," +
               (r.baseline_accuracy ? full(*r.baseline_accuracy) : "") + "," + std::to_string(r.iterations.size()) + "\n";
    }
    if (inv.out) {
        nlohmann::json doc{{"meta", metadata(base, p.source)}, {"variants", rows}};
        write_text(*inv.out, inv.format == "csv" ? csv : doc.dump(2) + "\n");
    }
    out << "runs=" << variants.size() << " baseline=" << accuracy_text(reports.front().baseline_accuracy) << "\n";
    return 0;
}

int cmd_synth(const Invocation& inv, std::ostream& out, std::ostream& err) {
    if (!inv.synth || !inv.out) throw Error("synth needs --synth and --out");
    SyntheticSpec spec = parse_synthetic_spec(*inv.synth);
    if (inv.seed && inv.synth->find("seed=") == std::string::npos) spec.seed = *inv.seed;
    const SyntheticTask task = generate_synthetic(spec);
    const std::string manifest = save_dataset(task, *inv.out);
    const double baseline = accuracy(nn_pseudo_label(task.features, task.split), task.truth);
    err << "wrote " << to_string(spec) << " to " << *inv.out << "\n";
    out << "manifest=" << manifest << " n_source=" << task.split.n_source << " n_target=" << task.split.n_target
        << " classes=" << task.split.classes << " dim=" << task.features.rows() << " baseline=" << fixed(baseline, 4) << "\n";
    return 0;
}

int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream& err) {
    Problem p = load_problem(inv);
    const SolverConfig base = resolve_config(inv, p.overrides);

    struct Point {
        std::string parameter;
        double value;
        SolverConfig config;
    };
    std::vector<Point> points;
    for (int k : inv.sweep_k) points.push_back({"k", static_cast<double>(k), base}), points.back().config.k = k;
    for (double l : inv.sweep_lambda) points.push_back({"lambda", l, base}), points.back().config.lambda = l;
    for (double a : inv.sweep_alpha) points.push_back({"alpha", a, base}), points.back().config.alpha = a;
    const bool trace = inv.convergence || points.empty();
    if (trace) points.push_back({"convergence", 0.0, base});
    for (auto& pt : points) pt.config.validate();

    std::vector<RunReport> reports(points.size());
    parallel_for(static_cast<int>(points.size()), inv.jobs, [&](int i) {
        const auto& pt = points[static_cast<std::size_t>(i)];
        reports[static_cast<std::size_t>(i)] = run(p.x, p.split, pt.config, p.truth);
    });

    struct Row {
        std::string trace, parameter;
        double value;
        int iteration;
        std::optional<double> accuracy;
        int changed;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& r = reports[i];
        if (points[i].parameter == "convergence") {
            for (const auto& it : r.iterations)
                rows.push_back({"convergence", "iteration", static_cast<double>(it.iteration), it.iteration, it.accuracy, it.changed});
        } else {
            const int last = r.iterations.empty() ? 0 : r.iterations.back().iteration;
            const int changed = r.iterations.empty() ? 0 : r.iterations.back().changed;
            rows.push_back({"sensitivity", points[i].parameter, points[i].value, last, r.final_accuracy, changed});
        }
    }

    std::string csv = "trace,parameter,value,iteration,accuracy,changed\n";
    nlohmann::json js = nlohmann::json::array();
    for (const auto& row : rows) {
        out << "trace=" << row.trace << " parameter=" << row.parameter << " value=" << full(row.value)
            << " iteration=" << row.iteration << " accuracy=" << accuracy_text(row.accuracy) << " changed=" << row.changed << "\n";
        csv += row.trace + "," + row.parameter + "," + full(row.value) + "," + std::to_string(row.iteration) + "," +
               (row.accuracy ? full(*row.accuracy) : "") + "," + std::to_string(row.changed) + "\n";
        js.push_back({{"trace", row.trace},
                      {"parameter", row.parameter},
                      {"value", row.value},
                      {"iteration", row.iteration},
                      {"accuracy", row.accuracy ? nlohmann::json(*row.accuracy) : nlohmann::json(nullptr)},
                      {"changed", row.changed}});
    }
    if (inv.out) {
        nlohmann::json doc{{"meta", metadata(base, p.source)}, {"rows", js}};
        write_text(*inv.out, inv.format == "csv" ? csv : doc.dump(2) + "\n");
    }
    err << rows.size() << " trace row(s) from " << points.size() << " run(s)\n";
    out << "rows=" << rows.size() << " runs=" << points.size() << "\n";
    return 0;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto inv = parse_invocation(args, out);
        if (!inv) return 0;
        if (inv->subcommand == "run") return cmd_run(*inv, out, err);
        if (inv->subcommand == "ablate") return cmd_ablate(*inv, out, err);
        if (inv->subcommand == "synth") return cmd_synth(*inv, out, err);
        if (inv->subcommand == "bench") return cmd_bench(*inv, out, err);
        throw Error("unknown subcommand");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace argda::cli
