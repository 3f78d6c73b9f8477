#include "argda/pipeline.hpp"

#include "argda/domain.hpp"
#include "argda/eigen_solver.hpp"
#include "argda/graph.hpp"
#include "argda/label_propagation.hpp"
#include "argda/mmd.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

namespace argda {

VariantTerms variant_terms(Variant v) {
    switch (v) {
    case Variant::DgaDa: return {GraphTerm::None, GraphTerm::Plain};
    case Variant::DgaPlusF: return {GraphTerm::Plain, GraphTerm::Plain};
    case Variant::DgaPlusA: return {GraphTerm::None, GraphTerm::Arg};
    case Variant::ArgDa: return {GraphTerm::Arg, GraphTerm::Arg};
    }
    throw Error("unknown variant");
}

std::string to_string(Variant v) {
    switch (v) {
    case Variant::DgaDa: return "dga-da";
    case Variant::DgaPlusF: return "dga+f";
    case Variant::DgaPlusA: return "dga+a";
    case Variant::ArgDa: return "arg-da";
    }
    return "?";
}

namespace {

std::string normalized_name(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (std::isalnum(static_cast<unsigned char>(ch))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

}  // namespace

Variant parse_variant(const std::string& name) {
    const std::string n = normalized_name(name);
    if (n == "dgada") return Variant::DgaDa;
    if (n == "dgaf" || n == "dgaplusf") return Variant::DgaPlusF;
    if (n == "dgaa" || n == "dgaplusa") return Variant::DgaPlusA;
    if (n == "argda") return Variant::ArgDa;
    throw Error("unknown variant '" + name + "' (expected dga-da, dga+f, dga+a or arg-da)");
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v{Variant::DgaDa, Variant::DgaPlusF, Variant::DgaPlusA, Variant::ArgDa};
    return v;
}

std::string to_string(const KernelSpec& spec) {
    switch (spec.type) {
    case KernelType::None: return "none";
    case KernelType::Linear: return "linear";
    case KernelType::Rbf: return "rbf";
    }
    return "?";
}

KernelSpec parse_kernel(const std::string& name) {
    const std::string n = normalized_name(name);
    if (n == "none" || n == "primal") return {KernelType::None, {}};
    if (n == "linear") return {KernelType::Linear, {}};
    if (n == "rbf") return {KernelType::Rbf, {}};
    throw Error("unknown kernel '" + name + "' (expected none, linear or rbf)");
}

Matrix build_kernel(const Matrix& x, const KernelSpec& spec) {
    check_features(x);
    switch (spec.type) {
    case KernelType::None: throw Error("build_kernel called without a kernel");
    case KernelType::Linear: {
        Matrix k = x.transpose() * x;
        return (k + k.transpose()) / 2.0;
    }
    case KernelType::Rbf: {
        const Matrix d2 = squared_distances(x);
        double sigma = spec.bandwidth.sigma;
        if (spec.bandwidth.mode == Bandwidth::Mode::Median) sigma = median_distance(d2);
        if (!(sigma > 0)) throw Error("kernel bandwidth must be positive");
        return (-d2 / (2.0 * sigma * sigma)).array().exp().matrix();
    }
    }
    throw Error("unknown kernel type");
}

void SolverConfig::validate() const {
    if (k < 1) throw Error("k must be at least 1");
    if (iterations < 1) throw Error("iteration cap must be at least 1");
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw Error("lambda must be a finite nonnegative value");
    if (neighbors < 1) throw Error("neighbor count must be at least 1");
    if (sigma.mode == Bandwidth::Mode::Fixed && !(sigma.sigma > 0)) throw Error("sigma must be positive");
    if (kernel.type == KernelType::Rbf && kernel.bandwidth.mode == Bandwidth::Mode::Fixed && !(kernel.bandwidth.sigma > 0))
        throw Error("kernel bandwidth must be positive");
    if (!(attention_floor >= 0 && attention_floor < 1)) throw Error("attention floor must lie in [0, 1)");
}

namespace {

struct Context {
    const SolverConfig& config;
    int neighbors;
};

// Affinity on representation r, attention-weighted when requested.
Matrix graph_weights(const Matrix& r, const DomainSplit& labelled, GraphTerm term, const Context& ctx) {
    auto w = build_affinity(r, ctx.neighbors, ctx.config.sigma).values;
    if (term == GraphTerm::Arg && !ctx.config.uniform_attention)
        w = w.cwiseProduct(compute_attention_map(r, labelled, ctx.config.attention_floor));
    return w;
}

int count_changes(const Labels& a, const Labels& b) {
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

}  // namespace

RunReport run(const Matrix& x, const DomainSplit& split, const SolverConfig& config, const std::optional<Labels>& truth) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    split.validate();
    check_features(x, split);
    if (split.n_target < 1) throw Error("run requires at least one target sample");
    if (truth && static_cast<int>(truth->size()) != split.n_target) throw Error("truth label count does not match n_target");

    const VariantTerms terms = variant_terms(config.variant);
    const Context ctx{config, std::min(config.neighbors, split.n() - 1)};

    RunReport report;
    Labels pseudo = nn_pseudo_label(x, split);
    if (truth) report.baseline_accuracy = accuracy(pseudo, *truth);

    const bool kernelized = config.kernel.type != KernelType::None;
    const Matrix features = kernelized ? build_kernel(x, config.kernel) : x;
    const int k = std::min<int>(config.k, static_cast<int>(features.rows()));

    // Round 0 initializes with M0 only and is not recorded.
    Matrix stage1_input = x;
    for (int round = 0; round <= config.iterations; ++round) {
        try {
            const DomainSplit labelled = split.with_target_labels(pseudo);
            const Matrix m = round == 0 ? build_m0(labelled).values : assemble_mstar(labelled, config.use_repulsive).values;

            Pencil<double> pencil;
            if (terms.stage1 == GraphTerm::None) {
                pencil = assemble_pencil<double>(features, m, config.lambda);
            } else {
                const Matrix w = graph_weights(stage1_input, labelled, terms.stage1, ctx);
                pencil = assemble_pencil<double>(features, m, normalized_laplacian(w).laplacian, config.lambda);
            }
            const Projection<double> proj = solve_generalized(pencil.s1, pencil.s2, k);
            Matrix z = project(features, proj);

            const Matrix w2 = graph_weights(z, labelled, terms.stage2, ctx);
            const auto prop = propagate<double>(w2, build_y0(labelled), config.alpha, split.n_source);

            const int changed = count_changes(prop.hard_target_labels, pseudo);
            pseudo = prop.hard_target_labels;
            stage1_input = std::move(z);

            if (round > 0) {
                IterationRecord rec;
                rec.iteration = round;
                if (truth) rec.accuracy = accuracy(pseudo, *truth);
                rec.changed = changed;
                rec.eigenvalue_sum = proj.eigenvalues.sum();
                report.iterations.push_back(rec);
                if (changed == 0 && config.early_stop) break;
            }
        } catch (const Error& e) {
            throw Error("iteration " + std::to_string(round) + ": " + e.what());
        }
    }

    report.final_labels = pseudo;
    if (truth) report.final_accuracy = accuracy(pseudo, *truth);
    report.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace argda
