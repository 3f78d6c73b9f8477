#pragma once

#include "argda/graph.hpp"
#include "argda/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace argda {

enum class Variant { DgaDa, DgaPlusF, DgaPlusA, ArgDa };
enum class GraphTerm { None, Plain, Arg };

struct VariantTerms {
    GraphTerm stage1;
    GraphTerm stage2;
};

VariantTerms variant_terms(Variant v);
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
const std::vector<Variant>& all_variants();

enum class KernelType { None, Linear, Rbf };

struct KernelSpec {
    KernelType type = KernelType::None;
    Bandwidth bandwidth;
};

std::string to_string(const KernelSpec& spec);
KernelSpec parse_kernel(const std::string& name);

Matrix build_kernel(const Matrix& x, const KernelSpec& spec);

struct SolverConfig {
    int k = 200;  // capped at the pencil dimension
    double lambda = 0.1;
    double alpha = 0.9;
    int iterations = 10;
    int neighbors = 5;
    Bandwidth sigma;
    KernelSpec kernel;
    Variant variant = Variant::ArgDa;
    bool use_repulsive = true;
    double attention_floor = 0.0;
    bool uniform_attention = false;
    bool early_stop = true;  // stop once an iteration leaves every pseudo-label unchanged
    std::uint64_t seed = 0;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    std::optional<double> accuracy;
    int changed = 0;
    double eigenvalue_sum = 0;

    bool operator==(const IterationRecord&) const = default;
};

struct RunReport {
    std::vector<IterationRecord> iterations;
    Labels final_labels;
    std::optional<double> baseline_accuracy;  // 1-NN, when truth is known
    std::optional<double> final_accuracy;
    double elapsed = 0;

    bool operator==(const RunReport&) const = default;
};

RunReport run(const Matrix& x, const DomainSplit& split, const SolverConfig& config,
              const std::optional<Labels>& truth = std::nullopt);

}  // namespace argda
