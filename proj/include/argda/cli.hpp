#pragma once

#include "argda/data_io.hpp"
#include "argda/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace argda::cli {

struct Invocation {
    std::string subcommand;  // run, ablate, synth or bench
    std::optional<std::string> manifest;
    std::optional<std::string> synth;

    std::optional<std::string> variant;
    std::optional<int> k;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<int> iterations;
    std::optional<int> neighbors;
    std::optional<double> sigma;
    std::optional<std::string> kernel;
    std::optional<double> kernel_sigma;
    std::optional<std::uint64_t> seed;
    double attention_floor = 0.0;
    bool uniform_attention = false;
    bool no_repulsive = false;

    int jobs = 1;
    std::optional<std::string> out;
    std::string format = "json";
    bool timing = false;

    std::vector<int> sweep_k;
    std::vector<double> sweep_lambda;
    std::vector<double> sweep_alpha;
    bool convergence = false;
};

// Parses argv-style arguments (without the program name). Throws Error on bad input;
// returns nullopt when help was requested and already printed to out.
std::optional<Invocation> parse_invocation(const std::vector<std::string>& args, std::ostream& out);

// CLI flag > manifest field > built-in default.
SolverConfig resolve_config(const Invocation& inv, const ConfigOverrides& manifest = {});

int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_ablate(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_synth(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream& err);

// Entry point shared by the executable and in-process tests.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace argda::cli
