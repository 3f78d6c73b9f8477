#pragma once

#include "argda/types.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace argda {

// mt19937_64 with hand-rolled uniform and Box-Muller normal draws, so samples are
// identical on every standard library (the std distributions are implementation-defined).
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0;
    bool has_spare_ = false;
};

enum class SyntheticKind { GaussianShift, TwoMoonsShift };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::GaussianShift;
    int classes = 3;
    int per_class = 40;
    int dim = 16;
    double offset = 2.0;          // target translation along the nuisance diagonal
    double rotation_deg = 20.0;   // target rotation in the class plane
    double radius = 2.0;          // class centres on a circle in dims 0 and 1
    double spread = 0.5;          // within-class std in the class plane
    double noise = 1.25;          // std in the remaining dims
    std::uint64_t seed = 42;
};

struct SyntheticTask {
    Matrix features;  // dim x (2 * classes * per_class), source columns first
    DomainSplit split;
    Labels truth;     // target labels
};

SyntheticTask generate_synthetic(const SyntheticSpec& spec);

// "gaussian_shift:classes=3,per_class=40,offset=2,rotation=20,seed=7"; omitted keys keep defaults.
SyntheticSpec parse_synthetic_spec(const std::string& text);
std::string to_string(const SyntheticSpec& spec);

}  // namespace argda
