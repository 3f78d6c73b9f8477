#pragma once

#include "argda/pipeline.hpp"
#include "argda/synthetic.hpp"
#include "argda/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace argda {

// Raw matrix files: three little-endian uint64 (l, n, magic) then l*n doubles, one sample per column.
inline constexpr std::uint64_t kBinaryMagic = 0x3436464144475241ULL;  // "ARGDAF64"

// Feature files hold one sample per row; the result is l x n with samples as columns.
Matrix read_feature_file(const std::string& path);
Matrix read_csv_features(const std::string& path);
Matrix read_binary_features(const std::string& path);
void write_csv_features(const std::string& path, const Matrix& x);
void write_binary_features(const std::string& path, const Matrix& x);

std::vector<std::string> read_label_file(const std::string& path);

// Dense ids 1..C: numeric order when every name is an integer, lexicographic otherwise.
struct LabelMap {
    std::vector<std::string> names;  // names[c - 1]
    int id(const std::string& name) const;
};
LabelMap make_label_map(const std::vector<std::string>& labels);

// Each feature row to mean 0 and unit population variance; constant rows are only centred.
void zscore_rows(Matrix& x);

// Optional solver settings a manifest may carry; CLI flags take precedence.
struct ConfigOverrides {
    std::optional<int> k;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<int> iterations;
    std::optional<int> neighbors;
    std::optional<double> sigma;
    std::optional<std::string> kernel;
    std::optional<std::string> variant;
    std::optional<std::uint64_t> seed;
};

struct Manifest {
    std::string source_features;
    std::string target_features;
    std::string source_labels;
    std::optional<std::string> target_labels;
    int feature_dim = 0;
    int n_source = 0;
    int n_target = 0;
    int classes = 0;
    bool zscore = false;
    ConfigOverrides config;
};

// Relative paths are resolved against the manifest's directory.
Manifest read_manifest(const std::string& path);

struct Dataset {
    Matrix features;
    DomainSplit split;
    std::optional<Labels> truth;
    LabelMap labels;
    Manifest manifest;
};

Dataset load_dataset(const std::string& manifest_path);

// Writes CSV features, label files and manifest.json into dir; returns the manifest path.
std::string save_dataset(const SyntheticTask& task, const std::string& dir);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(const std::string& name);

struct ReportOptions {
    bool include_elapsed = false;
    std::map<std::string, std::string> metadata;
};

void save_report(const RunReport& report, const std::string& path, ReportFormat format,
                 const ReportOptions& options = {});
std::string report_to_json(const RunReport& report, const ReportOptions& options = {});
std::string report_to_csv(const RunReport& report);
RunReport report_from_json(const std::string& text);
RunReport load_report(const std::string& path);

}  // namespace argda
