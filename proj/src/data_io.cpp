#include "argda/data_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace argda {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error("write to '" + path + "' failed");
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? p : (base / path).string();
}

}  // namespace

Matrix read_csv_features(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0;
            const std::string t = trim(cell);
            if (!parse_double(t, v)) throw Error(path + ":" + std::to_string(lineno) + ": cannot parse '" + t + "' as a number");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                        " values, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(path + ": no samples");
    Matrix x(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < rows[j].size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    return x;
}

Matrix read_binary_features(const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "binary matrix format assumes a little-endian host");
    auto in = open_in(path, std::ios::binary);
    std::uint64_t header[3] = {0, 0, 0};
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in) throw Error(path + ": truncated header");
    if (header[2] != kBinaryMagic) throw Error(path + ": bad magic number");
    const auto l = header[0], n = header[1];
    if (l == 0 || n == 0 || l > (1ULL << 31) || n > (1ULL << 31)) throw Error(path + ": implausible dimensions");
    Matrix x(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(l * n * sizeof(double)));
    if (!in) throw Error(path + ": expected " + std::to_string(l * n) + " values, file is short");
    return x;
}

Matrix read_feature_file(const std::string& path) {
    return fs::path(path).extension() == ".bin" ? read_binary_features(path) : read_csv_features(path);
}

void write_csv_features(const std::string& path, const Matrix& x) {
    auto out = open_out(path);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) out << (i ? "," : "") << format_double(x(i, j));
        out << '\n';
    }
    finish_write(out, path);
}

void write_binary_features(const std::string& path, const Matrix& x) {
    auto out = open_out(path, std::ios::binary);
    const std::uint64_t header[3] = {static_cast<std::uint64_t>(x.rows()), static_cast<std::uint64_t>(x.cols()), kBinaryMagic};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
    finish_write(out, path);
}

std::vector<std::string> read_label_file(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (!t.empty()) labels.push_back(t);
    }
    return labels;
}

int LabelMap::id(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error("label '" + name + "' not present among source classes");
    return static_cast<int>(it - names.begin()) + 1;
}

LabelMap make_label_map(const std::vector<std::string>& labels) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    LabelMap map{{distinct.begin(), distinct.end()}};
    auto as_int = [](const std::string& s, long long& v) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && p == s.data() + s.size();
    };
    long long a = 0, b = 0;
    const bool numeric = std::all_of(map.names.begin(), map.names.end(), [&](const std::string& s) { return as_int(s, a); });
    if (numeric)
        std::sort(map.names.begin(), map.names.end(), [&](const std::string& x, const std::string& y) {
            as_int(x, a);
            as_int(y, b);
            return a < b;
        });
    return map;
}

void zscore_rows(Matrix& x) {
    const Eigen::Index n = x.cols();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        const double mean = row.mean();
        row.array() -= mean;
        const double sd = std::sqrt(row.squaredNorm() / static_cast<double>(n));
        if (sd > 0) row /= sd;
    }
}

namespace {

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

Manifest read_manifest(const std::string& path) {
    auto in = open_in(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": invalid JSON: " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    Manifest m;
    try {
        m.source_features = resolve(base, j.at("source_features").get<std::string>());
        m.target_features = resolve(base, j.at("target_features").get<std::string>());
        m.source_labels = resolve(base, j.at("source_labels").get<std::string>());
        if (j.contains("target_labels") && !j.at("target_labels").is_null())
            m.target_labels = resolve(base, j.at("target_labels").get<std::string>());
        m.feature_dim = j.at("feature_dim").get<int>();
        m.n_source = j.at("n_source").get<int>();
        m.n_target = j.at("n_target").get<int>();
        m.classes = j.at("classes").get<int>();
        m.zscore = j.value("zscore", false);
        if (j.contains("config")) {
            const json& c = j.at("config");
            read_optional(c, "k", m.config.k);
            read_optional(c, "lambda", m.config.lambda);
            read_optional(c, "alpha", m.config.alpha);
            read_optional(c, "iterations", m.config.iterations);
            read_optional(c, "neighbors", m.config.neighbors);
            read_optional(c, "sigma", m.config.sigma);
            read_optional(c, "kernel", m.config.kernel);
            read_optional(c, "variant", m.config.variant);
            read_optional(c, "seed", m.config.seed);
        }
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    return m;
}

Dataset load_dataset(const std::string& manifest_path) {
    Dataset d;
    d.manifest = read_manifest(manifest_path);
    const Manifest& m = d.manifest;

    auto load = [&](const std::string& p, int expect_n) {
        Matrix x = read_feature_file(p);
        if (x.rows() != m.feature_dim)
            throw Error(p + ": feature dimension " + std::to_string(x.rows()) + " does not match declared " +
                        std::to_string(m.feature_dim));
        if (x.cols() != expect_n)
            throw Error(p + ": " + std::to_string(x.cols()) + " samples, manifest declares " + std::to_string(expect_n));
        return x;
    };
    const Matrix xs = load(m.source_features, m.n_source);
    const Matrix xt = load(m.target_features, m.n_target);

    const auto src_names = read_label_file(m.source_labels);
    if (static_cast<int>(src_names.size()) != m.n_source)
        throw Error(m.source_labels + ": " + std::to_string(src_names.size()) + " labels, manifest declares " +
                    std::to_string(m.n_source));
    d.labels = make_label_map(src_names);
    if (static_cast<int>(d.labels.names.size()) != m.classes)
        throw Error(m.source_labels + ": " + std::to_string(d.labels.names.size()) + " distinct labels, manifest declares " +
                    std::to_string(m.classes) + " classes");

    d.features.resize(m.feature_dim, m.n_source + m.n_target);
    d.features << xs, xt;
    if (m.zscore) zscore_rows(d.features);

    d.split.n_source = m.n_source;
    d.split.n_target = m.n_target;
    d.split.classes = m.classes;
    for (const auto& s : src_names) d.split.source_labels.push_back(d.labels.id(s));

    if (m.target_labels) {
        const auto tgt_names = read_label_file(*m.target_labels);
        if (static_cast<int>(tgt_names.size()) != m.n_target)
            throw Error(*m.target_labels + ": " + std::to_string(tgt_names.size()) + " labels, manifest declares " +
                        std::to_string(m.n_target));
        Labels truth;
        for (std::size_t i = 0; i < tgt_names.size(); ++i) {
            try {
                truth.push_back(d.labels.id(tgt_names[i]));
            } catch (const Error& e) {
                throw Error(*m.target_labels + ":" + std::to_string(i + 1) + ": " + e.what());
            }
        }
        d.truth = std::move(truth);
    }
    d.split.validate();
    return d;
}

std::string save_dataset(const SyntheticTask& task, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
    const fs::path base(dir);
    const int ns = task.split.n_source, nt = task.split.n_target;
    write_csv_features((base / "source.csv").string(), task.features.leftCols(ns));
    write_csv_features((base / "target.csv").string(), task.features.rightCols(nt));
    auto write_labels = [](const std::string& p, const Labels& y) {
        auto out = open_out(p);
        for (int v : y) out << v << '\n';
        finish_write(out, p);
    };
    write_labels((base / "source_labels.csv").string(), task.split.source_labels);
    write_labels((base / "target_labels.csv").string(), task.truth);

    json j = {{"source_features", "source.csv"},  {"target_features", "target.csv"},
              {"source_labels", "source_labels.csv"}, {"target_labels", "target_labels.csv"},
              {"feature_dim", task.features.rows()}, {"n_source", ns},
              {"n_target", nt},                      {"classes", task.split.classes},
              {"zscore", false}};
    const std::string path = (base / "manifest.json").string();
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish_write(out, path);
    return path;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw Error("unknown report format '" + name + "' (expected json or csv)");
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string report_to_json(const RunReport& r, const ReportOptions& options) {
    json iters = json::array();
    for (const auto& it : r.iterations)
        iters.push_back({{"iteration", it.iteration},
                         {"accuracy", optional_json(it.accuracy)},
                         {"changed", it.changed},
                         {"eigenvalue_sum", it.eigenvalue_sum}});
    json j;
    j["meta"] = options.metadata;
    j["iterations"] = iters;
    j["final_labels"] = r.final_labels;
    j["baseline_accuracy"] = optional_json(r.baseline_accuracy);
    j["final_accuracy"] = optional_json(r.final_accuracy);
    if (options.include_elapsed) j["elapsed"] = r.elapsed;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& r) {
    std::string out = "iteration,accuracy,changed,eigenvalue_sum\n";
    for (const auto& it : r.iterations)
        out += std::to_string(it.iteration) + "," + (it.accuracy ? format_double(*it.accuracy) : "") + "," +
               std::to_string(it.changed) + "," + format_double(it.eigenvalue_sum) + "\n";
    return out;
}

void save_report(const RunReport& report, const std::string& path, ReportFormat format, const ReportOptions& options) {
    const std::string text = format == ReportFormat::Json ? report_to_json(report, options) : report_to_csv(report);
    auto out = open_out(path, std::ios::binary);
    out << text;
    finish_write(out, path);
}

RunReport report_from_json(const std::string& text) {
    RunReport r;
    try {
        const json j = json::parse(text);
        for (const auto& it : j.at("iterations")) {
            IterationRecord rec;
            rec.iteration = it.at("iteration").get<int>();
            rec.accuracy = optional_from(it, "accuracy");
            rec.changed = it.at("changed").get<int>();
            rec.eigenvalue_sum = it.at("eigenvalue_sum").get<double>();
            r.iterations.push_back(rec);
        }
        r.final_labels = j.at("final_labels").get<Labels>();
        r.baseline_accuracy = optional_from(j, "baseline_accuracy");
        r.final_accuracy = optional_from(j, "final_accuracy");
        r.elapsed = j.value("elapsed", 0.0);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
    return r;
}

RunReport load_report(const std::string& path) {
    auto in = open_in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return report_from_json(text);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace argda
