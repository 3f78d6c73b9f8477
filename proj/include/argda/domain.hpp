#pragma once

#include "argda/types.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace argda {

// Zero-based column indices of one class in each domain.
struct Subdomain {
    std::vector<int> source;
    std::vector<int> target;
};

struct SubdomainIndex {
    std::vector<Subdomain> classes;  // classes[c - 1]
    bool target_labelled = false;

    int class_count() const { return static_cast<int>(classes.size()); }
    int source_count(int c) const { return static_cast<int>(classes.at(c - 1).source.size()); }
    int target_count(int c) const { return static_cast<int>(classes.at(c - 1).target.size()); }
    const Subdomain& operator[](int c) const { return classes.at(c - 1); }
};

inline SubdomainIndex build_subdomain_index(const DomainSplit& split) {
    split.validate();
    SubdomainIndex idx;
    idx.classes.resize(split.classes);
    for (int i = 0; i < split.n_source; ++i) idx.classes[split.source_labels[i] - 1].source.push_back(i);
    if (split.target_labels) {
        idx.target_labelled = true;
        for (int j = 0; j < split.n_target; ++j)
            idx.classes[(*split.target_labels)[j] - 1].target.push_back(split.n_source + j);
    }
    return idx;
}

// Inverse of build_subdomain_index: (source labels, target labels).
inline std::pair<Labels, Labels> flatten(const SubdomainIndex& idx, int n_source, int n_target) {
    Labels src(n_source, 0), tgt(idx.target_labelled ? n_target : 0, 0);
    for (int c = 1; c <= idx.class_count(); ++c) {
        for (int i : idx[c].source) src[i] = c;
        for (int j : idx[c].target) tgt[j - n_source] = c;
    }
    return {src, tgt};
}

// 1-NN from target columns to source columns; ties go to the lowest source index.
template <typename Derived>
Labels nn_pseudo_label(const Eigen::MatrixBase<Derived>& x, const DomainSplit& split) {
    using Scalar = typename Derived::Scalar;
    split.validate();
    check_features(x, split);
    Labels out(split.n_target);
    for (int j = 0; j < split.n_target; ++j) {
        const auto t = x.col(split.n_source + j);
        Scalar best = std::numeric_limits<Scalar>::infinity();
        int arg = 0;
        for (int i = 0; i < split.n_source; ++i) {
            const Scalar d = (x.col(i) - t).squaredNorm();
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        out[j] = split.source_labels[arg];
    }
    return out;
}

inline double accuracy(const Labels& predicted, const Labels& truth) {
    if (predicted.size() != truth.size())
        throw Error("accuracy: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
    if (predicted.empty()) throw Error("accuracy: empty label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace argda
