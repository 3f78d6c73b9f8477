#pragma once

#include "argda/domain.hpp"
#include "argda/types.hpp"

#include <vector>

namespace argda {

enum class MmdKind { Marginal, Conditional, RepSourceTarget, RepTargetSource, RepSourceSource, Assembled };
enum class Repulsion { SourceTarget, TargetSource, SourceSource };

// n x n coefficient matrix whose quadratic form tr(A'XMX'A) is a squared mean discrepancy.
template <typename Scalar>
struct MmdMatrix {
    Mat<Scalar> values;
    MmdKind kind = MmdKind::Assembled;
    int cls = 0;  // class id for Conditional
};

namespace detail {

// Column e with e = 1/|a| on a and -1/|b| on b. Callers guarantee both sets are nonempty.
template <typename Scalar>
Vec<Scalar> contrast(int n, const std::vector<int>& a, const std::vector<int>& b) {
    Vec<Scalar> e = Vec<Scalar>::Zero(n);
    const Scalar wa = Scalar(1) / Scalar(a.size());
    const Scalar wb = Scalar(1) / Scalar(b.size());
    for (int i : a) e(i) += wa;
    for (int i : b) e(i) -= wb;
    return e;
}

template <typename Scalar>
Mat<Scalar> gram(const std::vector<Vec<Scalar>>& cols, int n) {
    if (cols.empty()) return Mat<Scalar>::Zero(n, n);
    Mat<Scalar> e(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) e.col(static_cast<Eigen::Index>(j)) = cols[j];
    const Mat<Scalar> g = e * e.transpose();
    return (g + g.transpose()) / Scalar(2);
}

template <typename Scalar>
std::vector<Vec<Scalar>> conditional_columns(const SubdomainIndex& idx, int n) {
    std::vector<Vec<Scalar>> cols;
    for (int c = 1; c <= idx.class_count(); ++c) {
        if (idx.source_count(c) == 0) throw Error("class " + std::to_string(c) + " has no source samples");
        if (idx.target_count(c) > 0) cols.push_back(contrast<Scalar>(n, idx[c].source, idx[c].target));
    }
    return cols;
}

template <typename Scalar>
std::vector<Vec<Scalar>> repulsive_columns(const SubdomainIndex& idx, int n, Repulsion dir) {
    std::vector<Vec<Scalar>> cols;
    const int C = idx.class_count();
    for (int c = 1; c <= C; ++c) {
        for (int r = 1; r <= C; ++r) {
            if (r == c) continue;
            const std::vector<int>* a = nullptr;
            const std::vector<int>* b = nullptr;
            switch (dir) {
            case Repulsion::SourceTarget: a = &idx[c].source; b = &idx[r].target; break;
            case Repulsion::TargetSource: a = &idx[c].target; b = &idx[r].source; break;
            case Repulsion::SourceSource: a = &idx[c].source; b = &idx[r].source; break;
            }
            if (a->empty() || b->empty()) continue;
            cols.push_back(contrast<Scalar>(n, *a, *b));
        }
    }
    return cols;
}

template <typename Scalar>
Vec<Scalar> marginal_column(const DomainSplit& split) {
    Vec<Scalar> e(split.n());
    e.head(split.n_source).setConstant(Scalar(1) / Scalar(split.n_source));
    if (split.n_target > 0) e.tail(split.n_target).setConstant(Scalar(-1) / Scalar(split.n_target));
    return e;
}

inline SubdomainIndex labelled_index(const DomainSplit& split, const char* what) {
    if (!split.has_target_labels()) throw Error(std::string(what) + " requires target pseudo-labels");
    return build_subdomain_index(split);
}

}  // namespace detail

template <typename Scalar = double>
MmdMatrix<Scalar> build_m0(const DomainSplit& split) {
    split.validate();
    const Vec<Scalar> e = detail::marginal_column<Scalar>(split);
    return {e * e.transpose(), MmdKind::Marginal, 0};
}

template <typename Scalar = double>
MmdMatrix<Scalar> build_mc(const DomainSplit& split, int c) {
    const auto idx = detail::labelled_index(split, "conditional MMD");
    if (c < 1 || c > idx.class_count()) throw Error("class id " + std::to_string(c) + " out of range");
    if (idx.source_count(c) == 0) throw Error("class " + std::to_string(c) + " has no source samples");
    const int n = split.n();
    MmdMatrix<Scalar> out{Mat<Scalar>::Zero(n, n), MmdKind::Conditional, c};
    if (idx.target_count(c) > 0) {
        const Vec<Scalar> e = detail::contrast<Scalar>(n, idx[c].source, idx[c].target);
        out.values = e * e.transpose();
    }
    return out;
}

template <typename Scalar = double>
MmdMatrix<Scalar> build_repulsive(const DomainSplit& split, Repulsion dir) {
    const auto idx = dir == Repulsion::SourceSource ? build_subdomain_index(split)
                                                     : detail::labelled_index(split, "repulsive MMD");
    static constexpr MmdKind kinds[] = {MmdKind::RepSourceTarget, MmdKind::RepTargetSource,
                                        MmdKind::RepSourceSource};
    const int n = split.n();
    return {detail::gram(detail::repulsive_columns<Scalar>(idx, n, dir), n), kinds[static_cast<int>(dir)], 0};
}

// M* = M0 + sum_c Mc - (M_st + M_ts + M_ss), or M0 + sum_c Mc without repulsion.
template <typename Scalar = double>
MmdMatrix<Scalar> assemble_mstar(const DomainSplit& split, bool use_repulsive = true) {
    const auto idx = detail::labelled_index(split, "M* assembly");
    const int n = split.n();
    auto attract = detail::conditional_columns<Scalar>(idx, n);
    attract.push_back(detail::marginal_column<Scalar>(split));
    MmdMatrix<Scalar> out{detail::gram(attract, n), MmdKind::Assembled, 0};
    if (use_repulsive) {
        std::vector<Vec<Scalar>> repel;
        for (auto dir : {Repulsion::SourceTarget, Repulsion::TargetSource, Repulsion::SourceSource}) {
            auto cols = detail::repulsive_columns<Scalar>(idx, n, dir);
            repel.insert(repel.end(), cols.begin(), cols.end());
        }
        out.values -= detail::gram(repel, n);
    }
    return out;
}

}  // namespace argda
