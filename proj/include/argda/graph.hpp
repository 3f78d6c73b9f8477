#pragma once

#include "argda/domain.hpp"
#include "argda/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace argda {

struct Bandwidth {
    enum class Mode { Median, Fixed };
    Mode mode = Mode::Median;
    double sigma = 1.0;

    static Bandwidth median() { return {}; }
    static Bandwidth fixed(double s) { return {Mode::Fixed, s}; }
};

template <typename Scalar>
struct AffinityMatrix {
    Mat<Scalar> values;
    int neighbors = 0;
    Scalar sigma = 1;
};

template <typename Scalar>
struct ArgLaplacian {
    Mat<Scalar> laplacian;
    Vec<Scalar> degrees;
    Mat<Scalar> weights;  // W o AM
};

// Per-class distance tables; nullopt marks a pair with an empty sub-domain (or the diagonal).
template <typename Scalar>
using DistanceTable = std::vector<std::vector<std::optional<Scalar>>>;

template <typename Scalar>
struct SubdomainDistances {
    std::vector<std::optional<Scalar>> intra;
    DistanceTable<Scalar> rep_ss;
    DistanceTable<Scalar> rep_st;
};

template <typename Scalar>
struct RepulsionAttention {
    Mat<Scalar> ss;
    Mat<Scalar> st;
};

template <typename Derived>
Mat<typename Derived::Scalar> squared_distances(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.cols();
    Mat<Scalar> d2 = Mat<Scalar>::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) d2(i, j) = d2(j, i) = (x.col(i) - x.col(j)).squaredNorm();
    return d2;
}

// Median of the nonzero pairwise Euclidean distances; 1 when every pair coincides.
template <typename Scalar>
Scalar median_distance(const Mat<Scalar>& d2) {
    std::vector<Scalar> v;
    const Eigen::Index n = d2.rows();
    v.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i)
            if (d2(i, j) > 0) v.push_back(std::sqrt(d2(i, j)));
    if (v.empty()) return Scalar(1);
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    if (v.size() % 2 == 1) return v[m];
    const Scalar upper = v[m];
    const Scalar lower = *std::max_element(v.begin(), v.begin() + m);
    return (lower + upper) / Scalar(2);
}

template <typename Derived>
AffinityMatrix<typename Derived::Scalar> build_affinity(const Eigen::MatrixBase<Derived>& x, int p,
                                                        Bandwidth bw = Bandwidth::median()) {
    using Scalar = typename Derived::Scalar;
    check_features(x);
    const int n = static_cast<int>(x.cols());
    if (p < 1 || p > n - 1) throw Error("neighbor count " + std::to_string(p) + " outside 1.." + std::to_string(n - 1));
    if (bw.mode == Bandwidth::Mode::Fixed && !(bw.sigma > 0)) throw Error("bandwidth must be positive");

    const Mat<Scalar> d2 = squared_distances(x);
    const Scalar sigma = bw.mode == Bandwidth::Mode::Median ? median_distance(d2) : Scalar(bw.sigma);

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> edge =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    std::vector<int> order(n - 1);
    for (int j = 0; j < n; ++j) {
        std::iota(order.begin(), order.begin() + j, 0);
        std::iota(order.begin() + j, order.end(), j + 1);
        std::partial_sort(order.begin(), order.begin() + p, order.end(), [&](int a, int b) {
            return d2(a, j) < d2(b, j) || (d2(a, j) == d2(b, j) && a < b);
        });
        for (int t = 0; t < p; ++t) edge(order[t], j) = edge(j, order[t]) = true;
    }

    const Scalar scale = Scalar(2) * sigma * sigma;
    Mat<Scalar> w = Mat<Scalar>::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (edge(i, j)) w(i, j) = std::exp(-d2(i, j) / scale);
    return {w, p, sigma};
}

template <typename Derived>
SubdomainDistances<typename Derived::Scalar> subdomain_distances(const Eigen::MatrixBase<Derived>& z,
                                                                 const DomainSplit& split) {
    using Scalar = typename Derived::Scalar;
    if (!split.has_target_labels()) throw Error("sub-domain distances require target pseudo-labels");
    check_features(z, split);
    const auto idx = build_subdomain_index(split);
    const int C = idx.class_count();

    auto mean_of = [&](const std::vector<int>& cols) -> std::optional<Vec<Scalar>> {
        if (cols.empty()) return std::nullopt;
        Vec<Scalar> m = Vec<Scalar>::Zero(z.rows());
        for (int i : cols) m += z.col(i);
        return Vec<Scalar>(m / Scalar(cols.size()));
    };
    std::vector<std::optional<Vec<Scalar>>> ms(C), mt(C);
    for (int c = 1; c <= C; ++c) {
        ms[c - 1] = mean_of(idx[c].source);
        mt[c - 1] = mean_of(idx[c].target);
    }
    auto gap = [](const std::optional<Vec<Scalar>>& a, const std::optional<Vec<Scalar>>& b) -> std::optional<Scalar> {
        if (!a || !b) return std::nullopt;
        return (*a - *b).squaredNorm();
    };

    SubdomainDistances<Scalar> out;
    out.intra.resize(C);
    out.rep_ss.assign(C, std::vector<std::optional<Scalar>>(C));
    out.rep_st.assign(C, std::vector<std::optional<Scalar>>(C));
    for (int c = 0; c < C; ++c) {
        out.intra[c] = gap(ms[c], mt[c]);
        for (int r = 0; r < C; ++r) {
            if (r == c) continue;
            out.rep_ss[c][r] = gap(ms[c], ms[r]);
            out.rep_st[c][r] = gap(ms[c], mt[r]);
        }
    }
    return out;
}

namespace detail {

template <typename Scalar>
struct Range {
    bool any = false;
    Scalar lo = 0, hi = 0;
    void add(Scalar v) {
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    Scalar normalize(const std::optional<Scalar>& v, Scalar floor) const {
        if (!v || !(hi > lo)) return Scalar(1);
        const Scalar unit = (*v - lo) / (hi - lo);
        return floor == Scalar(0) ? unit : floor + (Scalar(1) - floor) * unit;
    }
};

}  // namespace detail

// Min-max over present entries; absent entries and a degenerate range give 1.
// A nonzero floor remaps present values to floor + (1 - floor) * v.
template <typename Scalar>
std::vector<Scalar> attraction_attention(const std::vector<std::optional<Scalar>>& intra, Scalar floor = 0) {
    detail::Range<Scalar> range;
    for (const auto& v : intra)
        if (v) range.add(*v);
    std::vector<Scalar> out(intra.size());
    for (std::size_t c = 0; c < intra.size(); ++c) out[c] = range.normalize(intra[c], floor);
    return out;
}

// Both tables share one min-max range.
template <typename Scalar>
RepulsionAttention<Scalar> repulsion_attention(const DistanceTable<Scalar>& rep_ss, const DistanceTable<Scalar>& rep_st,
                                               Scalar floor = 0) {
    const auto C = static_cast<Eigen::Index>(rep_ss.size());
    if (static_cast<Eigen::Index>(rep_st.size()) != C) throw Error("repulsion tables differ in size");
    detail::Range<Scalar> range;
    for (const auto* table : {&rep_ss, &rep_st})
        for (const auto& row : *table)
            for (const auto& v : row)
                if (v) range.add(*v);
    RepulsionAttention<Scalar> out{Mat<Scalar>::Ones(C, C), Mat<Scalar>::Ones(C, C)};
    for (Eigen::Index c = 0; c < C; ++c)
        for (Eigen::Index r = 0; r < C; ++r) {
            out.ss(c, r) = range.normalize(rep_ss[c][r], floor);
            out.st(c, r) = range.normalize(rep_st[c][r], floor);
        }
    return out;
}

// Broadcasts the class-level attention values to every sample pair, then symmetrizes.
template <typename Scalar>
Mat<Scalar> build_attention_map(const DomainSplit& split, const std::vector<Scalar>& a_att, const Mat<Scalar>& r_ss,
                                const Mat<Scalar>& r_st) {
    if (!split.has_target_labels()) throw Error("attention map requires target pseudo-labels");
    split.validate();
    const int C = split.classes;
    if (static_cast<int>(a_att.size()) != C || r_ss.rows() != C || r_ss.cols() != C || r_st.rows() != C ||
        r_st.cols() != C)
        throw Error("attention inputs do not match class count");

    // Groups 0..C-1 are source classes, C..2C-1 target classes.
    Mat<Scalar> table = Mat<Scalar>::Ones(2 * C, 2 * C);
    for (int c = 0; c < C; ++c) {
        table(c, C + c) = table(C + c, c) = a_att[c];
        for (int r = 0; r < C; ++r) {
            if (r == c) continue;
            table(c, r) = r_ss(c, r);
            table(c, C + r) = table(C + r, c) = r_st(c, r);
        }
    }

    const int n = split.n();
    std::vector<int> group(n);
    for (int i = 0; i < split.n_source; ++i) group[i] = split.source_labels[i] - 1;
    for (int j = 0; j < split.n_target; ++j) group[split.n_source + j] = C + (*split.target_labels)[j] - 1;

    Mat<Scalar> am(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) am(i, j) = table(group[i], group[j]);
    for (int j = 0; j < n; ++j) {
        am(j, j) = Scalar(1);
        for (int i = j + 1; i < n; ++i) am(i, j) = am(j, i) = (am(i, j) + am(j, i)) / Scalar(2);
    }
    return am;
}

// Distances, both attention normalizations and the broadcast, on representation z.
template <typename Derived>
Mat<typename Derived::Scalar> compute_attention_map(const Eigen::MatrixBase<Derived>& z, const DomainSplit& split,
                                                    typename Derived::Scalar floor = 0) {
    const auto dist = subdomain_distances(z, split);
    const auto a = attraction_attention(dist.intra, floor);
    const auto r = repulsion_attention(dist.rep_ss, dist.rep_st, floor);
    return build_attention_map(split, a, r.ss, r.st);
}

inline constexpr double kDegreeGuard = 1e-12;

// L = I - D^{-1/2} W D^{-1/2}; zero-degree rows use the guard degree.
template <typename Scalar>
ArgLaplacian<Scalar> normalized_laplacian(const Mat<Scalar>& w) {
    if (w.rows() != w.cols()) throw Error("affinity matrix must be square");
    const Eigen::Index n = w.rows();
    Vec<Scalar> d = w.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (d(i) == Scalar(0)) d(i) = Scalar(kDegreeGuard);
    const Vec<Scalar> s = d.cwiseSqrt().cwiseInverse();
    Mat<Scalar> l(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) l(i, j) = (i == j ? Scalar(1) : Scalar(0)) - w(i, j) * (s(i) * s(j));
    return {l, d, w};
}

template <typename Scalar>
ArgLaplacian<Scalar> build_arg(const AffinityMatrix<Scalar>& affinity, const Mat<Scalar>& am) {
    if (am.rows() != affinity.values.rows() || am.cols() != affinity.values.cols())
        throw Error("attention map and affinity differ in size");
    return normalized_laplacian<Scalar>(affinity.values.cwiseProduct(am));
}

}  // namespace argda
