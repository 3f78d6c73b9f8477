#pragma once

// Random instance generators and brute-force oracles shared by the test binaries.

#include "argda/types.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace argda::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return real(0, 1) < p; }

    Matrix matrix(int rows, int cols, double scale = 1.0) {
        Matrix m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = real(-scale, scale);
        return m;
    }

    Matrix symmetric(int n) {
        Matrix m = matrix(n, n);
        return (m + m.transpose()) / 2.0;
    }

    // Every class 1..C appears at least once when n >= C.
    Labels covering_labels(int n, int classes) {
        Labels y(n);
        for (int i = 0; i < n; ++i) y[i] = i < classes ? i + 1 : integer(1, classes);
        for (int i = n - 1; i > 0; --i) std::swap(y[i], y[integer(0, i)]);
        return y;
    }

    Labels labels(int n, int classes) {
        Labels y(n);
        for (auto& v : y) v = integer(1, classes);
        return y;
    }

    // Random labelled split: n_s >= C so every class has a source sample.
    DomainSplit split(int classes, int n_source, int n_target) {
        DomainSplit s;
        s.classes = classes;
        s.n_source = n_source;
        s.n_target = n_target;
        s.source_labels = covering_labels(n_source, classes);
        s.target_labels = labels(n_target, classes);
        return s;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Mean of the given columns of z, or nullopt when there are none.
inline std::optional<Vector> column_mean(const Matrix& z, const std::vector<int>& cols) {
    if (cols.empty()) return std::nullopt;
    Vector m = Vector::Zero(z.rows());
    for (int c : cols) m += z.col(c);
    return Vector(m / static_cast<double>(cols.size()));
}

struct Groups {
    std::vector<std::vector<int>> source, target;  // [c - 1]
};

inline Groups groups_of(const DomainSplit& s) {
    Groups g;
    g.source.resize(s.classes);
    g.target.resize(s.classes);
    for (int i = 0; i < s.n_source; ++i) g.source[s.source_labels[i] - 1].push_back(i);
    if (s.target_labels)
        for (int j = 0; j < s.n_target; ++j) g.target[(*s.target_labels)[j] - 1].push_back(s.n_source + j);
    return g;
}

inline double gap(const std::optional<Vector>& a, const std::optional<Vector>& b) {
    return (a && b) ? (*a - *b).squaredNorm() : 0.0;
}

// Squared mean discrepancies computed straight from projected sub-domain means.
struct DirectDistances {
    double marginal = 0;
    std::vector<double> conditional;
    double source_target = 0, target_source = 0, source_source = 0;

    double assembled(bool repulsive) const {
        double v = marginal;
        for (double c : conditional) v += c;
        if (repulsive) v -= source_target + target_source + source_source;
        return v;
    }
};

inline DirectDistances direct_distances(const Matrix& z, const DomainSplit& s) {
    DirectDistances d;
    std::vector<int> src(s.n_source), tgt(s.n_target);
    for (int i = 0; i < s.n_source; ++i) src[i] = i;
    for (int j = 0; j < s.n_target; ++j) tgt[j] = s.n_source + j;
    d.marginal = gap(column_mean(z, src), column_mean(z, tgt));
    const Groups g = groups_of(s);
    for (int c = 0; c < s.classes; ++c) {
        d.conditional.push_back(gap(column_mean(z, g.source[c]), column_mean(z, g.target[c])));
        for (int r = 0; r < s.classes; ++r) {
            if (r == c) continue;
            d.source_target += gap(column_mean(z, g.source[c]), column_mean(z, g.target[r]));
            d.target_source += gap(column_mean(z, g.target[c]), column_mean(z, g.source[r]));
            d.source_source += gap(column_mean(z, g.source[c]), column_mean(z, g.source[r]));
        }
    }
    return d;
}

inline double trace_form(const Matrix& x, const Matrix& m, const Matrix& a) {
    return (a.transpose() * x * m * x.transpose() * a).trace();
}

inline bool close_rel(double got, double want, double rel, double abs_floor = 1e-13) {
    return std::abs(got - want) <= rel * std::abs(want) + abs_floor;
}

// Symmetric nonnegative weights with zero diagonal and a ring so no vertex is isolated.
inline Matrix random_weights(Gen& g, int n, double density = 0.3) {
    Matrix w = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = j + 1; i < n; ++i)
            if (g.coin(density)) w(i, j) = w(j, i) = g.real(0.05, 1.0);
    for (int i = 0; i < n && n > 1; ++i) {
        const int j = (i + 1) % n;
        if (i != j && w(i, j) == 0) w(i, j) = w(j, i) = g.real(0.05, 1.0);
    }
    return w;
}

}  // namespace argda::testing
