#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace argda {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;

// Class ids are dense, 1..C.
using Labels = std::vector<int>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Samples are columns: source columns 0..n_source-1, then target columns.
struct DomainSplit {
    int n_source = 0;
    int n_target = 0;
    int classes = 0;
    Labels source_labels;
    std::optional<Labels> target_labels;

    int n() const { return n_source + n_target; }
    bool has_target_labels() const { return target_labels.has_value(); }

    void validate() const {
        if (classes < 1) throw Error("class count must be positive");
        if (n_source < 1) throw Error("at least one source sample is required");
        if (n_target < 0) throw Error("negative target count");
        if (static_cast<int>(source_labels.size()) != n_source)
            throw Error("source label count " + std::to_string(source_labels.size()) +
                        " does not match n_source " + std::to_string(n_source));
        std::vector<int> seen(classes, 0);
        for (int y : source_labels) {
            if (y < 1 || y > classes)
                throw Error("source label " + std::to_string(y) + " outside 1.." + std::to_string(classes));
            ++seen[y - 1];
        }
        for (int c = 0; c < classes; ++c)
            if (seen[c] == 0) throw Error("class " + std::to_string(c + 1) + " has no source samples");
        if (target_labels) {
            if (static_cast<int>(target_labels->size()) != n_target)
                throw Error("target label count does not match n_target");
            for (int y : *target_labels)
                if (y < 1 || y > classes)
                    throw Error("target label " + std::to_string(y) + " outside 1.." + std::to_string(classes));
        }
    }

    DomainSplit with_target_labels(Labels labels) const {
        DomainSplit out = *this;
        out.target_labels = std::move(labels);
        return out;
    }
};

template <typename Derived>
void check_features(const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() < 1) throw Error("feature matrix needs at least one row");
    if (x.cols() < 2) throw Error("feature matrix needs at least two samples");
    if (!x.allFinite()) throw Error("feature matrix contains non-finite values");
}

template <typename Derived>
void check_features(const Eigen::MatrixBase<Derived>& x, const DomainSplit& split) {
    check_features(x);
    if (x.cols() != split.n())
        throw Error("feature matrix has " + std::to_string(x.cols()) + " columns, split expects " +
                    std::to_string(split.n()));
}

}  // namespace argda
