#pragma once

#include "argda/graph.hpp"
#include "argda/types.hpp"

#include <string>

namespace argda {

template <typename Scalar>
struct PropagationResult {
    Mat<Scalar> soft_labels;  // n x C
    Labels hard_target_labels;
    Scalar alpha = 0;
};

// One-hot rows: ground truth for source samples, pseudo-labels for target samples.
template <typename Scalar = double>
Mat<Scalar> build_y0(const DomainSplit& split) {
    if (!split.has_target_labels()) throw Error("initial label matrix requires target pseudo-labels");
    if (split.classes < 1) throw Error("class count must be positive");
    if (static_cast<int>(split.source_labels.size()) != split.n_source ||
        static_cast<int>(split.target_labels->size()) != split.n_target)
        throw Error("label counts do not match the split");
    Mat<Scalar> y = Mat<Scalar>::Zero(split.n(), split.classes);
    auto set = [&](Eigen::Index row, int label) {
        if (label < 1 || label > split.classes)
            throw Error("label " + std::to_string(label) + " outside 1.." + std::to_string(split.classes));
        y(row, label - 1) = Scalar(1);
    };
    for (int i = 0; i < split.n_source; ++i) set(i, split.source_labels[i]);
    for (int j = 0; j < split.n_target; ++j) set(split.n_source + j, (*split.target_labels)[j]);
    return y;
}

// Row argmax (ties to the lowest column) returned as 1-based class ids.
template <typename Scalar>
Labels row_argmax(const Mat<Scalar>& y, Eigen::Index first_row) {
    Labels out(static_cast<std::size_t>(y.rows() - first_row));
    for (Eigen::Index i = first_row; i < y.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < y.cols(); ++c)
            if (y(i, c) > y(i, best)) best = c;
        out[static_cast<std::size_t>(i - first_row)] = static_cast<int>(best) + 1;
    }
    return out;
}

// Solves (D + eps I - alpha W) Y = Y0 and labels the rows after n_source.
template <typename Scalar>
PropagationResult<Scalar> propagate(const Mat<Scalar>& w, const Mat<Scalar>& y0, Scalar alpha, int n_source) {
    const Eigen::Index n = w.rows();
    if (w.cols() != n || y0.rows() != n) throw Error("propagation: dimension mismatch");
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
    if (n_source < 0 || n_source > n) throw Error("propagation: bad source count");

    Mat<Scalar> system = -alpha * w;
    system.diagonal() += w.rowwise().sum();
    system.diagonal().array() += Scalar(kDegreeGuard);
    Eigen::LLT<Mat<Scalar>> llt(system);
    if (llt.info() != Eigen::Success) throw Error("propagation: factorization of D - alpha*W failed");

    PropagationResult<Scalar> out;
    out.alpha = alpha;
    out.soft_labels = llt.solve(y0);
    out.hard_target_labels = row_argmax(out.soft_labels, n_source);
    return out;
}

}  // namespace argda
