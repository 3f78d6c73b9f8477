#pragma once

#include "argda/types.hpp"

#include <cmath>
#include <string>

namespace argda {

template <typename Scalar>
struct Pencil {
    Mat<Scalar> s1;
    Mat<Scalar> s2;
};

template <typename Scalar>
struct Projection {
    Mat<Scalar> a;             // dim x k
    Vec<Scalar> eigenvalues;   // ascending
    Scalar ridge = 0;          // epsilon added to S2
};

namespace detail {

template <typename Scalar>
Mat<Scalar> symmetrized(const Mat<Scalar>& m) {
    return (m + m.transpose()) / Scalar(2);
}

template <typename Scalar>
void require_finite(const Mat<Scalar>& m, const char* name) {
    if (!m.allFinite()) throw Error(std::string(name) + " contains non-finite values");
}

template <typename Scalar>
Pencil<Scalar> pencil_from(const Mat<Scalar>& x, const Mat<Scalar>& m, Scalar lambda) {
    if (m.rows() != x.cols() || m.cols() != x.cols())
        throw Error("pencil: coefficient matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected " + std::to_string(x.cols()) + " square");
    if (lambda < 0) throw Error("lambda must be nonnegative");
    Pencil<Scalar> p;
    p.s1 = x * m * x.transpose();
    p.s1.diagonal().array() += lambda;
    p.s1 = symmetrized(p.s1);
    const Mat<Scalar> centred = x.colwise() - x.rowwise().mean();
    p.s2 = symmetrized<Scalar>(centred * centred.transpose());
    require_finite(p.s1, "S1");
    require_finite(p.s2, "S2");
    return p;
}

}  // namespace detail

// S1 = X M X' + lambda I, S2 = X H X' with H = I - 11'/n.
template <typename Scalar>
Pencil<Scalar> assemble_pencil(const Mat<Scalar>& x, const Mat<Scalar>& mstar, Scalar lambda) {
    return detail::pencil_from(x, mstar, lambda);
}

// Same with a graph Laplacian added to M*.
template <typename Scalar>
Pencil<Scalar> assemble_pencil(const Mat<Scalar>& x, const Mat<Scalar>& mstar, const Mat<Scalar>& graph,
                               Scalar lambda) {
    if (graph.rows() != mstar.rows() || graph.cols() != mstar.cols()) throw Error("pencil: graph term size mismatch");
    return detail::pencil_from<Scalar>(x, mstar + graph, lambda);
}

// k smallest eigenpairs of S1 a = phi (S2 + eps I) a, eps = 1e-9 tr(S2)/dim.
template <typename Scalar>
Projection<Scalar> solve_generalized(const Mat<Scalar>& s1, const Mat<Scalar>& s2, int k) {
    const Eigen::Index dim = s1.rows();
    if (s1.cols() != dim || s2.rows() != dim || s2.cols() != dim) throw Error("pencil matrices must be square and equal size");
    if (k < 1 || k > dim)
        throw Error("subspace dimension k=" + std::to_string(k) + " outside 1.." + std::to_string(dim));

    const Scalar ridge = Scalar(1e-9) * s2.trace() / Scalar(dim);
    Mat<Scalar> b = s2;
    b.diagonal().array() += ridge;
    Eigen::LLT<Mat<Scalar>> llt(b);
    if (llt.info() != Eigen::Success)
        throw Error("Cholesky of S2 + eps*I failed (eps=" + std::to_string(static_cast<double>(ridge)) +
                    ", tr(S2)=" + std::to_string(static_cast<double>(s2.trace())) + ")");

    const auto lower = llt.matrixL();
    Mat<Scalar> t = lower.solve(s1);
    Mat<Scalar> c = lower.solve(t.transpose().eval());
    c = detail::symmetrized(c);

    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(c);
    if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");

    Projection<Scalar> out;
    out.ridge = ridge;
    out.eigenvalues = es.eigenvalues().head(k);
    out.a = llt.matrixU().solve(es.eigenvectors().leftCols(k).eval());
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index arg = 0;
        out.a.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.a(arg, j) < 0) out.a.col(j) = -out.a.col(j);
    }
    return out;
}

template <typename Scalar>
Mat<Scalar> project(const Mat<Scalar>& x, const Projection<Scalar>& proj) {
    if (proj.a.rows() != x.rows())
        throw Error("projection has " + std::to_string(proj.a.rows()) + " rows, features have " +
                    std::to_string(x.rows()));
    return proj.a.transpose() * x;
}

}  // namespace argda
