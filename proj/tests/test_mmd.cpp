#include "argda/mmd.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace argda;
using argda::testing::Gen;

namespace {

DomainSplit labelled(Labels src, Labels tgt, int classes) {
    DomainSplit s;
    s.classes = classes;
    s.n_source = static_cast<int>(src.size());
    s.n_target = static_cast<int>(tgt.size());
    s.source_labels = std::move(src);
    s.target_labels = std::move(tgt);
    return s;
}

Matrix pair_pattern(double scale) {
    Matrix m(2, 2);
    m << 1, -1, -1, 1;
    return scale * m;
}

}  // namespace

TEST_CASE("M0 entries for two source and two target samples") {
    const auto m = build_m0(labelled({1, 1}, {1, 1}, 1)).values;
    CHECK(m.topLeftCorner(2, 2).isApproxToConstant(0.25));
    CHECK(m.bottomRightCorner(2, 2).isApproxToConstant(0.25));
    CHECK(m.topRightCorner(2, 2).isApproxToConstant(-0.25));
    CHECK(std::abs(m.sum()) < 1e-15);
}

TEST_CASE("M0 for one sample per domain") {
    CHECK(build_m0(labelled({1}, {1}, 1)).values == pair_pattern(1));
}

TEST_CASE("M0 quadratic form is the squared mean gap") {
    Matrix x(1, 4);
    x << 0, 2, 1, 3;
    const auto m = build_m0(labelled({1, 1}, {1, 1}, 1)).values;
    CHECK((x * m * x.transpose())(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Mc marks one source and one target sample") {
    const auto m = build_mc(labelled({1, 2}, {1, 2}, 2), 1).values;
    Matrix want = Matrix::Zero(4, 4);
    want(0, 0) = want(2, 2) = 1;
    want(0, 2) = want(2, 0) = -1;
    CHECK(m == want);
}

TEST_CASE("Mc is zero when the target sub-domain is empty") {
    const auto m = build_mc(labelled({1, 2}, {1, 1}, 2), 2);
    CHECK(m.values.isZero(0));
    CHECK(m.kind == MmdKind::Conditional);
    CHECK(m.cls == 2);
}

TEST_CASE("Mc quadratic form is the squared gap of class means") {
    Gen g(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = g.split(3, 9, 9);
        const Matrix x = g.matrix(1, 18, 4.0);
        const auto gr = testing::groups_of(s);
        for (int c = 1; c <= 3; ++c) {
            const double direct = testing::gap(testing::column_mean(x, gr.source[c - 1]), testing::column_mean(x, gr.target[c - 1]));
            const double form = (x * build_mc(s, c).values * x.transpose())(0, 0);
            CHECK(testing::close_rel(form, direct, 1e-10));
        }
    }
}

TEST_CASE("source-source repulsion counts both ordered pairs") {
    const auto m = build_repulsive(labelled({1, 2}, {1, 2}, 2), Repulsion::SourceSource).values;
    CHECK(m.topLeftCorner(2, 2) == pair_pattern(2));
    CHECK(m.bottomRows(2).isZero(0));
    CHECK(m.rightCols(2).isZero(0));
}

TEST_CASE("repulsion vanishes for a single class") {
    for (auto dir : {Repulsion::SourceTarget, Repulsion::TargetSource, Repulsion::SourceSource})
        CHECK(build_repulsive(labelled({1, 1}, {1}, 1), dir).values.isZero(0));
}

TEST_CASE("repulsive quadratic forms match brute-force pair sums") {
    Gen g(22);
    for (int trial = 0; trial < 30; ++trial) {
        const int C = g.integer(2, 4);
        const auto s = g.split(C, g.integer(C, 12), g.integer(1, 12));
        const Matrix x = g.matrix(3, s.n(), 2.0);
        const Matrix a = g.matrix(3, 2);
        const auto d = testing::direct_distances(a.transpose() * x, s);
        CHECK(testing::close_rel(testing::trace_form(x, build_repulsive(s, Repulsion::SourceTarget).values, a), d.source_target, 1e-10));
        CHECK(testing::close_rel(testing::trace_form(x, build_repulsive(s, Repulsion::TargetSource).values, a), d.target_source, 1e-10));
        CHECK(testing::close_rel(testing::trace_form(x, build_repulsive(s, Repulsion::SourceSource).values, a), d.source_source, 1e-10));
    }
}

TEST_CASE("source-target and target-source repulsion coincide under ordered pairs") {
    Gen g(23);
    const auto s = g.split(3, 10, 10);
    const Matrix st = build_repulsive(s, Repulsion::SourceTarget).values;
    const Matrix ts = build_repulsive(s, Repulsion::TargetSource).values;
    CHECK((st - ts).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("M* without repulsion for the smallest case") {
    const auto s = labelled({1}, {1}, 1);
    CHECK(assemble_mstar(s, false).values.isApprox(pair_pattern(2)));
    CHECK(assemble_mstar(s, true).values.isApprox(pair_pattern(2)));
}

TEST_CASE("M* equals the sum of its parts") {
    Gen g(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = g.split(3, 8, 8);
        Matrix sum = build_m0(s).values;
        for (int c = 1; c <= 3; ++c) sum += build_mc(s, c).values;
        CHECK((assemble_mstar(s, false).values - sum).cwiseAbs().maxCoeff() < 1e-14);
        for (auto dir : {Repulsion::SourceTarget, Repulsion::TargetSource, Repulsion::SourceSource})
            sum -= build_repulsive(s, dir).values;
        CHECK((assemble_mstar(s, true).values - sum).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("every matrix is symmetric with zero entry sum") {
    Gen g(25);
    for (int trial = 0; trial < 40; ++trial) {
        const int C = g.integer(1, 4);
        const auto s = g.split(C, g.integer(C, 15), g.integer(1, 15));
        std::vector<Matrix> all{build_m0(s).values, assemble_mstar(s, true).values, assemble_mstar(s, false).values};
        for (int c = 1; c <= C; ++c) all.push_back(build_mc(s, c).values);
        for (auto dir : {Repulsion::SourceTarget, Repulsion::TargetSource, Repulsion::SourceSource})
            all.push_back(build_repulsive(s, dir).values);
        for (const auto& m : all) {
            CHECK(m == m.transpose());
            CHECK(std::abs(m.sum()) < 1e-12);
        }
    }
}

TEST_CASE("M0 and Mc are rank one PSD") {
    Gen g(26);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = g.split(3, 10, 10);
        std::vector<Matrix> all{build_m0(s).values};
        for (int c = 1; c <= 3; ++c) all.push_back(build_mc(s, c).values);
        for (const auto& m : all) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
            const Vector ev = es.eigenvalues();
            CHECK(ev.minCoeff() > -1e-12);
            CHECK((ev.array() > 1e-12).count() <= 1);
            const Vector v = g.matrix(20, 1).col(0);
            CHECK(v.dot(m * v) >= -1e-12);
        }
    }
}

TEST_CASE("consistent permutation conjugates every matrix") {
    Gen g(27);
    for (int trial = 0; trial < 10; ++trial) {
        const int ns = 7, nt = 6;
        const auto s = g.split(3, ns, nt);
        std::vector<int> ps(ns), pt(nt);
        std::iota(ps.begin(), ps.end(), 0);
        std::iota(pt.begin(), pt.end(), 0);
        std::shuffle(ps.begin(), ps.end(), g.engine());
        std::shuffle(pt.begin(), pt.end(), g.engine());
        DomainSplit p = s;
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(ns + nt);
        for (int i = 0; i < ns; ++i) {
            p.source_labels[i] = s.source_labels[ps[i]];
            perm.indices()(ps[i]) = i;
        }
        for (int j = 0; j < nt; ++j) {
            (*p.target_labels)[j] = (*s.target_labels)[pt[j]];
            perm.indices()(ns + pt[j]) = ns + j;
        }
        auto conj = [&](const Matrix& m) -> Matrix { return perm * m * perm.transpose(); };
        CHECK((conj(build_m0(s).values) - build_m0(p).values).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((conj(assemble_mstar(s).values) - assemble_mstar(p).values).cwiseAbs().maxCoeff() < 1e-14);
        for (int c = 1; c <= 3; ++c)
            CHECK((conj(build_mc(s, c).values) - build_mc(p, c).values).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("conditional and cross-domain terms need pseudo-labels") {
    DomainSplit s = labelled({1, 2}, {1, 2}, 2);
    s.target_labels.reset();
    CHECK_THROWS_AS(build_mc(s, 1), Error);
    CHECK_THROWS_AS(build_repulsive(s, Repulsion::SourceTarget), Error);
    CHECK_THROWS_AS(assemble_mstar(s), Error);
    CHECK_NOTHROW(build_m0(s));
    CHECK_NOTHROW(build_repulsive(s, Repulsion::SourceSource));
    CHECK_THROWS_AS(build_mc(labelled({1, 2}, {1, 2}, 2), 3), Error);
}

TEST_CASE("single precision instantiation agrees with double") {
    Gen g(28);
    const auto s = g.split(3, 9, 9);
    const Eigen::MatrixXf mf = assemble_mstar<float>(s).values;
    const Matrix md = assemble_mstar<double>(s).values;
    CHECK((mf.cast<double>() - md).cwiseAbs().maxCoeff() < 1e-6);
}
