#include <algorithm>
#include <cmath>
#include <vector>

#include "test_util.hpp"

#include "flatmaj/errors.hpp"
#include "flatmaj/jordan.hpp"
#include "flatmaj/sampling.hpp"

using namespace flatmaj;

namespace {

// Sorted eigenvalues of PQP above the snap threshold, the reference for the
// block overlaps.
std::vector<double> pqp_spectrum(const Matrix& p, const Matrix& q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p * q * p);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 1e-10) out.push_back(es.eigenvalues()(i));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("jordan");

TEST_CASE("four-dimensional reference case") {
    // P projects onto span{e0, e2}, Q onto span{(e0+e1)/sqrt2, e3}: one
    // genuine angle with squared overlap 1/2, plus one leftover ray each.
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = p(2, 2) = 1.0;
    Matrix q = Matrix::Zero(4, 4);
    q(0, 0) = q(0, 1) = q(1, 0) = q(1, 1) = 0.5;
    q(3, 3) = 1.0;

    const JordanDecomposition jd = jordan_decompose(p, q);
    CHECK(jd.residual <= 1e-12);
    int two_dim = 0;
    for (const JordanBlock& blk : jd.blocks) {
        CHECK(blk.a_rank() <= 1);
        CHECK(blk.b_rank() <= 1);
        if (blk.subspace_dim() == 2 && blk.a_rank() == 1 && blk.b_rank() == 1) {
            ++two_dim;
            CHECK(blk.overlap_sq == doctest::Approx(0.5).epsilon(1e-12));
        }
    }
    CHECK(two_dim == 1);

    const FlatPair fp = flat_pair_from_projections(p, q);
    const FlatPair expect = canonicalize(testutil::make_pair(
        {Block(0.5, 0.5, 0.5), Block(0.5, 0.0), Block(0.0, 0.5)}));
    CHECK(approx_equal(fp, expect, 1e-12));
}

TEST_CASE("random projection pairs decompose with rank-one components") {
    auto gen = testutil::rng(21);
    for (int k = 0; k < 30; ++k) {
        const int dim = 2 + static_cast<int>(uniform01(gen) * 10.99);
        const int rp = 1 + static_cast<int>(uniform01(gen) * (dim - 1));
        const int rq = 1 + static_cast<int>(uniform01(gen) * (dim - 1));
        const Matrix p = random_projection(dim, rp, gen);
        const Matrix q = random_projection(dim, rq, gen);

        const JordanDecomposition jd = jordan_decompose(p, q);
        CHECK(jd.residual <= 1e-9);

        Eigen::Index total_dim = 0, sum_ra = 0, sum_rb = 0;
        std::vector<double> overlaps;
        for (const JordanBlock& blk : jd.blocks) {
            CHECK(blk.subspace_dim() >= 1);
            CHECK(blk.subspace_dim() <= 2);
            CHECK(blk.a_rank() <= 1);
            CHECK(blk.b_rank() <= 1);
            // Orthonormal local basis.
            CHECK((blk.basis.adjoint() * blk.basis -
                   Matrix::Identity(blk.subspace_dim(), blk.subspace_dim()))
                      .norm() <= 1e-10);
            total_dim += blk.subspace_dim();
            sum_ra += blk.a_rank();
            sum_rb += blk.b_rank();
            if (blk.a_rank() == 1 && blk.b_rank() == 1 && blk.overlap_sq > 1e-10)
                overlaps.push_back(blk.overlap_sq);
        }
        CHECK(total_dim == dim);
        CHECK(sum_ra == rp);
        CHECK(sum_rb == rq);

        // Squared overlaps are exactly the nonzero spectrum of PQP.
        std::sort(overlaps.begin(), overlaps.end());
        const std::vector<double> ref = pqp_spectrum(p, q);
        REQUIRE(overlaps.size() == ref.size());
        for (size_t i = 0; i < ref.size(); ++i)
            CHECK(overlaps[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
}

TEST_CASE("non-projection input is rejected") {
    Matrix m = Matrix::Identity(3, 3) * 0.5;
    CHECK_THROWS_AS(jordan_decompose(m, Matrix::Identity(3, 3)), MalformedInput);
    CHECK_THROWS_AS(jordan_decompose(Matrix::Identity(3, 3), m), MalformedInput);
    CHECK_THROWS_AS(jordan_decompose(Matrix::Identity(3, 3), Matrix::Identity(2, 2)),
                    MalformedInput);
}

TEST_CASE("realize then extract is the identity on canonical pairs") {
    auto gen = testutil::rng(22);
    PairSampleOptions opts;
    opts.allow_one_sided = true;
    for (int k = 0; k < 100; ++k) {
        const FlatPair c = canonicalize(random_normalized_pair(gen, opts));
        if (c.blocks.empty()) continue;
        const FlatPair back = flat_pair_from_dense(realize_dense(c));
        CHECK(approx_equal(c, back, 1e-9));
    }
}

TEST_CASE("extraction is invariant under a global basis change") {
    auto gen = testutil::rng(23);
    for (int k = 0; k < 20; ++k) {
        const FlatPair c = canonicalize(random_normalized_pair(gen));
        const DenseOperatorPair d = realize_dense(c);
        const Matrix u = random_unitary(static_cast<int>(d.dim()), gen);
        const FlatPair back =
            flat_pair_from_dense({u * d.a * u.adjoint(), u * d.b * u.adjoint()});
        CHECK(approx_equal(c, back, 1e-8));
    }
}

TEST_CASE("extraction splits overlap-degenerate blocks by weight") {
    // Two blocks with the same overlap are only distinguishable through the
    // weight forms; extraction must not mix them.
    const FlatPair c = canonicalize(testutil::make_pair(
        {Block(0.3, 0.2, 0.5), Block(0.2, 0.3, 0.5), Block(0.5, 0.5, 0.5)}));
    CHECK(approx_equal(c, flat_pair_from_dense(realize_dense(c)), 1e-9));

    // Fully degenerate: identical blocks must come back with multiplicity.
    const FlatPair twin =
        canonicalize(testutil::make_pair({Block(0.5, 0.5, 0.7), Block(0.5, 0.5, 0.7)}));
    const FlatPair back = flat_pair_from_dense(realize_dense(twin));
    CHECK(approx_equal(twin, back, 1e-9));
}

TEST_SUITE_END();
