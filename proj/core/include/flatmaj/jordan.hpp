#pragma once

#include <vector>

#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// One invariant subspace of a pair of projections: dimension 1 or 2, carrying
// a rank <= 1 component of each projection expressed in the local basis.
struct JordanBlock {
    // ambient_dim x k, orthonormal columns, k in {1, 2}.
    Matrix basis;
    // k x k projections of rank <= 1.
    Matrix a_component;
    Matrix b_component;
    // Squared overlap of the two component directions: 0 when either
    // component vanishes, 1 when they coincide.
    double overlap_sq = 0.0;

    Eigen::Index subspace_dim() const { return basis.cols(); }
    Eigen::Index a_rank() const;
    Eigen::Index b_rank() const;
};

struct JordanDecomposition {
    std::vector<JordanBlock> blocks;
    // max Frobenius reconstruction error over the two projections.
    double residual = 0.0;
};

// Simultaneous block diagonalization of two orthogonal projections into
// subspaces of dimension at most 2. Block bases are mutually orthogonal and
// jointly span the ambient space (joint-kernel directions appear as blocks
// with both components zero). Eigenvalues of the compressed overlap operator
// within 1e-10 of {0, 1} are snapped. Throws MalformedInput when an input is
// not a projection, reporting the violated identity.
JordanDecomposition jordan_decompose(const Matrix& p, const Matrix& q);

// FlatPair of the normalized projection pair (P/Tr P, Q/Tr Q), canonical.
FlatPair flat_pair_from_projections(const Matrix& p, const Matrix& q);

// Weighted extraction: recovers the canonical FlatPair of a pair of operators
// that are flat on a common orthogonal block structure. Overlap-degenerate
// eigenspaces are refined by the weight forms of both operators, so the
// result does not depend on eigenbasis choices.
FlatPair flat_pair_from_dense(const DenseOperatorPair& pair);

// Standard-form realization of a canonical pair: one 2-dimensional summand
// per block with overlap in (0,1), carrying p|e1><e1| against
// q(cos t e1 + sin t e2)(...)^dagger with cos^2 t equal to the overlap; one
// 1-dimensional summand per classical row.
DenseOperatorPair realize_dense(const FlatPair& canonical_pair);

}  // namespace flatmaj
