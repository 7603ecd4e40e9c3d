#include "flatmaj/jordan.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "flatmaj/errors.hpp"

namespace flatmaj {

namespace {

constexpr double kEigSnap = 1e-10;        // snap compressed eigenvalues to {0, 1}
constexpr double kClusterTol = 1e-8;      // group interior eigenvalues for refinement
constexpr double kSupportTol = 1e-12;

void require_projection(const Matrix& m, const char* name) {
    if (m.rows() != m.cols()) {
        throw MalformedInput(std::string(name) + " is not square");
    }
    const double herm = hermitian_residual(m);
    if (herm > 1e-9) {
        std::ostringstream msg;
        msg << name << " is not Hermitian: ||" << name << " - " << name
            << "^dagger||_F = " << herm;
        throw MalformedInput(msg.str());
    }
    const double idem = projection_residual(m);
    if (idem > 1e-9) {
        std::ostringstream msg;
        msg << name << " is not idempotent: ||" << name << "^2 - " << name
            << "||_F = " << idem;
        throw MalformedInput(msg.str());
    }
}

JordanBlock one_dim_block(const Vector& v, bool in_a, bool in_b) {
    JordanBlock blk;
    blk.basis = v;
    blk.a_component = Matrix::Constant(1, 1, in_a ? 1.0 : 0.0);
    blk.b_component = Matrix::Constant(1, 1, in_b ? 1.0 : 0.0);
    blk.overlap_sq = (in_a && in_b) ? 1.0 : 0.0;
    return blk;
}

// Eigen pairs of a Hermitian form, ascending.
std::pair<Eigen::VectorXd, Matrix> eig_herm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

// Splits column index range [0, n) of eigenvalues into clusters whose
// consecutive gaps are at most tol.
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(const Eigen::VectorXd& vals,
                                                                  double tol) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= vals.size(); ++i) {
        if (i == vals.size() || vals(i) - vals(i - 1) > tol) {
            ranges.emplace_back(start, i);
            start = i;
        }
    }
    return ranges;
}

}  // namespace

Eigen::Index JordanBlock::a_rank() const {
    return static_cast<Eigen::Index>(std::lround(a_component.trace().real()));
}

Eigen::Index JordanBlock::b_rank() const {
    return static_cast<Eigen::Index>(std::lround(b_component.trace().real()));
}

JordanDecomposition jordan_decompose(const Matrix& p, const Matrix& q) {
    require_projection(p, "P");
    require_projection(q, "Q");
    if (p.rows() != q.rows()) throw MalformedInput("P and Q act on different spaces");
    const Eigen::Index dim = p.rows();

    JordanDecomposition dec;
    const Matrix vp = support_basis(p, 0.5);
    const Matrix vq = support_basis(q, 0.5);

    std::vector<Vector> b_side_vectors;  // accounted directions inside ran Q

    if (vp.cols() > 0) {
        // Compressed overlap operator on ran P; eigenvalues are the squared
        // cosines of the principal angles between the ranges.
        const Matrix qv = vq.adjoint() * vp;               // rQ x rP
        const Matrix compressed = hermitize(qv.adjoint() * qv);
        auto [vals, vecs] = eig_herm(compressed);
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            const double lambda = vals(k);
            const Vector v = vp * vecs.col(k);
            if (lambda <= kEigSnap) {
                dec.blocks.push_back(one_dim_block(v, true, false));
            } else if (lambda >= 1.0 - kEigSnap) {
                dec.blocks.push_back(one_dim_block(v, true, true));
                b_side_vectors.push_back(v);
            } else {
                Vector u = vq * (vq.adjoint() * v);
                u /= u.norm();
                // <v|u> = <v|Q|v>/||Qv|| = sqrt(lambda) is real and positive,
                // so the block basis {v, v_perp} has real coordinates for u.
                const double c = std::sqrt(lambda);
                Vector v_perp = u - std::complex<double>(c, 0.0) * v;
                v_perp /= v_perp.norm();
                JordanBlock blk;
                blk.basis = Matrix(dim, 2);
                blk.basis.col(0) = v;
                blk.basis.col(1) = v_perp;
                blk.a_component = Matrix::Zero(2, 2);
                blk.a_component(0, 0) = 1.0;
                const double s = std::sqrt(1.0 - lambda);
                blk.b_component = Matrix::Zero(2, 2);
                blk.b_component(0, 0) = lambda;
                blk.b_component(0, 1) = c * s;
                blk.b_component(1, 0) = c * s;
                blk.b_component(1, 1) = 1.0 - lambda;
                blk.overlap_sq = lambda;
                dec.blocks.push_back(std::move(blk));
                b_side_vectors.push_back(u);
            }
        }
    }

    // Directions of ran Q not yet accounted for become b-only blocks.
    if (vq.cols() > 0) {
        Matrix q_res = vq * vq.adjoint();
        for (const Vector& u : b_side_vectors) q_res -= u * u.adjoint();
        q_res = hermitize(q_res);
        auto [vals, vecs] = eig_herm(q_res);
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            if (vals(k) > 0.5) dec.blocks.push_back(one_dim_block(vecs.col(k), false, true));
        }
    }

    // Complete with the joint kernel so the blocks span the ambient space.
    {
        Matrix accounted = Matrix::Zero(dim, dim);
        for (const JordanBlock& blk : dec.blocks) accounted += blk.basis * blk.basis.adjoint();
        const Matrix complement = hermitize(Matrix::Identity(dim, dim) - accounted);
        auto [vals, vecs] = eig_herm(complement);
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            if (vals(k) > 0.5) dec.blocks.push_back(one_dim_block(vecs.col(k), false, false));
        }
    }

    Matrix ra = Matrix::Zero(dim, dim);
    Matrix rb = Matrix::Zero(dim, dim);
    for (const JordanBlock& blk : dec.blocks) {
        ra += blk.basis * blk.a_component * blk.basis.adjoint();
        rb += blk.basis * blk.b_component * blk.basis.adjoint();
    }
    dec.residual = std::max((ra - p).norm(), (rb - q).norm());
    return dec;
}

FlatPair flat_pair_from_projections(const Matrix& p, const Matrix& q) {
    const JordanDecomposition dec = jordan_decompose(p, q);
    const double trace_p = p.trace().real();
    const double trace_q = q.trace().real();
    if (trace_p <= 0.5 && trace_q <= 0.5) {
        throw MalformedInput("both projections are zero");
    }
    FlatPair pair;
    for (const JordanBlock& blk : dec.blocks) {
        const bool in_a = blk.a_rank() > 0;
        const bool in_b = blk.b_rank() > 0;
        if (!in_a && !in_b) continue;
        Block b;
        b.p = in_a ? 1.0 / trace_p : 0.0;
        b.q = in_b ? 1.0 / trace_q : 0.0;
        if (in_a && in_b) b.overlap = blk.overlap_sq;
        pair.blocks.push_back(b);
    }
    return canonicalize(pair);
}

namespace {

// Refines the orthonormal columns of `basis` so that the Hermitian form
// `weight` is diagonal on them; returns the rotated basis and the weights.
std::pair<Matrix, Eigen::VectorXd> diagonalize_form(const Matrix& basis, const Matrix& weight) {
    const Matrix form = hermitize(basis.adjoint() * weight * basis);
    auto [vals, vecs] = eig_herm(form);
    return {basis * vecs, vals};
}

}  // namespace

FlatPair flat_pair_from_dense(const DenseOperatorPair& pair) {
    const Matrix& a = pair.a;
    const Matrix& b = pair.b;
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw MalformedInput("operator pair must be square matrices of equal dimension");
    }
    if (!is_hermitian(a) || !is_hermitian(b)) {
        throw MalformedInput("operator pair must be Hermitian");
    }
    if (min_eigenvalue(a) < -1e-9 || min_eigenvalue(b) < -1e-9) {
        throw MalformedInput("operator pair must be positive semidefinite");
    }

    const double scale_a = std::max(1.0, a.norm());
    const double scale_b = std::max(1.0, b.norm());
    const Matrix va = support_basis(a, kSupportTol * scale_a);
    const Matrix vb = support_basis(b, kSupportTol * scale_b);

    FlatPair result;
    std::vector<Vector> b_side_vectors;

    if (va.cols() > 0 && vb.cols() > 0) {
        const Matrix qv = vb.adjoint() * va;
        const Matrix compressed = hermitize(qv.adjoint() * qv);
        auto [vals, vecs] = eig_herm(compressed);
        const Matrix proj_b = vb * vb.adjoint();

        for (const auto& [lo, hi] : cluster_ranges(vals, kClusterTol)) {
            const double lambda = vals.segment(lo, hi - lo).mean();
            const Matrix cluster = va * vecs.middleCols(lo, hi - lo);

            if (lambda <= kEigSnap) {
                // a-only rows; weights from the A form.
                auto [basis, weights] = diagonalize_form(cluster, a);
                for (Eigen::Index i = 0; i < weights.size(); ++i) {
                    result.blocks.emplace_back(std::max(weights(i), 0.0), 0.0);
                }
                continue;
            }

            // Refine by the A weights, then split (lambda, p)-degenerate
            // subspaces by the B weights carried through the Q-side isometry.
            auto [abasis, aweights] = diagonalize_form(cluster, a);
            for (const auto& [plo, phi] : cluster_ranges(aweights, kClusterTol)) {
                const double pweight = aweights.segment(plo, phi - plo).mean();
                const Matrix sub = abasis.middleCols(plo, phi - plo);
                if (lambda >= 1.0 - kEigSnap) {
                    auto [final_basis, bweights] = diagonalize_form(sub, b);
                    for (Eigen::Index i = 0; i < bweights.size(); ++i) {
                        result.blocks.emplace_back(std::max(pweight, 0.0),
                                                   std::max(bweights(i), 0.0), 1.0);
                        b_side_vectors.push_back(final_basis.col(i));
                    }
                } else {
                    Matrix images = proj_b * sub / std::sqrt(lambda);
                    auto [final_images, bweights] = diagonalize_form(images, b);
                    for (Eigen::Index i = 0; i < bweights.size(); ++i) {
                        result.blocks.emplace_back(std::max(pweight, 0.0),
                                                   std::max(bweights(i), 0.0), lambda);
                        b_side_vectors.push_back(final_images.col(i));
                    }
                }
            }
        }
    } else if (va.cols() > 0) {
        auto [basis, weights] = diagonalize_form(va, a);
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            result.blocks.emplace_back(std::max(weights(i), 0.0), 0.0);
        }
    }

    if (vb.cols() > 0) {
        Matrix q_res = vb * vb.adjoint();
        for (const Vector& u : b_side_vectors) q_res -= u * u.adjoint();
        q_res = hermitize(q_res);
        auto [vals, vecs] = eig_herm(q_res);
        Eigen::Index count = 0;
        for (Eigen::Index k = 0; k < vals.size(); ++k) {
            if (vals(k) > 0.5) ++count;
        }
        if (count > 0) {
            Matrix residual_basis(b.rows(), count);
            Eigen::Index j = 0;
            for (Eigen::Index k = 0; k < vals.size(); ++k) {
                if (vals(k) > 0.5) residual_basis.col(j++) = vecs.col(k);
            }
            auto [basis, weights] = diagonalize_form(residual_basis, b);
            for (Eigen::Index i = 0; i < weights.size(); ++i) {
                result.blocks.emplace_back(0.0, std::max(weights(i), 0.0));
            }
        }
    }

    return canonicalize(result);
}

DenseOperatorPair realize_dense(const FlatPair& canonical_pair) {
    const FlatPair pair = canonicalize(canonical_pair);
    Eigen::Index dim = 0;
    for (const Block& blk : pair.blocks) {
        dim += blk.quantum() ? 2 : 1;
    }
    dim = std::max<Eigen::Index>(dim, 1);
    DenseOperatorPair out;
    out.a = Matrix::Zero(dim, dim);
    out.b = Matrix::Zero(dim, dim);
    Eigen::Index offset = 0;
    for (const Block& blk : pair.blocks) {
        if (blk.quantum()) {
            const double c = std::sqrt(*blk.overlap);
            const double s = std::sqrt(1.0 - *blk.overlap);
            out.a(offset, offset) = blk.p;
            out.b(offset, offset) = blk.q * c * c;
            out.b(offset, offset + 1) = blk.q * c * s;
            out.b(offset + 1, offset) = blk.q * c * s;
            out.b(offset + 1, offset + 1) = blk.q * s * s;
            offset += 2;
        } else {
            out.a(offset, offset) = blk.p;
            out.b(offset, offset) = blk.q;
            offset += 1;
        }
    }
    return out;
}

}  // namespace flatmaj
