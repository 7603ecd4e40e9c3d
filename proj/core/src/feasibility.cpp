#include "flatmaj/feasibility.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "flatmaj/errors.hpp"
#include "flatmaj/jordan.hpp"

namespace flatmaj {

namespace {

Eigen::Matrix2d pinv2(const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    if (es.info() != Eigen::Success) throw NumericalFailure("2x2 eigendecomposition failed");
    const double cutoff = 1e-12 * std::max(std::abs(es.eigenvalues()(0)),
                                           std::abs(es.eigenvalues()(1)));
    Eigen::Vector2d inv = Eigen::Vector2d::Zero();
    for (int k = 0; k < 2; ++k)
        if (std::abs(es.eigenvalues()(k)) > cutoff) inv(k) = 1.0 / es.eigenvalues()(k);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// tr_out on a Choi matrix indexed (i*d_out + a, j*d_out + b).
Matrix trace_out_choi(const Matrix& j, int d_in, int d_out) {
    Matrix out = Matrix::Zero(d_in, d_in);
    for (int i = 0; i < d_in; ++i)
        for (int k = 0; k < d_in; ++k)
            out(i, k) = j.block(i * d_out, k * d_out, d_out, d_out).trace();
    return out;
}

// Action of the channel with Choi matrix j on the input state x:
// result(a,b) = sum_{i,k} x(i,k) * j[(i,a),(k,b)].
Matrix apply_choi(const Matrix& j, const Matrix& x, int d_in, int d_out) {
    Matrix out = Matrix::Zero(d_out, d_out);
    for (int i = 0; i < d_in; ++i)
        for (int k = 0; k < d_in; ++k) {
            const std::complex<double> w = x(i, k);
            if (w != std::complex<double>(0.0, 0.0))
                out.noalias() += w * j.block(i * d_out, k * d_out, d_out, d_out);
        }
    return out;
}

// Exact orthogonal projection onto the affine set
//   { J Hermitian : tr_out J = I, J acts rho -> rho_out, sigma -> sigma_out }
// in least-squares (pseudoinverse) sense when the constraints are
// inconsistent. The constraint map L has adjoint
//   L^dag(M, N2, N3) = M (x) I + rho^T (x) N2 + sigma^T (x) N3,
// and L L^dag splits into three invariant subspaces that are solved in closed
// form, so one projection costs O(dim^2).
struct AffineProjector {
    int d_in = 0;
    int d_out = 0;
    Matrix rho_t, sigma_t;    // transposed input states
    Matrix rho_out, sigma_out;
    double a = 0, b = 0, c = 0;          // gram of {rho^T, sigma^T}
    Eigen::Matrix2d gram_pinv;
    Eigen::Matrix2d normal_pinv;         // for the coupled 4-dim subspace
    Eigen::Matrix<double, 4, 2> a2;
    Eigen::Matrix4d weight;

    AffineProjector(const DenseOperatorPair& in, const DenseOperatorPair& out)
        : d_in(in.dim()),
          d_out(out.dim()),
          rho_t(in.a.transpose()),
          sigma_t(in.b.transpose()),
          rho_out(out.a),
          sigma_out(out.b) {
        a = (rho_t * rho_t).trace().real();
        b = (rho_t * sigma_t).trace().real();
        c = (sigma_t * sigma_t).trace().real();
        Eigen::Matrix2d gram;
        gram << a, b, b, c;
        gram_pinv = pinv2(gram);
        const double d_o = static_cast<double>(d_out);
        a2 << d_o, 0, 0, d_o, a, b, b, c;
        weight.setZero();
        weight.topLeftCorner<2, 2>() = gram;
        weight(2, 2) = d_o;
        weight(3, 3) = d_o;
        normal_pinv = pinv2(a2.transpose() * weight * a2);
    }

    // Frobenius norms of the three constraint violations.
    Eigen::Vector3d violations(const Matrix& j, const DenseOperatorPair& in) const {
        Eigen::Vector3d v;
        v(0) = (trace_out_choi(j, d_in, d_out) - Matrix::Identity(d_in, d_in)).norm();
        v(1) = (apply_choi(j, in.a, d_in, d_out) - rho_out).norm();
        v(2) = (apply_choi(j, in.b, d_in, d_out) - sigma_out).norm();
        return v;
    }

    Matrix project(const Matrix& j, const DenseOperatorPair& in) const {
        const double d_o = static_cast<double>(d_out);
        const Matrix r1 = Matrix::Identity(d_in, d_in) - trace_out_choi(j, d_in, d_out);
        const Matrix r2 = rho_out - apply_choi(j, in.a, d_in, d_out);
        const Matrix r3 = sigma_out - apply_choi(j, in.b, d_in, d_out);

        // Coefficients of r in the coupled subspace spanned by
        // (rho^T,0,0), (sigma^T,0,0), (0,I,0), (0,0,I).
        const Eigen::Vector2d x =
            gram_pinv * Eigen::Vector2d((rho_t * r1).trace().real(),
                                        (sigma_t * r1).trace().real());
        Eigen::Vector4d y;
        y << x(0), x(1), r2.trace().real() / d_o, r3.trace().real() / d_o;
        const Eigen::Vector2d s = normal_pinv * (a2.transpose() * (weight * y));

        const Matrix m = (r1 - x(0) * rho_t - x(1) * sigma_t) / d_o + s(0) * rho_t +
                         s(1) * sigma_t;
        const Matrix t2 = r2 - (r2.trace() / d_o) * Matrix::Identity(d_out, d_out);
        const Matrix t3 = r3 - (r3.trace() / d_o) * Matrix::Identity(d_out, d_out);
        const Matrix n2 = gram_pinv(0, 0) * t2 + gram_pinv(0, 1) * t3;
        const Matrix n3 = gram_pinv(1, 0) * t2 + gram_pinv(1, 1) * t3;

        Matrix out = j;
        out.noalias() += kron(m, Matrix::Identity(d_out, d_out));
        out.noalias() += kron(rho_t, n2);
        out.noalias() += kron(sigma_t, n3);
        return hermitize(out);
    }
};

// Eigenvectors of a PSD matrix with eigenvalue <= threshold.
Matrix kernel_basis(const Matrix& psd, double threshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(psd);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= threshold) ++count;
    Matrix basis(psd.rows(), count);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= threshold) basis.col(k++) = es.eigenvectors().col(i);
    return basis;
}

// Any Choi matrix J that is PSD and maps x -> x_out must annihilate
// supp(x^T) (x) ker(x_out): the pairing tr[J (x^T (x) K)] equals
// tr[K x_out] = 0 for the kernel projector K, and both factors are PSD.
// Collecting those directions for both states gives a face of the cone
// that contains every feasible point; projecting onto the face instead of
// the full cone leaves the intersection unchanged but removes the
// tangential contact that stalls alternating projections when the targets
// are rank deficient. Returns the orthogonal projector onto the face's
// carrier subspace, or an empty matrix when nothing is pinned.
Matrix face_projector(const DenseOperatorPair& in, const DenseOperatorPair& out) {
    const int d_in = in.dim();
    const int d_out = out.dim();
    const Matrix supp_a = support_basis(in.a.transpose(), 1e-12);
    const Matrix supp_b = support_basis(in.b.transpose(), 1e-12);
    const Matrix ker_a = kernel_basis(out.a, 1e-12);
    const Matrix ker_b = kernel_basis(out.b, 1e-12);
    const Eigen::Index cols_a = supp_a.cols() * ker_a.cols();
    const Eigen::Index cols_b = supp_b.cols() * ker_b.cols();
    if (cols_a + cols_b == 0) return Matrix();
    Matrix pinned(static_cast<Eigen::Index>(d_in) * d_out, cols_a + cols_b);
    if (cols_a > 0) pinned.leftCols(cols_a) = kron(supp_a, ker_a);
    if (cols_b > 0) pinned.rightCols(cols_b) = kron(supp_b, ker_b);
    Eigen::ColPivHouseholderQR<Matrix> qr(pinned);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    if (rank == 0) return Matrix();
    const Matrix q = Matrix(qr.householderQ()).leftCols(rank);
    return Matrix::Identity(pinned.rows(), pinned.rows()) - q * q.adjoint();
}

void validate_problem(const FeasibilityProblem& pr) {
    const int d_in = pr.inputs.dim();
    const int d_out = pr.outputs.dim();
    if (d_in < 1 || d_out < 1) throw MalformedInput("feasibility instance has an empty side");
    if (!is_hermitian(pr.inputs.a) || !is_hermitian(pr.inputs.b) ||
        !is_hermitian(pr.outputs.a) || !is_hermitian(pr.outputs.b))
        throw MalformedInput("feasibility instance states must be Hermitian");
    for (const Matrix* m : {&pr.inputs.a, &pr.inputs.b, &pr.outputs.a, &pr.outputs.b}) {
        if (min_eigenvalue(*m) < -1e-9) throw MalformedInput("feasibility instance state is not PSD");
        if (std::abs(m->trace().real() - 1.0) > 1e-9)
            throw HypothesisViolation("normalization-mismatch: feasibility states must have unit trace");
    }
    if (static_cast<long>(d_in) * d_out > pr.dimension_cap)
        throw DimensionCapExceeded("Choi dimension " + std::to_string(static_cast<long>(d_in) * d_out) +
                                   " exceeds cap " + std::to_string(pr.dimension_cap));
}

}  // namespace

FeasibilityResult solve(const FeasibilityProblem& pr) {
    validate_problem(pr);
    const int d_in = pr.inputs.dim();
    const int d_out = pr.outputs.dim();
    const int dim = d_in * d_out;
    FeasibilityResult res;

    // Try closed-form witnesses before iterating: the identity map when the
    // sides match, a constant map when the two targets coincide. These cover
    // instances whose solution Choi is rank deficient inside the face, where
    // alternating projections converge only sublinearly. Candidates count
    // only if they satisfy the constraints to the requested tolerance.
    auto accept = [&](ChannelRep ch) {
        const double err = std::max((ch.apply(pr.inputs.a) - pr.outputs.a).norm(),
                                    (ch.apply(pr.inputs.b) - pr.outputs.b).norm());
        if (err >= pr.tolerance) return false;
        res.status = FeasStatus::feasible;
        res.residual = err;
        res.iterations = 0;
        res.channel = std::move(ch);
        return true;
    };
    if (d_in == d_out && accept(identity_channel(d_in))) return res;
    if ((pr.outputs.a - pr.outputs.b).norm() < pr.tolerance &&
        accept(trace_and_prepare(pr.outputs.a, d_in)))
        return res;

    const AffineProjector proj(pr.inputs, pr.outputs);
    const Matrix face = face_projector(pr.inputs, pr.outputs);

    // Dykstra between the cone (restricted to the face every feasible point
    // must lie in) and the affine constraint set; the correction term is
    // only needed for the cone.
    Matrix x = Matrix::Identity(dim, dim) / static_cast<double>(d_out);
    Matrix corr = Matrix::Zero(dim, dim);
    for (int it = 1; it <= pr.max_iters; ++it) {
        const Matrix z = x + corr;
        const Matrix y = face.size() == 0 ? psd_clip(z) : psd_clip(hermitize(face * z * face));
        corr = z - y;
        res.iterations = it;
        res.residual = proj.violations(y, pr.inputs).maxCoeff();
        if (res.residual < pr.tolerance) {
            ChannelRep ch = kraus_from_choi(y, d_in, d_out);
            const double err_a = (ch.apply(pr.inputs.a) - pr.outputs.a).norm();
            const double err_b = (ch.apply(pr.inputs.b) - pr.outputs.b).norm();
            if (std::max(err_a, err_b) <= 10.0 * pr.tolerance) {
                res.status = FeasStatus::feasible;
                res.channel = std::move(ch);
                return res;
            }
        }
        x = proj.project(y, pr.inputs);
    }
    res.status = FeasStatus::undetermined;
    return res;
}

ClassicalFeasibilityResult solve_classical(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                           const Eigen::VectorXd& p2, const Eigen::VectorXd& q2,
                                           double tolerance, int max_iters) {
    const int n = static_cast<int>(p.size());
    const int n2 = static_cast<int>(p2.size());
    if (n < 1 || n2 < 1 || q.size() != n || q2.size() != n2)
        throw MalformedInput("classical feasibility vectors have mismatched sizes");

    // Unknown T is n2 x n column-stochastic with T p = p2 and T q = q2.
    // Stack the 2*n2 + n affine constraints on vec(T) and project with a
    // pseudoinverse; alternate with the entrywise nonnegativity clip.
    const int nv = n2 * n;
    Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(2 * n2 + n, nv);
    Eigen::VectorXd rhs(2 * n2 + n);
    auto idx = [n2](int row, int col) { return col * n2 + row; };
    for (int r = 0; r < n2; ++r) {
        for (int col = 0; col < n; ++col) {
            cons(r, idx(r, col)) = p(col);
            cons(n2 + r, idx(r, col)) = q(col);
        }
        rhs(r) = p2(r);
        rhs(n2 + r) = q2(r);
    }
    for (int col = 0; col < n; ++col) {
        for (int r = 0; r < n2; ++r) cons(2 * n2 + col, idx(r, col)) = 1.0;
        rhs(2 * n2 + col) = 1.0;
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(cons);

    Eigen::VectorXd x = Eigen::VectorXd::Constant(nv, 1.0 / n2);
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(nv);
    ClassicalFeasibilityResult res;
    for (int it = 1; it <= max_iters; ++it) {
        const Eigen::VectorXd y = (x + corr).cwiseMax(0.0);
        corr = x + corr - y;
        res.iterations = it;
        res.residual = (cons * y - rhs).lpNorm<Eigen::Infinity>();
        if (res.residual < tolerance) {
            res.status = FeasStatus::feasible;
            Eigen::MatrixXd t(n2, n);
            for (int col = 0; col < n; ++col) t.col(col) = y.segment(col * n2, n2);
            res.transition = std::move(t);
            return res;
        }
        x = y + cod.solve(rhs - cons * y);
    }
    res.status = FeasStatus::undetermined;
    return res;
}

FeasibilityProblem tensor_instance(const FlatPair& pair_in, const FlatPair& pair_out, int n,
                                   int m, int dimension_cap) {
    if (n < 1 || m < 0) throw MalformedInput("tensor_instance needs n >= 1 and m >= 0");
    const FlatPair cin = canonicalize(pair_in);
    const FlatPair cout = canonicalize(pair_out);
    auto base_dim = [](const FlatPair& fp) {
        long d = 0;
        for (const Block& blk : fp.blocks) d += blk.quantum() ? 2 : 1;
        return std::max<long>(d, 1);
    };
    double log_choi = n * std::log(static_cast<double>(base_dim(cin))) +
                      m * std::log(static_cast<double>(std::max<long>(base_dim(cout), 1)));
    if (log_choi > std::log(static_cast<double>(dimension_cap)) + 1e-9)
        throw DimensionCapExceeded("tensor instance Choi dimension exceeds cap " +
                                   std::to_string(dimension_cap));

    auto power = [](const DenseOperatorPair& base, int k) {
        DenseOperatorPair acc{Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
        for (int i = 0; i < k; ++i) acc = {kron(acc.a, base.a), kron(acc.b, base.b)};
        return acc;
    };
    FeasibilityProblem pr;
    pr.inputs = power(realize_dense(cin), n);
    pr.outputs = power(realize_dense(cout), m);
    pr.dimension_cap = dimension_cap;
    return pr;
}

}  // namespace flatmaj
