#include "flatmaj/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flatmaj/errors.hpp"
#include "flatmaj/feasibility.hpp"

namespace flatmaj {

Matrix ChannelRep::apply(const Matrix& x) const {
    if (kraus.empty()) throw MalformedInput("channel has no Kraus operators");
    if (x.rows() != dim_in() || x.cols() != dim_in())
        throw MalformedInput("channel input dimension mismatch");
    Matrix out = Matrix::Zero(dim_out(), dim_out());
    for (const Matrix& k : kraus) out.noalias() += k * x * k.adjoint();
    return out;
}

Matrix ChannelRep::choi() const {
    const int din = dim_in();
    const int dout = dim_out();
    Matrix j = Matrix::Zero(din * dout, din * dout);
    for (const Matrix& k : kraus) {
        Vector v(din * dout);
        for (int i = 0; i < din; ++i)
            for (int a = 0; a < dout; ++a) v(i * dout + a) = k(a, i);
        j.noalias() += v * v.adjoint();
    }
    return j;
}

double ChannelRep::tp_residual() const {
    const int din = dim_in();
    Matrix s = Matrix::Zero(din, din);
    for (const Matrix& k : kraus) s.noalias() += k.adjoint() * k;
    return (s - Matrix::Identity(din, din)).norm();
}

ChannelRep identity_channel(int dim) {
    if (dim < 1) throw MalformedInput("channel dimension must be positive");
    return {{Matrix::Identity(dim, dim)}};
}

ChannelRep pvm_channel(int dim) {
    if (dim < 1) throw MalformedInput("channel dimension must be positive");
    ChannelRep ch;
    for (int i = 0; i < dim; ++i) {
        Matrix k = Matrix::Zero(dim, dim);
        k(i, i) = 1.0;
        ch.kraus.push_back(std::move(k));
    }
    return ch;
}

ChannelRep trace_and_prepare(const Matrix& state, int dim_in) {
    if (dim_in < 1) throw MalformedInput("channel dimension must be positive");
    if (!is_hermitian(state)) throw MalformedInput("prepared state must be Hermitian");
    if (std::abs(state.trace().real() - 1.0) > 1e-9)
        throw HypothesisViolation("normalization-mismatch: prepared state must have unit trace");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(state));
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    ChannelRep ch;
    for (int m = 0; m < es.eigenvalues().size(); ++m) {
        const double lam = es.eigenvalues()(m);
        if (lam <= 1e-12) continue;
        for (int i = 0; i < dim_in; ++i) {
            Matrix k = Matrix::Zero(state.rows(), dim_in);
            k.col(i) = std::sqrt(lam) * es.eigenvectors().col(m);
            ch.kraus.push_back(std::move(k));
        }
    }
    if (ch.kraus.empty()) throw MalformedInput("prepared state is numerically zero");
    return ch;
}

ChannelRep kraus_from_choi(const Matrix& choi, int dim_in, int dim_out, double eig_floor) {
    if (choi.rows() != static_cast<long>(dim_in) * dim_out || choi.rows() != choi.cols())
        throw MalformedInput("Choi matrix dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(choi));
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    ChannelRep ch;
    for (int m = 0; m < es.eigenvalues().size(); ++m) {
        const double lam = es.eigenvalues()(m);
        if (lam <= eig_floor) continue;
        Matrix k(dim_out, dim_in);
        for (int i = 0; i < dim_in; ++i)
            for (int a = 0; a < dim_out; ++a)
                k(a, i) = std::sqrt(lam) * es.eigenvectors()(i * dim_out + a, m);
        ch.kraus.push_back(std::move(k));
    }
    if (ch.kraus.empty()) throw NumericalFailure("Choi matrix has no usable spectrum");
    // Exact trace preservation: right-multiply by (sum K^dag K)^-1/2.
    Matrix s = Matrix::Zero(dim_in, dim_in);
    for (const Matrix& k : ch.kraus) s.noalias() += k.adjoint() * k;
    const Matrix s_inv_sqrt = psd_power(s, -0.5);
    for (Matrix& k : ch.kraus) k = k * s_inv_sqrt;
    return ch;
}

namespace {

DenseOperatorPair pure_pair_2d(double f) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    Vector b(2);
    b << std::sqrt(f), std::sqrt(1.0 - f);
    return {a, b * b.adjoint()};
}

ChannelRep trace_2_to_1() {
    Matrix k1 = Matrix::Zero(1, 2);
    Matrix k2 = Matrix::Zero(1, 2);
    k1(0, 0) = 1.0;
    k2(0, 1) = 1.0;
    return {{k1, k2}};
}

}  // namespace

ChannelRep uhlmann_channel(double f_in, double f_out, double tolerance, int max_iters) {
    if (!(f_in >= 0.0 && f_in <= 1.0 && f_out >= 0.0 && f_out <= 1.0))
        throw MalformedInput("squared overlaps must lie in [0, 1]");
    if (f_in > f_out + 1e-12)
        throw HypothesisViolation("squared overlap cannot decrease under a channel");
    if (std::abs(f_in - f_out) <= 1e-12) return identity_channel(2);
    FeasibilityProblem pr;
    pr.inputs = pure_pair_2d(f_in);
    pr.outputs = pure_pair_2d(f_out);
    pr.tolerance = tolerance;
    pr.max_iters = max_iters;
    const FeasibilityResult res = solve(pr);
    if (res.status != FeasStatus::feasible)
        throw NumericalFailure("overlap-raising channel synthesis did not converge");
    return *res.channel;
}

PowerProtocolResult power_universal_protocol(const FlatPair& target, double f, int m_cap) {
    if (!(f >= 0.0) || f >= 1.0 - 1e-12)
        throw HypothesisViolation("source pair must be quantum: squared overlap in [0, 1)");
    if (m_cap < 1) throw MalformedInput("m_cap must be positive");
    const FlatPair tgt = canonicalize(target);
    if (tgt.blocks.empty()) throw HypothesisViolation("target pair is zero");
    if (!tgt.is_normalized())
        throw HypothesisViolation("normalization-mismatch: target pair must be normalized");

    // Copy count: smallest m with f^m * p_i <= q_i and f^m * p_i <= F_i * q_i
    // for every block carrying first-state weight.
    double ratio = std::numeric_limits<double>::infinity();
    for (const Block& blk : tgt.blocks) {
        if (blk.p <= 0.0) continue;
        if (blk.q <= 0.0) {
            ratio = 0.0;
            break;
        }
        ratio = std::min(ratio, blk.overlap.value_or(1.0) * blk.q / blk.p);
    }
    if (ratio <= 0.0 && f > 0.0)
        throw HypothesisViolation(
            "target weights the first state where the second has none; no copy count suffices");

    auto conditions_hold = [&](double fm) {
        for (const Block& blk : tgt.blocks) {
            if (blk.p <= 0.0) continue;
            const double lhs = fm * blk.p;
            if (lhs > blk.q) return false;
            if (lhs > blk.overlap.value_or(1.0) * blk.q) return false;
        }
        return true;
    };

    PowerProtocolResult out;
    int m = 0;
    for (int cand = 1; cand <= m_cap; ++cand) {
        if (conditions_hold(std::pow(f, cand))) {
            m = cand;
            break;
        }
    }
    if (m == 0) {
        const double bound = std::ceil(std::log(ratio) / std::log(f));
        out.m_bound = bound > 1e18 ? std::numeric_limits<long long>::max()
                                   : static_cast<long long>(bound);
        return out;
    }
    out.m = m;
    out.materialized = true;

    const double fm = std::pow(f, m);
    int d_out = 0;
    for (const Block& blk : tgt.blocks) d_out += blk.quantum() ? 2 : 1;

    ChannelRep ch;
    int offset = 0;
    for (const Block& blk : tgt.blocks) {
        const int bd = blk.quantum() ? 2 : 1;
        const double g = std::max(0.0, blk.q - fm * blk.p) / (1.0 - fm);
        Matrix sqrt_e = Matrix::Zero(2, 2);
        sqrt_e(0, 0) = std::sqrt(blk.p);
        sqrt_e(1, 1) = std::sqrt(g);
        ChannelRep local;
        if (blk.quantum()) {
            const double f_post = fm * blk.p / blk.q;
            local = uhlmann_channel(f_post, *blk.overlap);
        } else {
            local = trace_2_to_1();
        }
        for (const Matrix& k : local.kraus) {
            Matrix global = Matrix::Zero(d_out, 2);
            global.block(offset, 0, bd, 2) = k * sqrt_e;
            ch.kraus.push_back(std::move(global));
        }
        offset += bd;
    }
    out.channel = std::move(ch);
    return out;
}

SmoothResult epsilon_smooth(const FlatPair& pair, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw MalformedInput("smoothing parameter must lie in [0, 1]");
    FlatPair cp = canonicalize(pair);
    double theta_min = std::numeric_limits<double>::infinity();
    for (const Block& blk : cp.blocks)
        if (blk.quantum())
            theta_min = std::min(theta_min, std::acos(std::min(1.0, std::sqrt(*blk.overlap))));
    SmoothResult res;
    if (!std::isfinite(theta_min)) {
        res.pair = std::move(cp);
        return res;
    }
    const double eta = std::min(theta_min * (1.0 - 1e-6),
                                std::acos(std::sqrt(std::max(0.0, 1.0 - epsilon))));
    for (Block& blk : cp.blocks) {
        if (!blk.quantum()) continue;
        const double theta = std::acos(std::min(1.0, std::sqrt(*blk.overlap)));
        const double c = std::cos(theta - eta);
        blk.overlap = c * c;
    }
    res.pair = canonicalize(cp);
    res.eta = eta;
    res.fidelity_bound = std::cos(eta) * std::cos(eta);
    return res;
}

FlatPair catalyst(const FlatPair& in, const FlatPair& out, int n) {
    if (n < 1) throw MalformedInput("catalyst size must be positive");
    FlatPair acc;
    const double w = 1.0 / n;
    for (int l = 0; l < n; ++l) {
        FlatPair term = tensor(tensor_power(in, l), tensor_power(out, n - 1 - l));
        for (Block& blk : term.blocks) {
            blk.p *= w;
            blk.q *= w;
        }
        acc = direct_sum(acc, term);
    }
    return canonicalize(acc);
}

FlatPair measure_block(const FlatPair& pair, int index) {
    FlatPair cp = canonicalize(pair);
    if (index < 0 || index >= static_cast<int>(cp.blocks.size()))
        throw MalformedInput("block index out of range");
    const Block blk = cp.blocks[index];
    if (!blk.both_positive()) return cp;
    const double f = *blk.overlap;
    cp.blocks[index] = Block(blk.p, blk.q * f, 1.0);
    cp.blocks.push_back(Block(0.0, blk.q * (1.0 - f)));
    return canonicalize(cp);
}

FlatPair boost_overlap(const FlatPair& pair, int index, double new_overlap) {
    FlatPair cp = canonicalize(pair);
    if (index < 0 || index >= static_cast<int>(cp.blocks.size()))
        throw MalformedInput("block index out of range");
    Block& blk = cp.blocks[index];
    if (!blk.both_positive()) throw MalformedInput("selected block carries no overlap");
    if (!(new_overlap >= 0.0 && new_overlap <= 1.0 + tolerance::kOverlapSnap))
        throw MalformedInput("squared overlaps must lie in [0, 1]");
    if (new_overlap < *blk.overlap - 1e-12)
        throw HypothesisViolation("squared overlap cannot decrease under a channel");
    blk.overlap = std::min(new_overlap, 1.0);
    return canonicalize(cp);
}

FlatPair stochastic_postprocess(const FlatPair& pair, const Eigen::MatrixXd& transition) {
    FlatPair cp = canonicalize(pair);
    std::vector<int> classical;
    for (int i = 0; i < static_cast<int>(cp.blocks.size()); ++i)
        if (!cp.blocks[i].quantum()) classical.push_back(i);
    if (transition.cols() != static_cast<long>(classical.size()))
        throw MalformedInput("transition matrix must have one column per classical row");
    for (int col = 0; col < transition.cols(); ++col) {
        if (transition.col(col).minCoeff() < -1e-12)
            throw MalformedInput("transition matrix entries must be nonnegative");
        if (std::abs(transition.col(col).sum() - 1.0) > 1e-9)
            throw MalformedInput("transition matrix columns must sum to one");
    }
    FlatPair out;
    out.label = cp.label;
    for (int i = 0; i < static_cast<int>(cp.blocks.size()); ++i)
        if (cp.blocks[i].quantum()) out.blocks.push_back(cp.blocks[i]);
    for (int row = 0; row < transition.rows(); ++row) {
        double np = 0.0, nq = 0.0;
        for (int col = 0; col < transition.cols(); ++col) {
            np += transition(row, col) * cp.blocks[classical[col]].p;
            nq += transition(row, col) * cp.blocks[classical[col]].q;
        }
        if (np > 0.0 && nq > 0.0)
            out.blocks.push_back(Block(np, nq, 1.0));
        else
            out.blocks.push_back(Block(np, nq));
    }
    return canonicalize(out);
}

}  // namespace flatmaj
