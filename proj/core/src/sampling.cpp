#include "flatmaj/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "flatmaj/errors.hpp"

namespace flatmaj {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    const double u = std::max(uniform01(rng), 0x1.0p-53);
    const double v = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

// Weights with a hard floor: exponential draws normalized, resampled until
// the floor holds. The floor must leave room, count * floor < 1.
std::vector<double> random_weights(std::mt19937_64& rng, int count, double floor) {
    std::vector<double> w(count);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double total = 0.0;
        for (double& x : w) {
            x = -std::log(std::max(uniform01(rng), 0x1.0p-53));
            total += x;
        }
        bool ok = true;
        for (double& x : w) {
            x /= total;
            if (x < floor) ok = false;
        }
        if (ok) return w;
    }
    throw NumericalFailure("weight sampling could not satisfy the floor");
}

Matrix ginibre(int rows, int cols, std::mt19937_64& rng) {
    Matrix g(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            g(r, c) = std::complex<double>(standard_normal(rng), standard_normal(rng));
    return g;
}

Matrix thin_q(const Matrix& g) {
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

}  // namespace

FlatPair random_normalized_pair(std::mt19937_64& rng, const PairSampleOptions& opts) {
    if (opts.max_blocks < 1 || opts.min_weight <= 0.0 ||
        opts.max_blocks * opts.min_weight >= 1.0 || opts.overlap_lo < 0.0 ||
        opts.overlap_hi > 1.0 || opts.overlap_lo > opts.overlap_hi)
        throw MalformedInput("pair sampler options out of range");
    const int nb = uniform_int(rng, 1, opts.max_blocks);
    std::vector<double> p = random_weights(rng, nb, opts.min_weight);
    std::vector<double> q = random_weights(rng, nb, opts.min_weight);
    FlatPair fp;
    for (int i = 0; i < nb; ++i) {
        const double f = opts.overlap_lo + uniform01(rng) * (opts.overlap_hi - opts.overlap_lo);
        fp.blocks.push_back(Block(p[i], q[i], f));
    }
    if (opts.allow_one_sided) {
        // Route a share of each side's mass into a row the other side misses.
        const double share_p = 0.05 + 0.2 * uniform01(rng);
        const double share_q = 0.05 + 0.2 * uniform01(rng);
        for (Block& blk : fp.blocks) {
            blk.p *= 1.0 - share_p;
            blk.q *= 1.0 - share_q;
        }
        fp.blocks.push_back(Block(share_p, 0.0));
        fp.blocks.push_back(Block(0.0, share_q));
    }
    return canonicalize(fp);
}

Matrix random_unitary(int dim, std::mt19937_64& rng) {
    if (dim < 1) throw MalformedInput("dimension must be positive");
    return thin_q(ginibre(dim, dim, rng));
}

Matrix random_density(int dim, std::mt19937_64& rng) {
    if (dim < 1) throw MalformedInput("dimension must be positive");
    const Matrix g = ginibre(dim, dim, rng);
    const Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

Matrix random_projection(int dim, int rank, std::mt19937_64& rng) {
    if (dim < 1 || rank < 0 || rank > dim) throw MalformedInput("projection rank out of range");
    if (rank == 0) return Matrix::Zero(dim, dim);
    const Matrix q = thin_q(ginibre(dim, rank, rng));
    return q * q.adjoint();
}

ChannelRep random_channel(int dim_in, int dim_out, int kraus_count, std::mt19937_64& rng) {
    if (dim_in < 1 || dim_out < 1 || kraus_count < 1)
        throw MalformedInput("channel dimensions must be positive");
    if (dim_out * kraus_count < dim_in)
        throw MalformedInput("dim_out * kraus_count must cover dim_in for an isometry");
    const Matrix v = thin_q(ginibre(dim_out * kraus_count, dim_in, rng));
    ChannelRep ch;
    for (int j = 0; j < kraus_count; ++j) {
        Matrix k(dim_out, dim_in);
        for (int a = 0; a < dim_out; ++a) k.row(a) = v.row(a * kraus_count + j);
        ch.kraus.push_back(std::move(k));
    }
    return ch;
}

FlatPair random_reachable_target(const FlatPair& source, std::mt19937_64& rng, int steps) {
    FlatPair cur = canonicalize(source);
    for (int s = 0; s < steps; ++s) {
        std::vector<int> quantum, classical;
        for (int i = 0; i < static_cast<int>(cur.blocks.size()); ++i) {
            if (cur.blocks[i].quantum())
                quantum.push_back(i);
            else
                classical.push_back(i);
        }
        const int op = uniform_int(rng, 0, 2);
        if (op == 0 && !quantum.empty()) {
            const int idx = quantum[uniform_int(rng, 0, static_cast<int>(quantum.size()) - 1)];
            const double f = *cur.blocks[idx].overlap;
            cur = boost_overlap(cur, idx, f + 0.9 * uniform01(rng) * (1.0 - f));
        } else if (op == 1 && !quantum.empty() && cur.blocks.size() < 8) {
            const int idx = quantum[uniform_int(rng, 0, static_cast<int>(quantum.size()) - 1)];
            cur = measure_block(cur, idx);
        } else if (op == 2 && !classical.empty()) {
            const int n_cl = static_cast<int>(classical.size());
            Eigen::MatrixXd t(n_cl, n_cl);
            for (int c = 0; c < n_cl; ++c) {
                double total = 0.0;
                for (int r = 0; r < n_cl; ++r) {
                    t(r, c) = 0.1 + uniform01(rng);
                    total += t(r, c);
                }
                t.col(c) /= total;
            }
            cur = stochastic_postprocess(cur, t);
        }
    }
    return cur;
}

}  // namespace flatmaj
