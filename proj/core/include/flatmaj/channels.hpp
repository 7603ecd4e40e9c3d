#pragma once

#include <optional>
#include <vector>

#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// Completely positive trace-preserving map in Kraus form. Every Kraus
// operator is dim_out x dim_in; sum of K^dag K equals the identity within
// tp_residual().
struct ChannelRep {
    std::vector<Matrix> kraus;

    int dim_in() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().cols()); }
    int dim_out() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }

    Matrix apply(const Matrix& x) const;
    // Choi matrix on input (x) output with flattened index i*dim_out + a.
    Matrix choi() const;
    double tp_residual() const;
};

ChannelRep identity_channel(int dim);

// Dephasing in the computational basis: x -> sum_i |i><i| x |i><i|.
ChannelRep pvm_channel(int dim);

// Constant channel x -> tr(x) * state.
ChannelRep trace_and_prepare(const Matrix& state, int dim_in);

// Kraus operators of the channel whose Choi matrix is given (eigenvectors
// above eig_floor). The Kraus family is renormalized through (sum K^dag K)^-1/2
// so the result is trace preserving to machine precision even when the Choi
// input is only approximately admissible.
ChannelRep kraus_from_choi(const Matrix& choi, int dim_in, int dim_out, double eig_floor = 1e-10);

// 2x2 channel mapping the standard pure pair with squared overlap f_in to the
// one with squared overlap f_out. Requires f_in <= f_out: overlaps can only
// grow under channels. Near-equal overlaps short-circuit to the identity;
// otherwise the channel is synthesized numerically.
ChannelRep uhlmann_channel(double f_in, double f_out, double tolerance = 1e-8,
                           int max_iters = 40000);

// Measure-and-rotate protocol turning m copies of a pure pair with squared
// overlap f into the target flat pair. The channel acts on the two-dimensional
// span of the m-copy inputs (basis: first input state, its orthocomplement).
struct PowerProtocolResult {
    int m = 0;                  // copies consumed when materialized
    bool materialized = false;
    long long m_bound = 0;      // analytic copy count when m exceeds m_cap
    std::optional<ChannelRep> channel;
};

PowerProtocolResult power_universal_protocol(const FlatPair& target, double f, int m_cap = 64);

// Rotates every quantum block's overlap up by a common angle eta, chosen as
// large as possible subject to (a) every block staying strictly quantum and
// (b) the second state moving by fidelity at most epsilon. Classical and
// one-sided rows are untouched.
struct SmoothResult {
    FlatPair pair;
    double eta = 0.0;            // applied rotation angle
    double fidelity_bound = 1.0; // guaranteed fidelity to the original pair
};

SmoothResult epsilon_smooth(const FlatPair& pair, double epsilon);

// Uniform mixture over conversion progress: the direct sum of
// in^(x l) tensor out^(x n-1-l) for l = 0..n-1, weights 1/n. n = 1 gives the
// unit pair.
FlatPair catalyst(const FlatPair& in, const FlatPair& out, int n);

// Flat-level maps realizable by channels on any dense realization.

// Projective measurement of one block onto its first state: (p, q, F) becomes
// an aligned row (p, q*F) plus a one-sided row (0, q*(1-F)).
FlatPair measure_block(const FlatPair& pair, int index);

// Raise one block's overlap to new_overlap >= current.
FlatPair boost_overlap(const FlatPair& pair, int index, double new_overlap);

// Apply a column-stochastic matrix to the classical rows (aligned or
// one-sided), in canonical order; quantum blocks pass through. transition is
// n_out x n_classical.
FlatPair stochastic_postprocess(const FlatPair& pair, const Eigen::MatrixXd& transition);

}  // namespace flatmaj
