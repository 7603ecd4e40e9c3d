#pragma once

#include <optional>

#include "flatmaj/channels.hpp"
#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// Does a completely positive trace-preserving map exist with
// channel(inputs.a) = outputs.a and channel(inputs.b) = outputs.b?
struct FeasibilityProblem {
    DenseOperatorPair inputs;   // unit-trace PSD matrices on the input space
    DenseOperatorPair outputs;  // unit-trace PSD matrices on the output space
    double tolerance = 1e-7;
    int max_iters = 20000;
    int dimension_cap = 4096;   // on dim_in * dim_out (the Choi dimension)
};

// The oracle is one-sided: it certifies feasibility with an explicit channel
// or reports undetermined. It never claims infeasibility.
enum class FeasStatus { feasible, undetermined };

struct FeasibilityResult {
    FeasStatus status = FeasStatus::undetermined;
    double residual = 0.0;   // affine violation of the final PSD iterate
    int iterations = 0;
    std::optional<ChannelRep> channel;
};

// Dykstra-corrected alternating projections on the Choi matrix between the
// PSD cone and the affine set {Tr_out J = I, both images match}. The cone
// projection is restricted to the face that rank-deficient targets force
// every feasible point into, which keeps convergence linear there. The affine
// projection is an exact least-squares projector factored once per instance.
// Deterministic for a fixed instance.
FeasibilityResult solve(const FeasibilityProblem& problem);

// Classical specialization: a column-stochastic matrix T with Tp = p2 and
// Tq = q2. Residual threshold for the feasible verdict: 1e-9.
struct ClassicalFeasibilityResult {
    FeasStatus status = FeasStatus::undetermined;
    double residual = 0.0;
    int iterations = 0;
    std::optional<Eigen::MatrixXd> transition;
};

ClassicalFeasibilityResult solve_classical(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                           const Eigen::VectorXd& p2, const Eigen::VectorXd& q2,
                                           double tolerance = 1e-9, int max_iters = 20000);

// Literal n-vs-m tensor-power instance: Kronecker powers of the dense
// realizations (single-block pairs give dims 2^n and 2^m). Throws
// DimensionCapExceeded before building anything too large.
FeasibilityProblem tensor_instance(const FlatPair& pair_in, const FlatPair& pair_out, int n,
                                   int m, int dimension_cap = 4096);

}  // namespace flatmaj
