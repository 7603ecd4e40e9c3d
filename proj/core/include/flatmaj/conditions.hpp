#pragma once

#include <functional>

#include "flatmaj/entropies.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

enum class VerdictKind { strict, non_strict, fails };

struct GridStats {
    long evaluations = 0;
    int refinement_depth = 0;
};

struct MinimizeOptions {
    int grid_size = 64;        // G x G evaluation grid on [0,1]^2
    int keep_cells = 8;        // best cells refined by Nelder-Mead
    int max_refine_iters = 200;
    double simplex_tol = 1e-10;
};

struct MinimizeResult {
    CompactParam argmin;
    double value = 0.0;
    GridStats stats;
};

// Deterministic global minimization over the compact family [0,1]^2 in
// (alpha, w) coordinates, including the tropical row w = 0 and the boundary
// alpha in {0,1}: uniform grid scan, then Nelder-Mead refinement seeded at
// the best cells, evaluations clamped into the box.
MinimizeResult minimize_over_domain(const std::function<double(const CompactParam&)>& f,
                                    const MinimizeOptions& opts = {});

struct CheckOptions {
    MinimizeOptions minimize;
    double tau_strict = 1e-9;
    double tau_zero = 1e-9;
    double boundary_collar = 1e-6;  // open-region inset used by check_asymptotic
};

struct Verdict {
    VerdictKind kind = VerdictKind::non_strict;
    double worst_margin = 0.0;
    CompactParam witness;
    GridStats grid_stats;
    double tau_strict = 0.0;
    double tau_zero = 0.0;
    PairClass input_class;
    PairClass output_class;
    // Strict margins imply a catalytic conversion within the flat family.
    bool catalytic_applies = false;
    // Additionally requires disjoint classical mass on both sides of the input.
    bool large_sample_applies = false;
};

// d_hat(pair_in, pt) - d_hat(pair_out, pt). Pairs are canonicalized.
double margin(const FlatPair& pair_in, const FlatPair& pair_out, const ParamPoint& pt);

// Shared hypothesis gate for conversion decisions: both pairs nonzero with
// minimal restrictions and unit traces. Expects canonical pairs; throws
// HypothesisViolation otherwise.
void require_convertibility_hypotheses(const FlatPair& in, const FlatPair& out);

// Exact conversion check: minimizes the margin over the closed compact family.
// strict: every margin exceeds tau_strict; fails: a margin below -tau_zero
// exists; non_strict otherwise (the tolerance band is reported, not forced).
// Requires both pairs normalized with equal traces and minimal restrictions.
Verdict check_exact(const FlatPair& pair_in, const FlatPair& pair_out,
                    const CheckOptions& opts = {});

// Asymptotic/approximate check: minimizes the margin over the open region,
// realized as the closed square inset by the boundary collar. Requires the
// input pair to have no aligned block (overlap 1) and the output pair to be
// non-commuting (some block with overlap strictly inside (0,1)).
Verdict check_asymptotic(const FlatPair& pair_in, const FlatPair& pair_out,
                         const CheckOptions& opts = {});

}  // namespace flatmaj
