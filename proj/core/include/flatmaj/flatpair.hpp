#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flatmaj {

namespace tolerance {
// Weights at or below this are treated as exactly zero.
inline constexpr double kWeightFloor = 1e-15;
// Squared overlaps within this of 0 or 1 are classified as orthogonal/aligned.
inline constexpr double kOverlapSnap = 1e-12;
// Normalization membership test on (trace_a, trace_b).
inline constexpr double kTraceNorm = 1e-12;
}  // namespace tolerance

// One diagonal block of a flat pair: weight p on the first component, weight q
// on the second, and the squared overlap of their unit vectors. The overlap is
// empty exactly when one side of the block is zero (a classical one-sided row).
struct Block {
    double p = 0.0;
    double q = 0.0;
    std::optional<double> overlap;

    Block() = default;
    Block(double p_, double q_) : p(p_), q(q_) {}
    Block(double p_, double q_, double overlap_) : p(p_), q(q_), overlap(overlap_) {}

    bool both_positive() const { return p > 0.0 && q > 0.0; }
    // Both weights positive with overlap strictly inside (0, 1).
    bool quantum() const {
        return both_positive() && overlap.has_value() && *overlap > 0.0 && *overlap < 1.0;
    }
    // Both weights positive on one shared direction (overlap == 1).
    bool classical_diagonal() const {
        return both_positive() && overlap.has_value() && *overlap >= 1.0;
    }
};

// A pair of positive semidefinite operators that are weighted sums of rank-one
// projections on orthogonal blocks, recorded block by block. The container is
// a multiset: order is irrelevant up to canonical form, duplicates count.
struct FlatPair {
    std::vector<Block> blocks;
    std::string label;

    bool is_normalized(double tol = tolerance::kTraceNorm) const;
    // Zero pair, or at least one block carries weight on both sides with
    // nonzero overlap.
    bool is_minimal_restrictions() const;
};

// Structural classification flags, evaluated on a canonical pair.
struct PairClass {
    bool is_zero = false;
    bool has_some_overlap = false;
    bool everywhere_overlapping = false;
    bool satisfies_pu1 = false;
    bool satisfies_pu2 = false;
    bool is_classical = false;
    bool states_commute = false;
};

// Canonical form: drops (0,0) blocks, turns one-sided blocks into classical
// rows with empty overlap, splits orthogonal blocks (overlap 0) into two
// classical rows, snaps overlaps within kOverlapSnap of {0,1}, sorts blocks
// lexicographically by (p, q, overlap) with empty overlap ordered last.
// Idempotent. Throws MalformedInput on negative weights, overlaps outside
// [0,1], or a both-sided block with no overlap recorded.
FlatPair canonicalize(const FlatPair& pair);

// Multiset union of blocks. Unit: the zero pair.
FlatPair direct_sum(const FlatPair& a, const FlatPair& b);

// All cross products of blocks: weights multiply, overlaps multiply; the
// overlap is empty whenever the resulting block has a zero side. Not
// canonicalized. Unit: unit_pair().
FlatPair tensor(const FlatPair& a, const FlatPair& b);

// n-fold tensor. n == 0 returns unit_pair(). Not canonicalized.
FlatPair tensor_power(const FlatPair& a, int n);

// The multiplicative unit [(1, 1, overlap 1)].
FlatPair unit_pair();

// Classification of a canonical pair.
PairClass classify(const FlatPair& canonical_pair);

// (sum of p, sum of q). Additive under direct_sum, multiplicative under tensor.
std::pair<double, double> trace_pair(const FlatPair& pair);

// Blockwise comparison of canonical forms within an entrywise tolerance.
bool approx_equal(const FlatPair& a, const FlatPair& b, double tol);

}  // namespace flatmaj
