#pragma once

#include <random>

#include "flatmaj/channels.hpp"
#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// Deterministic generators for tests and stress runs. All draws go through
// the engine's raw 64-bit output, so a fixed seed reproduces byte-identical
// instances independent of the standard library's distribution internals.

double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

struct PairSampleOptions {
    int max_blocks = 6;
    double min_weight = 0.01;
    double overlap_lo = 0.05;
    double overlap_hi = 0.95;
    bool allow_one_sided = false;
};

// Normalized flat pair with every weight at least min_weight (before the
// optional one-sided rows) and every overlap inside [overlap_lo, overlap_hi].
FlatPair random_normalized_pair(std::mt19937_64& rng, const PairSampleOptions& opts = {});

Matrix random_unitary(int dim, std::mt19937_64& rng);
Matrix random_density(int dim, std::mt19937_64& rng);
Matrix random_projection(int dim, int rank, std::mt19937_64& rng);
ChannelRep random_channel(int dim_in, int dim_out, int kraus_count, std::mt19937_64& rng);

// A target reachable from the source by a channel: a chain of overlap boosts,
// block measurements and classical postprocessing steps.
FlatPair random_reachable_target(const FlatPair& source, std::mt19937_64& rng, int steps = 3);

}  // namespace flatmaj
