#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatmaj/channels.hpp"
#include "flatmaj/conditions.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// A parameter point where both divergences vanish, so the ratio carries no
// information and is dropped from the minimization.
struct ExcludedPoint {
    CompactParam at;
    double numerator = 0.0;
    double denominator = 0.0;
};

struct RateReport {
    double rate = 0.0;           // copies of out per copy of in, asymptotically
    bool unbounded = false;      // every point degenerate: any rate is allowed
    CompactParam argmin;
    GridStats stats;
    std::vector<ExcludedPoint> excluded;  // capped sample, sorted by parameter
    bool excluded_truncated = false;
};

// Infimum over the parameter domain of the divergence ratio in/out. The
// denominator guard is 1e-14: points where only the denominator vanishes do
// not constrain the rate, points where both vanish are excluded and reported.
RateReport optimal_rate(const FlatPair& in, const FlatPair& out,
                        const MinimizeOptions& opts = {});

enum class CertifyOutcome {
    achieved,           // explicit channel found at some copy count
    not_found,          // rate admissible but no witness within the caps
    refuted_by_rate,    // requested rate exceeds the optimum
    inconclusive_band,  // requested rate within the numerical band of the optimum
    trivial,            // zero requested rate
};

struct CertifyOptions {
    int n_max = 8;              // cap on input copy count
    double rate_band = 1e-6;    // indistinguishable-from-optimal band
    double feas_tolerance = 1e-7;
    int feas_max_iters = 20000;
    int dimension_cap = 4096;
    MinimizeOptions minimize;
};

struct CertifyReport {
    CertifyOutcome outcome = CertifyOutcome::not_found;
    int n_found = 0;   // input copies of the witness
    int m_found = 0;   // output copies of the witness
    RateReport rate;
    std::optional<ChannelRep> channel;
    std::string detail;
};

// Decide whether the rational rate num/den is achievable: compare against the
// optimal rate, then search copy counts n = den, 2*den, ... <= n_max for an
// explicit channel witness.
CertifyReport certify_achievable(const FlatPair& in, const FlatPair& out, int num, int den,
                                 const CertifyOptions& opts = {});

}  // namespace flatmaj
