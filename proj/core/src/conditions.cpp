#include "flatmaj/conditions.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <vector>

#include "flatmaj/errors.hpp"
#include "flatmaj/parallel.hpp"

namespace flatmaj {

namespace {

struct Candidate {
    double value;
    double alpha;
    double w;
};

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Standard Nelder-Mead on [0,1]^2 with clamped evaluations; deterministic.
// Returns the refined best point and value; iters reports the count used.
Candidate nelder_mead(const std::function<double(const CompactParam&)>& f, Candidate seed,
                      double step, int max_iters, double tol, long& evals, int& iters) {
    struct Pt {
        double x, y, v;
    };
    auto eval = [&](double x, double y) {
        ++evals;
        return f(CompactParam{clamp01(x), clamp01(y)});
    };
    std::array<Pt, 3> simplex{{{seed.alpha, seed.w, seed.value},
                               {clamp01(seed.alpha + step), seed.w, 0.0},
                               {seed.alpha, clamp01(seed.w + step), 0.0}}};
    // Degenerate seeds on the upper box corner step inward instead.
    if (simplex[1].x == simplex[0].x) simplex[1].x = clamp01(seed.alpha - step);
    if (simplex[2].y == simplex[0].y) simplex[2].y = clamp01(seed.w - step);
    simplex[1].v = eval(simplex[1].x, simplex[1].y);
    simplex[2].v = eval(simplex[2].x, simplex[2].y);

    iters = 0;
    for (; iters < max_iters; ++iters) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Pt& a, const Pt& b) { return a.v < b.v; });
        const double diam = std::max(
            std::abs(simplex[2].x - simplex[0].x) + std::abs(simplex[2].y - simplex[0].y),
            std::abs(simplex[1].x - simplex[0].x) + std::abs(simplex[1].y - simplex[0].y));
        if (diam < tol) break;

        const double cx = (simplex[0].x + simplex[1].x) / 2.0;
        const double cy = (simplex[0].y + simplex[1].y) / 2.0;
        const Pt& worst = simplex[2];

        Pt refl{cx + (cx - worst.x), cy + (cy - worst.y), 0.0};
        refl.v = eval(refl.x, refl.y);
        if (refl.v < simplex[0].v) {
            Pt expanded{cx + 2.0 * (cx - worst.x), cy + 2.0 * (cy - worst.y), 0.0};
            expanded.v = eval(expanded.x, expanded.y);
            simplex[2] = expanded.v < refl.v ? expanded : refl;
            continue;
        }
        if (refl.v < simplex[1].v) {
            simplex[2] = refl;
            continue;
        }
        Pt contracted{cx + 0.5 * (worst.x - cx), cy + 0.5 * (worst.y - cy), 0.0};
        contracted.v = eval(contracted.x, contracted.y);
        if (contracted.v < worst.v) {
            simplex[2] = contracted;
            continue;
        }
        for (int i = 1; i < 3; ++i) {
            simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
            simplex[i].y = simplex[0].y + 0.5 * (simplex[i].y - simplex[0].y);
            simplex[i].v = eval(simplex[i].x, simplex[i].y);
        }
    }
    std::sort(simplex.begin(), simplex.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
    return Candidate{simplex[0].v, clamp01(simplex[0].x), clamp01(simplex[0].y)};
}

Verdict classify_margin(const MinimizeResult& min_result, const FlatPair& in, const FlatPair& out,
                        const CheckOptions& opts) {
    Verdict v;
    v.worst_margin = min_result.value;
    v.witness = min_result.argmin;
    v.grid_stats = min_result.stats;
    v.tau_strict = opts.tau_strict;
    v.tau_zero = opts.tau_zero;
    v.input_class = classify(in);
    v.output_class = classify(out);
    if (min_result.value > opts.tau_strict) {
        v.kind = VerdictKind::strict;
    } else if (min_result.value < -opts.tau_zero) {
        v.kind = VerdictKind::fails;
    } else {
        v.kind = VerdictKind::non_strict;
    }
    v.catalytic_applies = v.kind == VerdictKind::strict;
    v.large_sample_applies = v.catalytic_applies && v.input_class.satisfies_pu2;
    return v;
}

}  // namespace

void require_convertibility_hypotheses(const FlatPair& in, const FlatPair& out) {
    if (in.blocks.empty() || out.blocks.empty()) {
        throw HypothesisViolation("conversion checks require nonzero pairs");
    }
    if (!in.is_minimal_restrictions() || !out.is_minimal_restrictions() ||
        !classify(in).has_some_overlap || !classify(out).has_some_overlap) {
        throw HypothesisViolation(
            "conversion checks require minimal restrictions: some block with weight on both "
            "sides and nonzero overlap");
    }
    const auto [ia, ib] = trace_pair(in);
    const auto [oa, ob] = trace_pair(out);
    const double tol = 1e-9;
    if (std::abs(ia - oa) > tol || std::abs(ib - ob) > tol || std::abs(ia - 1.0) > tol ||
        std::abs(ib - 1.0) > tol) {
        throw HypothesisViolation(
            "normalization-mismatch: conversion checks require both pairs normalized to unit "
            "traces");
    }
}

MinimizeResult minimize_over_domain(const std::function<double(const CompactParam&)>& f,
                                    const MinimizeOptions& opts) {
    if (opts.grid_size < 2 || opts.keep_cells < 1) {
        throw MalformedInput("minimizer requires grid_size >= 2 and keep_cells >= 1");
    }
    const int g = opts.grid_size;
    const double h = 1.0 / (g - 1);
    std::vector<double> values(static_cast<std::size_t>(g) * g);

    parallel_for(values.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / g;
        const int j = static_cast<int>(idx) % g;
        values[idx] = f(CompactParam{i * h, j * h});
    });

    MinimizeResult result;
    result.stats.evaluations = static_cast<long>(values.size());

    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t keep = std::min<std::size_t>(opts.keep_cells, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return values[a] != values[b] ? values[a] < values[b] : a < b;
                      });

    Candidate best{values[order[0]], (order[0] / g) * h, (order[0] % g) * h};
    for (std::size_t k = 0; k < keep; ++k) {
        const std::size_t idx = order[k];
        Candidate seed{values[idx], (idx / g) * h, (idx % g) * h};
        int iters = 0;
        const Candidate refined = nelder_mead(f, seed, h, opts.max_refine_iters,
                                              opts.simplex_tol, result.stats.evaluations, iters);
        result.stats.refinement_depth = std::max(result.stats.refinement_depth, iters);
        if (refined.value < best.value) best = refined;
    }
    result.argmin = CompactParam{best.alpha, best.w};
    result.value = best.value;
    return result;
}

double margin(const FlatPair& pair_in, const FlatPair& pair_out, const ParamPoint& pt) {
    return d_hat(canonicalize(pair_in), pt) - d_hat(canonicalize(pair_out), pt);
}

Verdict check_exact(const FlatPair& pair_in, const FlatPair& pair_out, const CheckOptions& opts) {
    const FlatPair in = canonicalize(pair_in);
    const FlatPair out = canonicalize(pair_out);
    require_convertibility_hypotheses(in, out);
    const auto f = [&](const CompactParam& c) {
        const ParamPoint pt = c.to_point();
        return d_hat(in, pt) - d_hat(out, pt);
    };
    return classify_margin(minimize_over_domain(f, opts.minimize), in, out, opts);
}

Verdict check_asymptotic(const FlatPair& pair_in, const FlatPair& pair_out,
                         const CheckOptions& opts) {
    const FlatPair in = canonicalize(pair_in);
    const FlatPair out = canonicalize(pair_out);
    require_convertibility_hypotheses(in, out);
    if (!classify(in).satisfies_pu1) {
        throw HypothesisViolation(
            "asymptotic check requires an input pair with no aligned block (overlap 1)");
    }
    bool out_noncommuting = false;
    for (const Block& b : out.blocks) {
        if (b.quantum()) out_noncommuting = true;
    }
    if (!out_noncommuting) {
        throw HypothesisViolation(
            "asymptotic check requires a non-commuting output pair (some overlap in (0,1))");
    }
    const double delta = opts.boundary_collar;
    const auto f = [&](const CompactParam& c) {
        const CompactParam inset{delta + (1.0 - 2.0 * delta) * c.alpha,
                                 delta + (1.0 - 2.0 * delta) * c.w};
        const ParamPoint pt = inset.to_point();
        return d_hat(in, pt) - d_hat(out, pt);
    };
    MinimizeResult min_result = minimize_over_domain(f, opts.minimize);
    // Report the witness in true coordinates.
    min_result.argmin = CompactParam{delta + (1.0 - 2.0 * delta) * min_result.argmin.alpha,
                                     delta + (1.0 - 2.0 * delta) * min_result.argmin.w};
    return classify_margin(min_result, in, out, opts);
}

}  // namespace flatmaj
