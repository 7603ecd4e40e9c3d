#include <cmath>

#include "test_util.hpp"

#include "flatmaj/channels.hpp"
#include "flatmaj/conditions.hpp"
#include "flatmaj/errors.hpp"
#include "flatmaj/sampling.hpp"

using namespace flatmaj;
using testutil::make_pair;
using testutil::single;

TEST_SUITE_BEGIN("conditions");

TEST_CASE("minimizer finds interior, edge and corner optima") {
    MinimizeOptions opts;

    const auto interior = minimize_over_domain([](const CompactParam& c) {
        return (c.alpha - 0.37) * (c.alpha - 0.37) + (c.w - 0.73) * (c.w - 0.73);
    }, opts);
    CHECK(interior.value <= 1e-10);
    CHECK(std::abs(interior.argmin.alpha - 0.37) <= 1e-4);
    CHECK(std::abs(interior.argmin.w - 0.73) <= 1e-4);
    CHECK(interior.stats.evaluations >= 64L * 64L);

    const auto edge = minimize_over_domain(
        [](const CompactParam& c) { return c.alpha + 0.1 * c.w * c.w; }, opts);
    CHECK(edge.value <= 1e-10);
    CHECK(edge.argmin.alpha <= 1e-5);

    // Discontinuity at the tropical row must still be scanned exactly.
    const auto corner = minimize_over_domain(
        [](const CompactParam& c) { return c.w == 0.0 ? -1.0 : c.w; }, opts);
    CHECK(corner.value == -1.0);
    CHECK(corner.argmin.w == 0.0);
}

TEST_CASE("minimizer is deterministic") {
    const auto f = [](const CompactParam& c) {
        return std::sin(13.0 * c.alpha) * std::cos(7.0 * c.w) + c.alpha * c.w;
    };
    const auto r1 = minimize_over_domain(f);
    const auto r2 = minimize_over_domain(f);
    CHECK(r1.value == r2.value);
    CHECK(r1.argmin.alpha == r2.argmin.alpha);
    CHECK(r1.argmin.w == r2.argmin.w);
    CHECK(r1.stats.evaluations == r2.stats.evaluations);
}

TEST_CASE("margin at a fixed point") {
    const FlatPair in = single(1.0, 1.0, 0.25);
    const FlatPair out = single(1.0, 1.0, 0.5);
    // Single blocks with unit weights: margin depends only on z.
    CHECK(std::abs(margin(in, out, ParamPoint::finite(0.5, 0.5)) - std::log(2.0) / 3.0) <=
          1e-12);
    CHECK(std::abs(margin(in, out, ParamPoint::tropical()) - std::log(2.0)) <= 1e-12);
}

TEST_CASE("strict conversion: overlap can rise") {
    const Verdict v = check_exact(single(1.0, 1.0, 0.25), single(1.0, 1.0, 0.5));
    CHECK(v.kind == VerdictKind::strict);
    // Worst margin log(2)/3 at the smallest admissible z (w = 1).
    CHECK(std::abs(v.worst_margin - 0.2310490601866484) <= 1e-9);
    CHECK(std::abs(v.witness.w - 1.0) <= 1e-6);
    CHECK(v.catalytic_applies);
    CHECK(!v.large_sample_applies);  // no disjoint classical mass in the input
    CHECK(v.tau_strict == 1e-9);
    CHECK(v.tau_zero == 1e-9);
    CHECK(v.grid_stats.evaluations > 0);
}

TEST_CASE("failing conversion: overlap cannot fall") {
    const Verdict v = check_exact(single(1.0, 1.0, 0.5), single(1.0, 1.0, 0.25));
    CHECK(v.kind == VerdictKind::fails);
    // Infimum on the tropical row. The polish step may stop a hair off the
    // boundary when the landscape is flat there, so allow slack below 1e-12.
    CHECK(std::abs(v.worst_margin + std::log(2.0)) <= 1e-9);
    CHECK(v.witness.w <= 1e-12);
    CHECK(!v.catalytic_applies);
    CHECK(!v.large_sample_applies);
}

TEST_CASE("identical pairs sit in the tolerance band") {
    const FlatPair a = canonicalize(make_pair({Block(0.5, 0.25, 0.81), Block(0.5, 0.75, 0.64)}));
    const Verdict v = check_exact(a, a);
    CHECK(v.kind == VerdictKind::non_strict);
    CHECK(std::abs(v.worst_margin) <= 1e-12);
}

TEST_CASE("pu2 input upgrades strict to a large-sample statement") {
    // Disjoint classical mass on both sides of the input switches pu2 on.
    const FlatPair in = canonicalize(
        make_pair({Block(0.8, 0.8, 0.25), Block(0.2, 0.0), Block(0.0, 0.2)}));
    const FlatPair out = canonicalize(
        make_pair({Block(0.8, 0.8, 0.6), Block(0.2, 0.0), Block(0.0, 0.2)}));
    const Verdict v = check_exact(in, out);
    CHECK(v.kind == VerdictKind::strict);
    CHECK(v.input_class.satisfies_pu2);
    CHECK(v.catalytic_applies);
    CHECK(v.large_sample_applies);
}

TEST_CASE("single blocks: strict exactly when the overlap increases") {
    auto gen = testutil::rng(41);
    for (int k = 0; k < 50; ++k) {
        double f1 = 0.05 + 0.9 * uniform01(gen);
        double f2 = 0.05 + 0.9 * uniform01(gen);
        if (std::abs(f1 - f2) < 1e-6) f2 = f1 + 1e-3;
        const Verdict v = check_exact(single(1.0, 1.0, f1), single(1.0, 1.0, f2));
        if (f1 < f2)
            CHECK(v.kind == VerdictKind::strict);
        else
            CHECK(v.kind == VerdictKind::fails);
    }
}

TEST_CASE("strictness is transitive along boost chains") {
    auto gen = testutil::rng(42);
    PairSampleOptions opts;
    opts.max_blocks = 2;
    opts.overlap_hi = 0.7;
    for (int k = 0; k < 10; ++k) {
        const FlatPair a = canonicalize(random_normalized_pair(gen, opts));
        FlatPair b = a;
        for (int i = 0; i < static_cast<int>(b.blocks.size()); ++i)
            b = boost_overlap(b, i, std::min(0.98, *b.blocks[i].overlap + 0.05));
        FlatPair c = b;
        for (int i = 0; i < static_cast<int>(c.blocks.size()); ++i)
            c = boost_overlap(c, i, std::min(0.99, *c.blocks[i].overlap + 0.05));

        REQUIRE(check_exact(a, b).kind == VerdictKind::strict);
        REQUIRE(check_exact(b, c).kind == VerdictKind::strict);
        CHECK(check_exact(a, c).kind != VerdictKind::fails);
    }
}

TEST_CASE("margins are invariant under block permutation") {
    const FlatPair in = canonicalize(
        make_pair({Block(0.3, 0.5, 0.7), Block(0.7, 0.5, 0.2)}));
    const FlatPair in_swapped = canonicalize(
        make_pair({Block(0.7, 0.5, 0.2), Block(0.3, 0.5, 0.7)}));
    const FlatPair out = canonicalize(
        make_pair({Block(0.4, 0.6, 0.8), Block(0.6, 0.4, 0.5)}));
    const Verdict v1 = check_exact(in, out);
    const Verdict v2 = check_exact(in_swapped, out);
    CHECK(v1.worst_margin == v2.worst_margin);
    CHECK(v1.kind == v2.kind);
}

TEST_CASE("hypothesis gates") {
    const FlatPair good = single(1.0, 1.0, 0.5);

    // Trace mismatch between the sides.
    FlatPair subnorm = single(0.5, 0.5, 0.5);
    CHECK_THROWS_AS(check_exact(subnorm, good), HypothesisViolation);
    CHECK_THROWS_WITH_AS(check_exact(good, subnorm),
                         doctest::Contains("normalization-mismatch"), HypothesisViolation);

    // No overlapping block anywhere: minimal restrictions fail.
    const FlatPair disjoint = canonicalize(single(1.0, 1.0, 0.0));
    CHECK_THROWS_AS(check_exact(disjoint, good), HypothesisViolation);
    CHECK_THROWS_AS(check_exact(good, disjoint), HypothesisViolation);

    // The zero pair is gated too.
    CHECK_THROWS_AS(check_exact(FlatPair{}, good), HypothesisViolation);

    CHECK_NOTHROW(require_convertibility_hypotheses(canonicalize(good), canonicalize(good)));
}

TEST_CASE("asymptotic gates: aligned input blocks and commuting outputs") {
    const FlatPair quantum = single(1.0, 1.0, 0.5);
    const FlatPair with_aligned = canonicalize(
        make_pair({Block(0.5, 0.5, 0.5), Block(0.5, 0.5, 1.0)}));
    CHECK_THROWS_AS(check_asymptotic(with_aligned, quantum), HypothesisViolation);

    const FlatPair classical = canonicalize(
        make_pair({Block(0.6, 0.4, 1.0), Block(0.4, 0.6, 1.0)}));
    CHECK_THROWS_AS(check_asymptotic(quantum, classical), HypothesisViolation);

    CHECK_NOTHROW(check_asymptotic(single(1.0, 1.0, 0.25), quantum));
}

TEST_CASE("collar shrinks toward the closed-domain infimum") {
    // Margin decreasing in z: the open-region minimum sits on the collar and
    // approaches the tropical value as the collar shrinks.
    const FlatPair in = single(1.0, 1.0, 0.5);
    const FlatPair out = single(1.0, 1.0, 0.25);
    CheckOptions opts;
    double prev = 1.0;
    for (double collar : {1e-2, 1e-4, 1e-6}) {
        opts.boundary_collar = collar;
        const Verdict v = check_asymptotic(in, out, opts);
        CHECK(v.kind == VerdictKind::fails);
        CHECK(v.worst_margin <= prev + 1e-12);
        prev = v.worst_margin;
    }
    CHECK(std::abs(prev + std::log(2.0)) <= 1e-4);

    // The open region is a subset: its infimum can only be larger.
    const Verdict closed = check_exact(in, out);
    CHECK(prev >= closed.worst_margin - 1e-12);
}

TEST_SUITE_END();
