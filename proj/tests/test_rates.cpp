#include <cmath>
#include <limits>

#include "doctest.h"
#include "test_util.hpp"

#include "flatmaj/channels.hpp"
#include "flatmaj/errors.hpp"
#include "flatmaj/flatpair.hpp"
#include "flatmaj/rates.hpp"
#include "flatmaj/sampling.hpp"

using namespace flatmaj;
using testutil::make_pair;
using testutil::single;

TEST_SUITE_BEGIN("rates");

TEST_CASE("identity conversion has unit rate") {
    const FlatPair p = make_pair({Block(0.3, 0.5, 0.7), Block(0.7, 0.5, 0.2)});
    const RateReport rep = optimal_rate(p, p);
    CHECK_FALSE(rep.unbounded);
    CHECK(rep.rate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.excluded.empty());
    CHECK(rep.stats.evaluations >= 64L * 64L);
}

TEST_CASE("single block rates are overlap log ratios") {
    // One quantum block on each side: the ratio is log F_in / log F_out at
    // every parameter point, so the infimum is that constant.
    const RateReport frozen = optimal_rate(single(1, 1, 0.25), single(1, 1, 0.5));
    CHECK(frozen.rate == doctest::Approx(2.0).epsilon(1e-9));

    auto gen = testutil::rng(7101);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = 0.05 + 0.9 * uniform01(gen);
        const double b = 0.05 + 0.9 * uniform01(gen);
        const double expect = std::log(a) / std::log(b);
        const RateReport rep = optimal_rate(single(1, 1, a), single(1, 1, b));
        CHECK(rep.rate == doctest::Approx(expect).epsilon(1e-9));

        // Raising the target overlap can only make the conversion easier.
        const double b_up = b + 0.5 * (1.0 - b);
        const RateReport easier = optimal_rate(single(1, 1, a), single(1, 1, b_up));
        CHECK(easier.rate == doctest::Approx(std::log(a) / std::log(b_up)).epsilon(1e-9));
        CHECK(easier.rate >= rep.rate - 1e-9);
    }
}

TEST_CASE("rate scales linearly in input copies") {
    auto gen = testutil::rng(7102);
    PairSampleOptions opts;
    opts.max_blocks = 3;
    for (int trial = 0; trial < 5; ++trial) {
        const FlatPair in = random_normalized_pair(gen, opts);
        const FlatPair out = random_normalized_pair(gen, opts);
        const RateReport once = optimal_rate(in, out);
        const RateReport twice = optimal_rate(tensor_power(in, 2), out);
        REQUIRE_FALSE(once.unbounded);
        CHECK(twice.rate == doctest::Approx(2.0 * once.rate).epsilon(1e-7));
    }
}

TEST_CASE("two block instance matches the dense scan") {
    const FlatPair in = make_pair({Block(0.5, 0.25, 0.81), Block(0.5, 0.75, 0.64)});
    const FlatPair out = make_pair({Block(0.6, 0.4, 0.5), Block(0.4, 0.6, 0.3)});
    const RateReport rep = optimal_rate(in, out);
    // Value frozen from a fine independent scan; the minimizer sits on the
    // max-overlap row where the ratio is log 0.81 / log 0.5.
    CHECK(rep.rate == doctest::Approx(0.3040061868900999).epsilon(1e-7));
    CHECK(rep.argmin.w <= 0.05);
    CHECK_FALSE(rep.unbounded);
}

TEST_CASE("unit equivalent targets put no constraint on the rate") {
    const FlatPair in = make_pair({Block(0.3, 0.5, 0.7), Block(0.7, 0.5, 0.2)});
    const FlatPair out = make_pair({Block(0.3, 0.3, 1.0), Block(0.7, 0.7, 1.0)});
    const RateReport rep = optimal_rate(in, out);
    CHECK(rep.unbounded);
    CHECK(std::isinf(rep.rate));
}

TEST_CASE("doubly degenerate points are excluded and reported") {
    // Both pairs have an aligned block carrying all mass on the second state,
    // so both divergences vanish along the tropical row and both edges of the
    // parameter square. Those points say nothing about the rate.
    const FlatPair in = make_pair({Block(0.3, 1.0, 1.0), Block(0.7, 0.0)});
    const FlatPair out = make_pair({Block(0.5, 1.0, 1.0), Block(0.5, 0.0)});
    const RateReport rep = optimal_rate(in, out);
    CHECK(rep.rate == doctest::Approx(std::log(0.3) / std::log(0.5)).epsilon(1e-6));
    REQUIRE_FALSE(rep.excluded.empty());
    CHECK(rep.excluded.size() <= 64);
    CHECK(rep.excluded_truncated);
    for (std::size_t i = 0; i < rep.excluded.size(); ++i) {
        CHECK(rep.excluded[i].numerator < 1e-14);
        CHECK(rep.excluded[i].denominator < 1e-14);
        if (i > 0) {
            const auto& a = rep.excluded[i - 1].at;
            const auto& b = rep.excluded[i].at;
            CHECK((a.alpha < b.alpha || (a.alpha == b.alpha && a.w <= b.w)));
        }
    }
}

TEST_CASE("certify outcome: trivial at zero rate") {
    const CertifyReport rep = certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 0, 1);
    CHECK(rep.outcome == CertifyOutcome::trivial);
    CHECK(rep.m_found == 0);
    REQUIRE(rep.channel.has_value());
    CHECK(rep.channel->dim_out() == 1);
}

TEST_CASE("certify outcome: refuted when the rate is too high") {
    const CertifyReport rep = certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 3, 1);
    CHECK(rep.outcome == CertifyOutcome::refuted_by_rate);
    CHECK(rep.detail == "requested rate exceeds the optimal rate");
}

TEST_CASE("certify outcome: band at the exact optimum") {
    const CertifyReport rep = certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 2, 1);
    CHECK(rep.outcome == CertifyOutcome::inconclusive_band);
}

TEST_CASE("certify outcome: witness channel below the optimum") {
    const CertifyReport one = certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 1, 1);
    CHECK(one.outcome == CertifyOutcome::achieved);
    CHECK(one.n_found == 1);
    CHECK(one.m_found == 1);
    CHECK(one.channel.has_value());

    // den = 2 forces the copy search to start at two input copies.
    const CertifyReport half = certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 1, 2);
    CHECK(half.outcome == CertifyOutcome::achieved);
    CHECK(half.n_found == 2);
    CHECK(half.m_found == 1);
}

TEST_CASE("certify outcome: not found inside the caps") {
    CertifyOptions opts;
    opts.n_max = 8;
    const CertifyReport rep =
        certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 1, 9, opts);
    CHECK(rep.outcome == CertifyOutcome::not_found);
    CHECK(rep.detail == "no channel witness within the copy cap");

    CertifyOptions tight;
    tight.dimension_cap = 1;
    const CertifyReport capped =
        certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 1, 1, tight);
    CHECK(capped.outcome == CertifyOutcome::not_found);
    CHECK(capped.detail == "copy search stopped at the dimension cap");
}

TEST_CASE("certify rejects malformed rational rates") {
    CHECK_THROWS_AS(certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), -1, 2),
                    MalformedInput);
    CHECK_THROWS_AS(certify_achievable(single(1, 1, 0.25), single(1, 1, 0.5), 1, 0),
                    MalformedInput);
}

TEST_SUITE_END();
