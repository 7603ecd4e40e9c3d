#include "flatmaj/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "flatmaj/errors.hpp"
#include "flatmaj/feasibility.hpp"
#include "flatmaj/jordan.hpp"

namespace flatmaj {

namespace {

constexpr double kDegenerate = 1e-14;
constexpr double kHuge = 1e30;
constexpr std::size_t kExcludedCap = 64;

bool is_unit_equivalent(const FlatPair& canonical) {
    for (const Block& blk : canonical.blocks) {
        if (!blk.classical_diagonal()) return false;
        if (std::abs(blk.p - blk.q) > 1e-12) return false;
    }
    return !canonical.blocks.empty();
}

}  // namespace

RateReport optimal_rate(const FlatPair& in, const FlatPair& out, const MinimizeOptions& opts) {
    const FlatPair cin = canonicalize(in);
    const FlatPair cout = canonicalize(out);
    require_convertibility_hypotheses(cin, cout);

    RateReport rep;
    if (is_unit_equivalent(cout)) {
        rep.unbounded = true;
        rep.rate = std::numeric_limits<double>::infinity();
        return rep;
    }

    std::mutex mu;
    auto ratio = [&](const CompactParam& c) {
        const ParamPoint pt = c.to_point();
        const double num = d_hat(cin, pt);
        const double den = d_hat(cout, pt);
        if (den < kDegenerate) {
            if (num < kDegenerate) {
                std::lock_guard<std::mutex> lock(mu);
                if (rep.excluded.size() < kExcludedCap)
                    rep.excluded.push_back({c, num, den});
                else
                    rep.excluded_truncated = true;
            }
            return kHuge;
        }
        return num / den;
    };
    const MinimizeResult mr = minimize_over_domain(ratio, opts);
    rep.stats = mr.stats;
    rep.argmin = mr.argmin;
    if (mr.value >= 0.5 * kHuge) {
        rep.unbounded = true;
        rep.rate = std::numeric_limits<double>::infinity();
    } else {
        rep.rate = mr.value;
    }
    std::sort(rep.excluded.begin(), rep.excluded.end(),
              [](const ExcludedPoint& a, const ExcludedPoint& b) {
                  return a.at.alpha != b.at.alpha ? a.at.alpha < b.at.alpha : a.at.w < b.at.w;
              });
    return rep;
}

CertifyReport certify_achievable(const FlatPair& in, const FlatPair& out, int num, int den,
                                 const CertifyOptions& opts) {
    if (num < 0 || den < 1) throw MalformedInput("rate must be num/den with num >= 0, den >= 1");
    const FlatPair cin = canonicalize(in);
    const FlatPair cout = canonicalize(out);

    CertifyReport rep;
    rep.rate = optimal_rate(cin, cout, opts.minimize);

    if (num == 0) {
        rep.outcome = CertifyOutcome::trivial;
        rep.n_found = 1;
        rep.m_found = 0;
        rep.channel = trace_and_prepare(Matrix::Identity(1, 1), realize_dense(cin).dim());
        rep.detail = "zero rate: trace and prepare the empty product";
        return rep;
    }

    const double r = static_cast<double>(num) / den;
    if (!rep.rate.unbounded) {
        if (r > rep.rate.rate + opts.rate_band) {
            rep.outcome = CertifyOutcome::refuted_by_rate;
            rep.detail = "requested rate exceeds the optimal rate";
            return rep;
        }
        if (r > rep.rate.rate - opts.rate_band) {
            rep.outcome = CertifyOutcome::inconclusive_band;
            rep.detail = "requested rate is within the numerical band of the optimal rate";
            return rep;
        }
    }

    for (int k = 1; static_cast<long>(k) * den <= opts.n_max; ++k) {
        const int n = k * den;
        const int m = k * num;
        FeasibilityProblem pr;
        try {
            pr = tensor_instance(cin, cout, n, m, opts.dimension_cap);
        } catch (const DimensionCapExceeded&) {
            rep.detail = "copy search stopped at the dimension cap";
            break;
        }
        pr.tolerance = opts.feas_tolerance;
        pr.max_iters = opts.feas_max_iters;
        const FeasibilityResult res = solve(pr);
        if (res.status == FeasStatus::feasible) {
            rep.outcome = CertifyOutcome::achieved;
            rep.n_found = n;
            rep.m_found = m;
            rep.channel = res.channel;
            return rep;
        }
    }
    rep.outcome = CertifyOutcome::not_found;
    if (rep.detail.empty()) rep.detail = "no channel witness within the copy cap";
    return rep;
}

}  // namespace flatmaj
