#include "flatmaj/flatpair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatmaj/errors.hpp"

namespace flatmaj {

namespace {

double sort_key_overlap(const Block& b) {
    return b.overlap ? *b.overlap : std::numeric_limits<double>::infinity();
}

bool block_less(const Block& lhs, const Block& rhs) {
    if (lhs.p != rhs.p) return lhs.p < rhs.p;
    if (lhs.q != rhs.q) return lhs.q < rhs.q;
    return sort_key_overlap(lhs) < sort_key_overlap(rhs);
}

}  // namespace

bool FlatPair::is_normalized(double tol) const {
    auto [ta, tb] = trace_pair(*this);
    return std::abs(ta - 1.0) <= tol && std::abs(tb - 1.0) <= tol;
}

bool FlatPair::is_minimal_restrictions() const {
    if (blocks.empty()) return true;
    bool all_zero = true;
    for (const Block& b : blocks) {
        if (b.p > tolerance::kWeightFloor || b.q > tolerance::kWeightFloor) all_zero = false;
        if (b.p > tolerance::kWeightFloor && b.q > tolerance::kWeightFloor && b.overlap &&
            *b.overlap > tolerance::kOverlapSnap) {
            return true;
        }
    }
    return all_zero;
}

FlatPair canonicalize(const FlatPair& pair) {
    FlatPair out;
    out.label = pair.label;
    out.blocks.reserve(pair.blocks.size());
    for (const Block& b : pair.blocks) {
        if (b.p < 0.0 || b.q < 0.0 || !std::isfinite(b.p) || !std::isfinite(b.q)) {
            throw MalformedInput("block weights must be finite and nonnegative");
        }
        if (b.overlap && (*b.overlap < -tolerance::kOverlapSnap ||
                          *b.overlap > 1.0 + tolerance::kOverlapSnap ||
                          !std::isfinite(*b.overlap))) {
            throw MalformedInput("block overlap must lie in [0, 1]");
        }
        const double p = b.p > tolerance::kWeightFloor ? b.p : 0.0;
        const double q = b.q > tolerance::kWeightFloor ? b.q : 0.0;
        if (p == 0.0 && q == 0.0) continue;
        if (p == 0.0) {
            out.blocks.emplace_back(0.0, q);
            continue;
        }
        if (q == 0.0) {
            out.blocks.emplace_back(p, 0.0);
            continue;
        }
        if (!b.overlap) {
            throw MalformedInput("block with weight on both sides requires an overlap value");
        }
        const double f = *b.overlap;
        if (f <= tolerance::kOverlapSnap) {
            // Orthogonal components: the block is two disjoint classical rows.
            out.blocks.emplace_back(p, 0.0);
            out.blocks.emplace_back(0.0, q);
        } else if (f >= 1.0 - tolerance::kOverlapSnap) {
            out.blocks.emplace_back(p, q, 1.0);
        } else {
            out.blocks.emplace_back(p, q, f);
        }
    }
    std::sort(out.blocks.begin(), out.blocks.end(), block_less);
    return out;
}

FlatPair direct_sum(const FlatPair& a, const FlatPair& b) {
    FlatPair out;
    out.blocks = a.blocks;
    out.blocks.insert(out.blocks.end(), b.blocks.begin(), b.blocks.end());
    return out;
}

FlatPair tensor(const FlatPair& a, const FlatPair& b) {
    FlatPair out;
    out.blocks.reserve(a.blocks.size() * b.blocks.size());
    for (const Block& x : a.blocks) {
        for (const Block& y : b.blocks) {
            Block prod;
            prod.p = x.p * y.p;
            prod.q = x.q * y.q;
            if (prod.p > 0.0 && prod.q > 0.0) {
                if (!x.overlap || !y.overlap) {
                    throw MalformedInput(
                        "tensor factor with weight on both sides lacks an overlap value");
                }
                prod.overlap = *x.overlap * *y.overlap;
            }
            out.blocks.push_back(prod);
        }
    }
    return out;
}

FlatPair tensor_power(const FlatPair& a, int n) {
    if (n < 0) throw MalformedInput("tensor power requires n >= 0");
    FlatPair out = unit_pair();
    for (int i = 0; i < n; ++i) out = tensor(out, a);
    return out;
}

FlatPair unit_pair() {
    FlatPair out;
    out.blocks.emplace_back(1.0, 1.0, 1.0);
    return out;
}

PairClass classify(const FlatPair& canonical_pair) {
    PairClass c;
    const auto& blocks = canonical_pair.blocks;
    c.is_zero = blocks.empty();
    if (c.is_zero) return c;

    bool any_one_sided_a = false;
    bool any_one_sided_b = false;
    bool any_both = false;
    bool any_overlap = false;
    bool any_aligned = false;
    bool all_classical = true;
    bool all_commuting = true;
    for (const Block& b : blocks) {
        const bool both = b.p > 0.0 && b.q > 0.0;
        if (b.p > 0.0 && b.q == 0.0) any_one_sided_a = true;
        if (b.q > 0.0 && b.p == 0.0) any_one_sided_b = true;
        if (!both) continue;
        any_both = true;
        const double f = b.overlap.value_or(0.0);
        if (f > tolerance::kOverlapSnap) any_overlap = true;
        if (f >= 1.0 - tolerance::kOverlapSnap) {
            any_aligned = true;
        } else {
            all_classical = false;
            if (f > tolerance::kOverlapSnap) all_commuting = false;
        }
    }
    c.has_some_overlap = any_overlap;
    c.everywhere_overlapping = !any_one_sided_a && !any_one_sided_b && any_both;
    c.satisfies_pu1 = !any_aligned;
    c.satisfies_pu2 = any_one_sided_a && any_one_sided_b;
    c.is_classical = all_classical;
    c.states_commute = all_commuting;
    return c;
}

std::pair<double, double> trace_pair(const FlatPair& pair) {
    double ta = 0.0;
    double tb = 0.0;
    for (const Block& b : pair.blocks) {
        ta += b.p;
        tb += b.q;
    }
    return {ta, tb};
}

bool approx_equal(const FlatPair& a, const FlatPair& b, double tol) {
    const FlatPair ca = canonicalize(a);
    const FlatPair cb = canonicalize(b);
    if (ca.blocks.size() != cb.blocks.size()) return false;
    // Greedy multiset matching: canonical sorting may permute blocks that
    // differ by less than tol, so positional comparison would be too strict.
    std::vector<bool> used(cb.blocks.size(), false);
    auto matches = [tol](const Block& x, const Block& y) {
        if (std::abs(x.p - y.p) > tol || std::abs(x.q - y.q) > tol) return false;
        if (x.overlap.has_value() != y.overlap.has_value()) return false;
        return !x.overlap || std::abs(*x.overlap - *y.overlap) <= tol;
    };
    for (const Block& x : ca.blocks) {
        bool found = false;
        for (std::size_t j = 0; j < cb.blocks.size(); ++j) {
            if (!used[j] && matches(x, cb.blocks[j])) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace flatmaj
