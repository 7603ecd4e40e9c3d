#pragma once

#include <limits>
#include <utility>

#include "flatmaj/dense.hpp"
#include "flatmaj/flatpair.hpp"

namespace flatmaj {

// A point of the divergence family: alpha in [0,1] with z >= max(alpha, 1-alpha),
// or the tropical functional (z infinite). Points flagged experimental lie
// outside the validated family (alpha in {0,1} with smaller z) and are never
// enumerated by verdict or rate minimizers.
struct ParamPoint {
    double alpha = 0.5;
    double z = 1.0;
    bool experimental = false;

    static ParamPoint finite(double alpha, double z);
    static ParamPoint tropical();
    static ParamPoint experimental_point(double alpha, double z);

    bool is_tropical() const { return z == std::numeric_limits<double>::infinity(); }
};

// Compactified coordinates (alpha, w) in [0,1]^2 with w = max(alpha,1-alpha)/z;
// w = 0 is the tropical point, w = 1 the smallest admissible z.
struct CompactParam {
    double alpha = 0.5;
    double w = 1.0;

    ParamPoint to_point() const;
    static CompactParam from_point(const ParamPoint& pt);
};

// Block functional: sum over blocks with both weights positive of
// p^alpha q^(1-alpha) F^z; at the tropical point, the maximum F over such
// blocks. Zero when no block has weight on both sides. Throws on the zero
// pair. Underflows to 0 for large z; use log_phi for stable evaluation.
double phi(const FlatPair& canonical_pair, const ParamPoint& pt);

// log(phi), evaluated in the log domain (stable for z up to 1e6 and beyond).
// -infinity when phi vanishes.
double log_phi(const FlatPair& canonical_pair, const ParamPoint& pt);

// Divergence of the pair: -log_phi / (z + 1) at finite points, -log(max F)
// at the tropical point. +infinity when phi vanishes (no common support).
// Throws on the zero pair.
double d_hat(const FlatPair& canonical_pair, const ParamPoint& pt);

// Dense-matrix divergence (1/(alpha-1)) log Tr[(sigma^((1-alpha)/2z) rho^(alpha/z)
// sigma^((1-alpha)/2z))^z] for unit-trace PSD matrices, alpha in (0,1), z > 0.
// Evaluated through eigenvalues in the log domain. +infinity when the trace
// term vanishes (disjoint supports).
double d_alphaz_dense(const Matrix& rho, const Matrix& sigma, double alpha, double z);

// The two degenerate homomorphisms (sum of p, sum of q).
std::pair<double, double> trace_homomorphisms(const FlatPair& pair);

}  // namespace flatmaj
