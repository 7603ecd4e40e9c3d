#include "flatmaj/entropies.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flatmaj/errors.hpp"

namespace flatmaj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_family_point(double alpha, double z) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw MalformedInput("alpha must lie in [0, 1]");
    }
    if (!(z >= std::max(alpha, 1.0 - alpha))) {
        throw MalformedInput("z must satisfy z >= max(alpha, 1 - alpha)");
    }
}

// Exponents of the common-support block terms:
// alpha*log p + (1-alpha)*log q + z*log F.
std::vector<double> log_terms(const FlatPair& pair, double alpha, double z) {
    std::vector<double> terms;
    terms.reserve(pair.blocks.size());
    for (const Block& b : pair.blocks) {
        if (!(b.p > 0.0 && b.q > 0.0)) continue;
        const double f = b.overlap.value_or(0.0);
        if (f <= 0.0) continue;
        double t = 0.0;
        if (alpha > 0.0) t += alpha * std::log(b.p);
        if (alpha < 1.0) t += (1.0 - alpha) * std::log(b.q);
        if (f < 1.0) t += z * std::log(f);
        terms.push_back(t);
    }
    return terms;
}

double log_sum_exp(const std::vector<double>& terms) {
    if (terms.empty()) return -kInf;
    const double m = *std::max_element(terms.begin(), terms.end());
    if (m == -kInf) return -kInf;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - m);
    return m + std::log(acc);
}

double tropical_max_overlap(const FlatPair& pair) {
    double best = 0.0;
    for (const Block& b : pair.blocks) {
        if (b.p > 0.0 && b.q > 0.0) best = std::max(best, b.overlap.value_or(0.0));
    }
    return best;
}

}  // namespace

ParamPoint ParamPoint::finite(double alpha, double z) {
    validate_family_point(alpha, z);
    ParamPoint pt;
    pt.alpha = alpha;
    pt.z = z;
    return pt;
}

ParamPoint ParamPoint::tropical() {
    ParamPoint pt;
    pt.alpha = 0.5;
    pt.z = kInf;
    return pt;
}

ParamPoint ParamPoint::experimental_point(double alpha, double z) {
    if (!(alpha == 0.0 || alpha == 1.0)) {
        throw MalformedInput("experimental points require alpha in {0, 1}");
    }
    if (!(z > 0.0) || z >= 1.0) {
        throw MalformedInput("experimental points require z in (0, 1)");
    }
    ParamPoint pt;
    pt.alpha = alpha;
    pt.z = z;
    pt.experimental = true;
    return pt;
}

ParamPoint CompactParam::to_point() const {
    if (!(alpha >= 0.0 && alpha <= 1.0 && w >= 0.0 && w <= 1.0)) {
        throw MalformedInput("compact coordinates must lie in [0, 1]^2");
    }
    if (w == 0.0) return ParamPoint::tropical();
    return ParamPoint::finite(alpha, std::max(alpha, 1.0 - alpha) / w);
}

CompactParam CompactParam::from_point(const ParamPoint& pt) {
    CompactParam c;
    c.alpha = pt.alpha;
    c.w = pt.is_tropical() ? 0.0 : std::max(pt.alpha, 1.0 - pt.alpha) / pt.z;
    return c;
}

double phi(const FlatPair& canonical_pair, const ParamPoint& pt) {
    if (canonical_pair.blocks.empty()) {
        throw MalformedInput("phi is undefined on the zero pair");
    }
    if (pt.is_tropical()) return tropical_max_overlap(canonical_pair);
    return std::exp(log_phi(canonical_pair, pt));
}

double log_phi(const FlatPair& canonical_pair, const ParamPoint& pt) {
    if (canonical_pair.blocks.empty()) {
        throw MalformedInput("phi is undefined on the zero pair");
    }
    if (pt.is_tropical()) {
        const double m = tropical_max_overlap(canonical_pair);
        return m > 0.0 ? std::log(m) : -kInf;
    }
    return log_sum_exp(log_terms(canonical_pair, pt.alpha, pt.z));
}

double d_hat(const FlatPair& canonical_pair, const ParamPoint& pt) {
    const double lp = log_phi(canonical_pair, pt);
    if (lp == -kInf) return kInf;
    if (pt.is_tropical()) return -lp;
    return -lp / (pt.z + 1.0);
}

double d_alphaz_dense(const Matrix& rho, const Matrix& sigma, double alpha, double z) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw MalformedInput("dense divergence requires alpha in (0, 1)");
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw MalformedInput("dense divergence requires finite z > 0");
    }
    if (!is_hermitian(rho) || !is_hermitian(sigma) || rho.rows() != sigma.rows()) {
        throw MalformedInput("dense divergence requires Hermitian matrices of equal dimension");
    }
    const Matrix s_half = psd_power(sigma, (1.0 - alpha) / (2.0 * z));
    const Matrix r_pow = psd_power(rho, alpha / z);
    const Matrix inner = hermitize(s_half * r_pow * s_half);

    Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    std::vector<double> terms;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double v = es.eigenvalues()(i);
        if (v > 1e-14) terms.push_back(z * std::log(v));
    }
    const double log_trace = log_sum_exp(terms);
    if (log_trace == -kInf) return kInf;
    return log_trace / (alpha - 1.0);
}

std::pair<double, double> trace_homomorphisms(const FlatPair& pair) {
    return trace_pair(pair);
}

}  // namespace flatmaj
