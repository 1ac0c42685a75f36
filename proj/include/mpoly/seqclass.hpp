#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/rng.hpp"

namespace mpoly {

// The three implemented sequence classes.  LInf doubles as the c_0
// surrogate: on finite truncations the two norms coincide.
struct ClassKind {
    enum class Tag { Lp, WeakLp, LInf };
    Tag tag = Tag::Lp;
    double p = 2.0;

    static ClassKind lp(double p) { return {Tag::Lp, p}; }
    static ClassKind weak_lp(double p) { return {Tag::WeakLp, p}; }
    static ClassKind linf() { return {Tag::LInf, kInf}; }
};

inline void validate_class_kind(const ClassKind& kind) {
    if (kind.tag == ClassKind::Tag::LInf) return;
    if (!(kind.p >= 1.0) || !std::isfinite(kind.p))
        throw Error("class exponent must lie in [1, inf)");
}

namespace detail {

inline std::string format_double(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string class_kind_name(const ClassKind& kind) {
    switch (kind.tag) {
        case ClassKind::Tag::Lp: return "lp:" + detail::format_double(kind.p);
        case ClassKind::Tag::WeakLp: return "wlp:" + detail::format_double(kind.p);
        default: return "linf";
    }
}

inline ClassKind parse_class_kind(const std::string& name) {
    auto parse_p = [&](std::size_t offset) {
        const std::string body = name.substr(offset);
        try {
            std::size_t used = 0;
            const double p = std::stod(body, &used);
            if (used != body.size()) throw Error("");
            return p;
        } catch (const std::exception&) {
            throw Error("cannot parse class exponent in '" + name + "'");
        }
    };
    ClassKind kind;
    if (name == "linf") return ClassKind::linf();
    if (name.rfind("lp:", 0) == 0)
        kind = ClassKind::lp(parse_p(3));
    else if (name.rfind("wlp:", 0) == 0)
        kind = ClassKind::weak_lp(parse_p(4));
    else
        throw Error("unknown class kind '" + name + "' (want lp:<p>, wlp:<p> or linf)");
    validate_class_kind(kind);
    return kind;
}

// A finite truncation of an E-valued sequence, E = R^dim with the l_{space_p}
// norm.  Empty sequences are allowed and have norm 0.
struct FiniteSequence {
    std::size_t dim = 1;
    double space_p = 2.0;
    std::vector<std::vector<double>> entries;
};

inline void validate_sequence(const FiniteSequence& s) {
    if (s.dim == 0) throw InvalidShape("sequence space dimension must be positive");
    if (!is_norm_exponent(s.space_p)) throw Error("space exponent must lie in [1, inf]");
    for (const auto& e : s.entries) {
        if (e.size() != s.dim)
            throw DimensionMismatch("sequence entry has length " + std::to_string(e.size()) +
                                    ", space dimension is " + std::to_string(s.dim));
        for (double v : e)
            if (!std::isfinite(v)) throw NonFiniteCoefficient("sequence entries must be finite");
    }
}

inline FiniteSequence scalar_sequence(std::vector<double> values, double space_p = 2.0) {
    FiniteSequence s;
    s.dim = 1;
    s.space_p = space_p;
    s.entries.reserve(values.size());
    for (double v : values) s.entries.push_back({v});
    return s;
}

inline FiniteSequence random_sequence(Rng& rng, std::size_t dim, std::size_t len,
                                      double space_p = 2.0, double amplitude = 1.0) {
    FiniteSequence s;
    s.dim = dim;
    s.space_p = space_p;
    s.entries.reserve(len);
    for (std::size_t j = 0; j < len; ++j)
        s.entries.push_back(rng.uniform_vector(dim, -amplitude, amplitude));
    return s;
}

struct SeqNorm {
    double value = 0.0;
    bool estimated = false;
};

namespace detail {

inline std::vector<double> entry_norms(const FiniteSequence& s) {
    std::vector<double> out(s.entries.size());
    for (std::size_t j = 0; j < s.entries.size(); ++j) out[j] = pnorm(s.entries[j], s.space_p);
    return out;
}

// sup over the dual unit ball of the l_p norm of (<phi, x_j>)_j.  Exact for
// scalars and for the Euclidean (2,2) case; otherwise a multi-start
// projected ascent over the dual sphere, reported as an estimate.  The
// per-entry dual maximizers are always among the starts, so the estimate
// dominates the sup norm of the sequence.
inline SeqNorm weak_norm(const FiniteSequence& s, double p, int restarts = 16) {
    const std::size_t n = s.entries.size();
    const std::size_t d = s.dim;
    if (n == 0) return {0.0, false};
    if (d == 1) {
        std::vector<double> scalars(n);
        for (std::size_t j = 0; j < n; ++j) scalars[j] = s.entries[j][0];
        return {pnorm(scalars, p), false};
    }
    if (s.space_p == 2.0 && p == 2.0) {
        Matrix x(n, d);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t a = 0; a < d; ++a) x.at(j, a) = s.entries[j][a];
        return {sigma_max(x), false};
    }

    const double pd = dual_exponent(s.space_p);
    std::vector<std::vector<double>> seeds;
    for (std::size_t j = 0; j < n; ++j) seeds.push_back(dual_argmax(s.entries[j], pd));
    if (pd == kInf && d <= 10) {
        for (std::size_t bits = 0; bits < (std::size_t{1} << d); ++bits) {
            std::vector<double> phi(d);
            for (std::size_t a = 0; a < d; ++a) phi[a] = (bits >> a) & 1 ? -1.0 : 1.0;
            seeds.push_back(std::move(phi));
        }
    }
    Rng rng(0x77656b6e6f726dULL);  // fixed key: the estimate is a pure function
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> phi = rng.uniform_vector(d, -1.0, 1.0);
        if (!normalize(phi, pd)) phi[0] = 1.0;
        seeds.push_back(std::move(phi));
    }

    auto objective = [&](const std::vector<double>& phi) {
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = dot(s.entries[j], phi);
        return pnorm(v, p);
    };
    double best = 0.0;
    for (auto& phi : seeds) {
        if (!normalize(phi, pd)) continue;
        double value = objective(phi);
        double step = 1.0;
        for (int it = 0; it < 200; ++it) {
            std::vector<double> v(n);
            for (std::size_t j = 0; j < n; ++j) v[j] = dot(s.entries[j], phi);
            const double f = pnorm(v, p);
            if (f == 0.0) break;
            std::vector<double> grad(d, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (v[j] == 0.0) continue;
                const double u = std::pow(std::abs(v[j]) / f, p - 1.0) * (v[j] > 0.0 ? 1.0 : -1.0);
                for (std::size_t a = 0; a < d; ++a) grad[a] += u * s.entries[j][a];
            }
            bool improved = false;
            for (int halving = 0; halving <= 40; ++halving, step *= 0.5) {
                std::vector<double> cand = phi;
                for (std::size_t a = 0; a < d; ++a) cand[a] += step * grad[a];
                if (!normalize(cand, pd)) continue;
                const double trial = objective(cand);
                if (trial > value) {
                    const bool done = trial - value <= 1e-12 * std::max(1.0, trial);
                    phi = std::move(cand);
                    value = trial;
                    improved = true;
                    step = std::min(step * 2.0, 1e3);
                    if (done) it = 200;
                    break;
                }
            }
            if (!improved) break;
        }
        best = std::max(best, value);
    }
    return {best, true};
}

}  // namespace detail

inline SeqNorm seq_norm(const FiniteSequence& s, const ClassKind& kind) {
    validate_sequence(s);
    validate_class_kind(kind);
    switch (kind.tag) {
        case ClassKind::Tag::Lp:
            return {pnorm(detail::entry_norms(s), kind.p), false};
        case ClassKind::Tag::LInf:
            return {pnorm(detail::entry_norms(s), kInf), false};
        default:
            return detail::weak_norm(s, kind.p);
    }
}

struct ClassAxiomReport {
    bool pass = true;
    double worst_gap = 0.0;  // largest amount by which an axiom was missed
    std::vector<std::string> violations;
};

// The embedding axiom (the class norm dominates the sup norm) on every
// sample, plus the unit-vector axiom on scalar coordinate sequences.
inline ClassAxiomReport check_class_axioms(const ClassKind& kind,
                                           const std::vector<FiniteSequence>& samples,
                                           double tol = 1e-12) {
    if (samples.empty()) throw EmptySamples("check_class_axioms needs at least one sample");
    validate_class_kind(kind);
    ClassAxiomReport report;
    auto note = [&](double gap, const std::string& what) {
        report.pass = false;
        report.worst_gap = std::max(report.worst_gap, gap);
        report.violations.push_back(what);
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SeqNorm value = seq_norm(samples[i], kind);
        const SeqNorm sup = seq_norm(samples[i], ClassKind::linf());
        const double slack = tol * std::max(1.0, sup.value);
        if (value.value < sup.value - slack)
            note(sup.value - value.value,
                 "sample " + std::to_string(i) + ": class norm " +
                     detail::format_double(value.value) + " below sup norm " +
                     detail::format_double(sup.value));
    }
    for (std::size_t j = 0; j < 8; ++j) {
        FiniteSequence ej = scalar_sequence(std::vector<double>(j + 1, 0.0));
        ej.entries[j][0] = 1.0;
        const double value = seq_norm(ej, kind).value;
        if (value != 1.0)
            note(std::abs(value - 1.0), "scalar coordinate sequence e_" + std::to_string(j + 1) +
                                            " has norm " + detail::format_double(value));
    }
    return report;
}

// Truncation norms must grow monotonically to the full norm.
inline bool check_finitely_determined(const FiniteSequence& s, const ClassKind& kind,
                                      double tol = 1e-12) {
    validate_sequence(s);
    validate_class_kind(kind);
    const double full = seq_norm(s, kind).value;
    double prev = 0.0;
    FiniteSequence prefix{s.dim, s.space_p, {}};
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
        prefix.entries.push_back(s.entries[k]);
        const double value = seq_norm(prefix, kind).value;
        if (value < prev - tol * std::max(1.0, prev)) return false;
        prev = std::max(prev, value);
    }
    return std::abs(prev - full) <= tol * std::max(1.0, full);
}

struct StabilityReport {
    double op_norm = 0.0;
    bool op_norm_exact = false;
    double sup_ratio = 0.0;
    bool pass = true;
    bool any_estimated = false;
    std::vector<std::string> violations;
};

namespace detail {

// ||u||: exact for Euclidean-to-Euclidean and for one-dimensional domains,
// otherwise a seeded ascent estimate over the domain sphere.
inline std::pair<double, bool> operator_norm(const Matrix& u, double domain_p, double range_p) {
    if (u.rows == 0 || u.cols == 0) return {0.0, true};
    if (domain_p == 2.0 && range_p == 2.0) return {sigma_max(u), true};
    if (u.cols == 1) {
        std::vector<double> col(u.rows);
        for (std::size_t r = 0; r < u.rows; ++r) col[r] = u.at(r, 0);
        return {pnorm(col, range_p), true};
    }
    double best = 0.0;
    Rng rng(0x6f706e6f726dULL);
    std::vector<std::vector<double>> seeds;
    for (std::size_t c = 0; c < u.cols; ++c) {
        std::vector<double> e(u.cols, 0.0);
        e[c] = 1.0;
        seeds.push_back(std::move(e));
    }
    for (int r = 0; r < 16; ++r) seeds.push_back(rng.uniform_vector(u.cols, -1.0, 1.0));
    const double rd = dual_exponent(range_p);
    for (auto& x : seeds) {
        if (!normalize(x, domain_p)) continue;
        double value = pnorm(u.apply(x), range_p);
        double step = 1.0;
        for (int it = 0; it < 200; ++it) {
            const std::vector<double> y = u.apply(x);
            const std::vector<double> w = dual_argmax(y, rd);
            const std::vector<double> grad = u.apply_transposed(w);
            bool improved = false;
            for (int halving = 0; halving <= 40; ++halving, step *= 0.5) {
                std::vector<double> cand = x;
                for (std::size_t a = 0; a < cand.size(); ++a) cand[a] += step * grad[a];
                if (!normalize(cand, domain_p)) continue;
                const double trial = pnorm(u.apply(cand), range_p);
                if (trial > value) {
                    const bool done = trial - value <= 1e-12 * std::max(1.0, trial);
                    x = std::move(cand);
                    value = trial;
                    improved = true;
                    step = std::min(step * 2.0, 1e3);
                    if (done) it = 200;
                    break;
                }
            }
            if (!improved) break;
        }
        best = std::max(best, value);
    }
    return {best, false};
}

}  // namespace detail

// ||(u x_j)||_gamma <= ||u|| ||(x_j)||_gamma on the given sequence and on
// `trials` random ones; sup_ratio tracks how close the bound comes to being
// attained.
inline StabilityReport check_linear_stability(const Matrix& u, const FiniteSequence& s,
                                              const ClassKind& kind, int trials,
                                              std::uint64_t seed = 0,
                                              double range_space_p = std::numeric_limits<double>::quiet_NaN(),
                                              double tol = 1e-10) {
    validate_sequence(s);
    validate_class_kind(kind);
    if (u.cols != s.dim) throw DimensionMismatch("matrix wants domain dimension " +
                                                 std::to_string(u.cols));
    StabilityReport report;
    const double range_p = std::isnan(range_space_p) ? s.space_p : range_space_p;
    auto [norm, exact] = detail::operator_norm(u, s.space_p, range_p);
    report.op_norm = norm;
    report.op_norm_exact = exact;
    if (!exact) report.any_estimated = true;

    Rng rng(seed);
    for (int t = -1; t < trials; ++t) {
        FiniteSequence sample;
        if (t < 0) {
            sample = s;
        } else {
            Rng stream = rng.stream(static_cast<std::uint64_t>(t));
            sample = random_sequence(stream, s.dim, 1 + stream.below(8), s.space_p);
        }
        FiniteSequence image{u.rows, range_p, {}};
        image.entries.reserve(sample.entries.size());
        for (const auto& x : sample.entries) image.entries.push_back(u.apply(x));
        const SeqNorm before = seq_norm(sample, kind);
        const SeqNorm after = seq_norm(image, kind);
        report.any_estimated = report.any_estimated || before.estimated || after.estimated;
        if (before.value > 0.0)
            report.sup_ratio = std::max(report.sup_ratio, after.value / before.value);
        const double bound = report.op_norm * before.value;
        if (after.value > bound + tol * std::max(1.0, bound)) {
            report.pass = false;
            report.violations.push_back("trial " + std::to_string(t + 1) + ": image norm " +
                                        detail::format_double(after.value) + " exceeds " +
                                        detail::format_double(bound));
        }
    }
    return report;
}

struct HolderReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

// ||(prod_i lambda_j^(i))_j||_p <= prod_i ||lambda^(i)||_{p_i} whenever
// 1/p = sum_i 1/p_i.
inline HolderReport check_holder_product(const std::vector<std::vector<double>>& factors,
                                         const std::vector<double>& exponents, double p,
                                         double tol = 1e-12) {
    if (factors.empty()) throw EmptySamples("check_holder_product needs at least one factor");
    if (factors.size() != exponents.size())
        throw LengthMismatch("one exponent per factor sequence");
    for (double pi : exponents)
        if (!is_norm_exponent(pi)) throw Error("factor exponents must lie in [1, inf]");
    if (!is_norm_exponent(p)) throw Error("target exponent must lie in [1, inf]");
    const std::size_t len = factors[0].size();
    for (const auto& f : factors)
        if (f.size() != len) throw LengthMismatch("factor sequences must have equal length");

    auto inv = [](double q) { return q == kInf ? 0.0 : 1.0 / q; };
    double sum_inv = 0.0;
    for (double pi : exponents) sum_inv += inv(pi);
    if (std::abs(inv(p) - sum_inv) > 1e-12)
        throw ExponentMismatch("1/p must equal the sum of the 1/p_i");

    std::vector<double> product(len, 1.0);
    for (const auto& f : factors)
        for (std::size_t j = 0; j < len; ++j) product[j] *= f[j];

    HolderReport report;
    report.lhs = pnorm(product, p);
    report.rhs = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) report.rhs *= pnorm(factors[i], exponents[i]);
    report.pass = report.lhs <= report.rhs + tol * std::max(1.0, report.rhs);
    return report;
}

}  // namespace mpoly
