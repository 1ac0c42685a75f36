#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/parallel.hpp"
#include "mpoly/polynomial.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/shape.hpp"
#include "mpoly/symmetry.hpp"

namespace mpoly {

// Domain blocks carry l_p norms, the codomain an l_q norm.
struct NormSpec {
    std::vector<double> domain_p;
    double codomain_q = 2.0;
};

inline void validate_norm_spec(const NormSpec& spec, const BlockShape& shape) {
    if (spec.domain_p.size() != shape.block_count())
        throw ArityMismatch("expected one domain exponent per block");
    for (double p : spec.domain_p)
        if (!is_norm_exponent(p)) throw Error("domain exponents must lie in [1, inf]");
    if (!is_norm_exponent(spec.codomain_q)) throw Error("codomain exponent must lie in [1, inf]");
}

inline std::vector<double> slot_exponents(const NormSpec& spec, const BlockShape& shape) {
    std::vector<double> out;
    out.reserve(shape.total_degree());
    for (std::size_t i = 0; i < shape.block_count(); ++i)
        out.insert(out.end(), shape.degrees[i], spec.domain_p[i]);
    return out;
}

struct NormReport {
    double lower = 0.0;
    double upper = kInf;
    std::vector<std::vector<double>> argmax;  // per slot or per block
    int restarts_used = 0;
    bool converged = false;
};

// Valid for every p >= 1: on the unit p-balls each |x_j| <= 1, so the value
// is dominated by the total codomain mass of the coefficients.
inline double coeff_upper_bound(const MultilinearMap& t, const NormSpec& spec) {
    validate_norm_spec(spec, t.shape);
    const std::size_t k = t.shape.codomain_dim;
    double sum = 0.0;
    std::vector<double> fiber(k);
    for (std::size_t f = 0; f < t.coeffs.size(); f += k) {
        for (std::size_t c = 0; c < k; ++c) fiber[c] = t.coeffs[f + c];
        sum += pnorm(fiber, spec.codomain_q);
    }
    return sum;
}

namespace detail {

struct AscentOutcome {
    double value = 0.0;
    bool converged = false;
};

inline constexpr int kMaxSweeps = 500;
inline constexpr double kSweepTol = 1e-12;
inline constexpr int kMaxHalvings = 40;

// Block-alternating maximization of ||T(x_1, ..., x_N)||_q over the unit
// p-spheres, with the codomain handled as one more linear coordinate: for
// fixed w in the dual ball each slot update solves its linear subproblem
// exactly, so the value never decreases.
inline AscentOutcome ascend_multilinear(const MultilinearMap& t, const std::vector<double>& slot_p,
                                        double q, std::vector<std::vector<double>>& slots) {
    const double qd = dual_exponent(q);
    std::vector<const std::vector<double>*> ptrs(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) ptrs[s] = &slots[s];
    std::vector<double> v = contract(t, ptrs);
    std::vector<double> w = dual_argmax(v, qd);
    double value = pnorm(v, q);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
            std::vector<double> g = contract(t, ptrs, s, &w);
            slots[s] = dual_argmax(g, slot_p[s]);
        }
        v = contract(t, ptrs);
        w = dual_argmax(v, qd);
        const double improved = pnorm(v, q);
        const bool done = improved - value <= kSweepTol * std::max(1.0, improved);
        value = std::max(value, improved);
        if (done) return {value, true};
    }
    return {value, false};
}

// Projected gradient ascent for ||P(x_1, ..., x_m)||_q over unit p-spheres:
// ascend the linearization at the current dual witness, retract to the
// spheres, and backtrack on the step until the true value improves.
inline AscentOutcome ascend_poly(const Multipolynomial& p, const std::vector<double>& block_p,
                                 double q, std::vector<std::vector<double>>& xs) {
    const BlockShape& shape = p.rep.shape;
    const std::size_t m = shape.block_count();
    const double qd = dual_exponent(q);
    auto slots = diagonal_slots(shape, xs);
    std::vector<std::vector<double>> ys(m);
    auto yslots = diagonal_slots(shape, ys);

    std::vector<double> v = contract(p.rep, slots);
    double value = pnorm(v, q);
    double step = 1.0;
    for (int it = 0; it < kMaxSweeps; ++it) {
        const std::vector<double> w = dual_argmax(v, qd);
        std::vector<std::vector<double>> grad(m);
        std::size_t slot = 0;
        for (std::size_t i = 0; i < m; ++i) {
            grad[i].assign(shape.dims[i], 0.0);
            for (std::size_t r = 0; r < shape.degrees[i]; ++r, ++slot) {
                const std::vector<double> g = contract(p.rep, slots, slot, &w);
                for (std::size_t a = 0; a < g.size(); ++a) grad[i][a] += g[a];
            }
        }
        bool improved = false;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
            for (std::size_t i = 0; i < m; ++i) {
                ys[i] = xs[i];
                for (std::size_t a = 0; a < ys[i].size(); ++a) ys[i][a] += step * grad[i][a];
                if (!normalize(ys[i], block_p[i])) ys[i] = xs[i];
            }
            const std::vector<double> nv = contract(p.rep, yslots);
            const double trial = pnorm(nv, q);
            if (trial > value) {
                const bool done = trial - value <= kSweepTol * std::max(1.0, trial);
                xs = ys;
                v = nv;
                value = trial;
                improved = true;
                step = std::min(step * 2.0, 1e3);
                if (done) return {value, true};
                break;
            }
        }
        if (!improved) return {value, true};  // no uphill step left at any scale
    }
    return {value, false};
}

struct Trial {
    double value = 0.0;
    std::vector<std::vector<double>> point;
    bool converged = false;
};

inline NormReport best_of(std::vector<Trial> trials, double upper) {
    NormReport report;
    report.upper = upper;
    report.restarts_used = static_cast<int>(trials.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < trials.size(); ++i)
        if (trials[i].value > trials[best].value) best = i;
    if (!trials.empty()) {
        report.lower = trials[best].value;
        report.argmax = std::move(trials[best].point);
        report.converged = trials[best].converged;
    }
    return report;
}

}  // namespace detail

// Lower estimate of the multilinear uniform norm from `restarts` random
// ascents (plus one ascent per warm start tuple, when given).  Deterministic
// in (seed, restarts); the thread count never changes the result.
inline NormReport multilinear_norm_lower(const MultilinearMap& t, const NormSpec& spec,
                                         int restarts = 32, std::uint64_t seed = 0,
                                         int threads = 1,
                                         const std::vector<std::vector<std::vector<double>>>* warm_starts = nullptr) {
    validate_norm_spec(spec, t.shape);
    const std::vector<double> slot_p = slot_exponents(spec, t.shape);
    const std::vector<std::size_t> dims = t.shape.slot_dims();
    const std::size_t extra = warm_starts ? warm_starts->size() : 0;
    if (restarts < 0 || restarts + extra < 1)
        throw Error("multilinear_norm_lower needs at least one start");
    if (warm_starts)
        for (const auto& tuple : *warm_starts) {
            if (tuple.size() != dims.size())
                throw ArityMismatch("warm start tuple has wrong slot count");
            for (std::size_t s = 0; s < dims.size(); ++s)
                if (tuple[s].size() != dims[s])
                    throw DimensionMismatch("warm start vector has wrong dimension");
        }
    const Rng base(seed);
    const std::size_t total = static_cast<std::size_t>(restarts) + extra;
    auto trials = parallel_map<detail::Trial>(total, threads, [&](std::size_t i) {
        std::vector<std::vector<double>> slots(dims.size());
        if (i < static_cast<std::size_t>(restarts)) {
            Rng rng = base.stream(i);
            for (std::size_t s = 0; s < dims.size(); ++s) {
                slots[s] = rng.uniform_vector(dims[s], -1.0, 1.0);
                if (!normalize(slots[s], slot_p[s])) slots[s][0] = 1.0;
            }
        } else {
            slots = (*warm_starts)[i - restarts];
            for (std::size_t s = 0; s < dims.size(); ++s)
                if (!normalize(slots[s], slot_p[s])) slots[s].assign(dims[s], 0.0), slots[s][0] = 1.0;
        }
        auto outcome = detail::ascend_multilinear(t, slot_p, spec.codomain_q, slots);
        return detail::Trial{outcome.value, std::move(slots), outcome.converged};
    });
    return detail::best_of(std::move(trials), coeff_upper_bound(t, spec));
}

// Same driver for the polynomial value on the diagonal; argmax holds one
// vector per block.
inline NormReport poly_norm_lower(const Multipolynomial& p, const NormSpec& spec,
                                  int restarts = 32, std::uint64_t seed = 0, int threads = 1,
                                  const std::vector<std::vector<std::vector<double>>>* warm_starts = nullptr) {
    const BlockShape& shape = p.rep.shape;
    validate_norm_spec(spec, shape);
    const std::size_t extra = warm_starts ? warm_starts->size() : 0;
    if (restarts < 0 || restarts + extra < 1) throw Error("poly_norm_lower needs at least one start");
    if (warm_starts)
        for (const auto& tuple : *warm_starts) {
            if (tuple.size() != shape.block_count())
                throw ArityMismatch("warm start tuple has wrong block count");
            for (std::size_t i = 0; i < tuple.size(); ++i)
                if (tuple[i].size() != shape.dims[i])
                    throw DimensionMismatch("warm start vector has wrong dimension");
        }
    const Rng base(seed);
    const std::size_t total = static_cast<std::size_t>(restarts) + extra;
    auto trials = parallel_map<detail::Trial>(total, threads, [&](std::size_t i) {
        std::vector<std::vector<double>> xs(shape.block_count());
        if (i < static_cast<std::size_t>(restarts)) {
            Rng rng = base.stream(i);
            for (std::size_t b = 0; b < xs.size(); ++b) {
                xs[b] = rng.uniform_vector(shape.dims[b], -1.0, 1.0);
                if (!normalize(xs[b], spec.domain_p[b])) xs[b][0] = 1.0;
            }
        } else {
            xs = (*warm_starts)[i - restarts];
            for (std::size_t b = 0; b < xs.size(); ++b)
                if (!normalize(xs[b], spec.domain_p[b])) xs[b].assign(shape.dims[b], 0.0), xs[b][0] = 1.0;
        }
        auto outcome = detail::ascend_poly(p, spec.domain_p, spec.codomain_q, xs);
        return detail::Trial{outcome.value, std::move(xs), outcome.converged};
    });
    return detail::best_of(std::move(trials), coeff_upper_bound(p.rep, spec));
}

// prod n_i^{n_i} / n_i!, the factor between the polynomial norm and the norm
// of its symmetric representative.
inline double chain_constant(const std::vector<std::size_t>& degrees) {
    double c = 1.0;
    for (std::size_t n : degrees)
        c *= std::pow(static_cast<double>(n), static_cast<double>(n)) / detail::factorial(n);
    return c;
}

struct ChainReport {
    NormReport poly_norm;   // estimate for the polynomial
    NormReport check_norm;  // estimate for its symmetric representative
    double constant = 1.0;
    double slack = 0.02;
    bool left_ok = false;
    bool right_ok = false;
};

// Estimates both sides of  ||P|| <= ||P_check|| <= C * ||P||  with matched
// seeding: the polynomial ascent is warm-started from per-block projections
// of the multilinear argmax, and the multilinear estimate always includes an
// ascent from the diagonal lift of the polynomial argmax.  The lift makes
// the left inequality hold by construction, up to rounding.
inline ChainReport norm_chain_report(const Multipolynomial& p, const NormSpec& spec,
                                     int restarts = 32, std::uint64_t seed = 0,
                                     double slack = 0.02, int threads = 1) {
    const BlockShape& shape = p.rep.shape;
    validate_norm_spec(spec, shape);
    const Multipolynomial pc = check(p);

    ChainReport report;
    report.constant = chain_constant(shape.degrees);
    report.slack = slack;
    report.check_norm = multilinear_norm_lower(pc.rep, spec, restarts, seed, threads);

    std::size_t max_degree = 0;
    for (std::size_t n : shape.degrees) max_degree = std::max(max_degree, n);
    std::vector<std::vector<std::vector<double>>> poly_warm;
    for (std::size_t j = 0; j < max_degree; ++j) {
        std::vector<std::vector<double>> tuple(shape.block_count());
        std::size_t offset = 0;
        for (std::size_t i = 0; i < shape.block_count(); ++i) {
            tuple[i] = report.check_norm.argmax[offset + (j % shape.degrees[i])];
            offset += shape.degrees[i];
        }
        poly_warm.push_back(std::move(tuple));
    }
    report.poly_norm = poly_norm_lower(p, spec, restarts, seed, threads, &poly_warm);

    std::vector<std::vector<std::vector<double>>> lift(1);
    for (std::size_t i = 0; i < shape.block_count(); ++i)
        lift[0].insert(lift[0].end(), shape.degrees[i], report.poly_norm.argmax[i]);
    NormReport lifted = multilinear_norm_lower(pc.rep, spec, 0, seed, threads, &lift);
    report.check_norm.restarts_used += lifted.restarts_used;
    if (lifted.lower > report.check_norm.lower) {
        report.check_norm.lower = lifted.lower;
        report.check_norm.argmax = lifted.argmax;
        report.check_norm.converged = lifted.converged;
    }

    report.left_ok = report.poly_norm.lower <= report.check_norm.lower * (1.0 + 1e-9);
    report.right_ok =
        report.check_norm.lower <= report.constant * report.poly_norm.lower * (1.0 + slack);
    return report;
}

struct NormBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t grid_points = 0;
    bool exact = false;  // no angular axes, so lower == upper
};

namespace detail {

inline std::size_t grid_steps(double h) {
    // covers [0, pi); anything on the circle is a sign flip away
    return static_cast<std::size_t>(std::ceil(3.14159265358979323846 / h));
}

inline Matrix tail_matrix(std::vector<double> buf, std::size_t rows) {
    Matrix m(rows, buf.size() / rows);
    m.a = std::move(buf);
    return m;
}

}  // namespace detail

// Rigorous two-sided bound for the Euclidean multilinear norm: the last slot
// (last two when the codomain is scalar) is maximized exactly through the
// largest singular value, remaining dimension-2 slots are swept over an
// angular grid of step h, dimension-1 slots are pinned by sign symmetry.
// The upper bound adds the Lipschitz slack of the grid, capped by the
// self-consistent bound G / (1 - a).
inline NormBracket grid_bracket_multilinear(const MultilinearMap& t, const NormSpec& spec,
                                            double h = 0.005) {
    validate_norm_spec(spec, t.shape);
    for (double p : spec.domain_p)
        if (p != 2.0) throw Error("grid bracketing covers the Euclidean case only");
    if (spec.codomain_q != 2.0) throw Error("grid bracketing covers the Euclidean case only");
    if (!(h > 0.0)) throw Error("grid step must be positive");

    const std::vector<std::size_t> dims = t.shape.slot_dims();
    const std::size_t nslots = dims.size();
    const std::size_t k = t.shape.codomain_dim;
    const std::size_t tail_begin = (k == 1 && nslots >= 2) ? nslots - 2 : nslots - 1;
    std::vector<bool> keep(nslots, false);
    for (std::size_t s = tail_begin; s < nslots; ++s) keep[s] = true;

    std::vector<std::size_t> angular;
    for (std::size_t s = 0; s < tail_begin; ++s) {
        if (dims[s] == 2)
            angular.push_back(s);
        else if (dims[s] != 1)
            throw Error("grid bracketing needs dimension <= 2 off the exact tail");
    }
    if (angular.size() > 2)
        throw BudgetExceeded("grid over " + std::to_string(angular.size()) +
                             " angular slots is beyond the budget");

    std::vector<std::vector<double>> slot_vecs(nslots);
    std::vector<const std::vector<double>*> ptrs(nslots);
    for (std::size_t s = 0; s < nslots; ++s) {
        slot_vecs[s].assign(dims[s], 0.0);
        slot_vecs[s][0] = 1.0;
        ptrs[s] = &slot_vecs[s];
    }

    const std::size_t steps = angular.empty() ? 1 : detail::grid_steps(h);
    std::size_t points = 1;
    for (std::size_t a = 0; a < angular.size(); ++a) points *= steps;

    double g = 0.0;
    std::vector<std::size_t> counter(angular.size(), 0);
    for (std::size_t pt = 0; pt < points; ++pt) {
        std::size_t rest = pt;
        for (std::size_t a = 0; a < angular.size(); ++a) {
            counter[a] = rest % steps;
            rest /= steps;
        }
        for (std::size_t a = 0; a < angular.size(); ++a) {
            const double theta = h * static_cast<double>(counter[a]);
            slot_vecs[angular[a]][0] = std::cos(theta);
            slot_vecs[angular[a]][1] = std::sin(theta);
        }
        std::vector<double> buf = detail::contract_keep(t, ptrs, keep);
        g = std::max(g, sigma_max(detail::tail_matrix(std::move(buf), dims[tail_begin])));
    }

    NormBracket bracket;
    bracket.lower = g;
    bracket.grid_points = points;
    bracket.exact = angular.empty();
    if (angular.empty()) {
        bracket.upper = g;
    } else {
        const double a = static_cast<double>(angular.size()) * h / 2.0;
        const double u = coeff_upper_bound(t, spec);
        bracket.upper = std::min(g + a * u, g / (1.0 - a));
    }
    return bracket;
}

// Polynomial counterpart on the diagonal: one angle per dimension-2 block,
// the last block handled exactly when it is linear (the one before too when
// the codomain is scalar).  rep_upper, when finite, must bound the uniform
// norm of p.rep; the Lipschitz slack scales with the degree of the swept
// blocks.
inline NormBracket grid_bracket_poly(const Multipolynomial& p, const NormSpec& spec,
                                     double h = 0.005, double rep_upper = kInf) {
    const BlockShape& shape = p.rep.shape;
    validate_norm_spec(spec, shape);
    for (double pe : spec.domain_p)
        if (pe != 2.0) throw Error("grid bracketing covers the Euclidean case only");
    if (spec.codomain_q != 2.0) throw Error("grid bracketing covers the Euclidean case only");
    if (!(h > 0.0)) throw Error("grid step must be positive");

    const std::size_t m = shape.block_count();
    const std::size_t k = shape.codomain_dim;
    std::size_t tail_block = m;
    if (shape.degrees[m - 1] == 1) {
        tail_block = m - 1;
        if (k == 1 && m >= 2 && shape.degrees[m - 2] == 1) tail_block = m - 2;
    }

    std::vector<std::size_t> angular;
    std::size_t angular_degree = 0;
    for (std::size_t i = 0; i < tail_block; ++i) {
        if (shape.dims[i] == 2) {
            angular.push_back(i);
            angular_degree += shape.degrees[i];
        } else if (shape.dims[i] != 1) {
            throw Error("grid bracketing needs dimension <= 2 off the exact tail");
        }
    }
    if (angular.size() > 2)
        throw BudgetExceeded("grid over " + std::to_string(angular.size()) +
                             " angular blocks is beyond the budget");

    std::vector<std::vector<double>> xs(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i].assign(shape.dims[i], 0.0);
        xs[i][0] = 1.0;
    }
    auto ptrs = detail::diagonal_slots(shape, xs);
    std::vector<bool> keep(shape.total_degree(), false);
    {
        std::size_t slot = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t r = 0; r < shape.degrees[i]; ++r, ++slot)
                if (i >= tail_block) keep[slot] = true;
    }

    const std::size_t steps = angular.empty() ? 1 : detail::grid_steps(h);
    std::size_t points = 1;
    for (std::size_t a = 0; a < angular.size(); ++a) points *= steps;

    const std::size_t first_tail_dim = tail_block < m ? shape.dims[tail_block] : 1;
    double g = 0.0;
    for (std::size_t pt = 0; pt < points; ++pt) {
        std::size_t rest = pt;
        for (std::size_t a = 0; a < angular.size(); ++a) {
            const double theta = h * static_cast<double>(rest % steps);
            rest /= steps;
            xs[angular[a]][0] = std::cos(theta);
            xs[angular[a]][1] = std::sin(theta);
        }
        std::vector<double> buf = detail::contract_keep(p.rep, ptrs, keep);
        const std::size_t rows = tail_block < m ? first_tail_dim : 1;
        g = std::max(g, sigma_max(detail::tail_matrix(std::move(buf), rows)));
    }

    NormBracket bracket;
    bracket.lower = g;
    bracket.grid_points = points;
    bracket.exact = angular.empty();
    if (angular.empty()) {
        bracket.upper = g;
    } else {
        const double a = static_cast<double>(angular_degree) * h / 2.0;
        const double mbound = std::min(coeff_upper_bound(p.rep, spec), rep_upper);
        bracket.upper = g + a * mbound;
    }
    return bracket;
}

}  // namespace mpoly
