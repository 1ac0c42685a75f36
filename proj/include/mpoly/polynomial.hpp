#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/symmetry.hpp"

namespace mpoly {

// A multipolynomial carried by a representative multilinear map: the value
// at (x_1, ..., x_m) is the representative evaluated with each x_i repeated
// along its block.  `canonical` records that rep is block-symmetric, i.e.
// the unique symmetric representative of the polynomial.
struct Multipolynomial {
    MultilinearMap rep;
    bool canonical = false;
};

namespace detail {

inline std::vector<const std::vector<double>*> diagonal_slots(
    const BlockShape& shape, const std::vector<std::vector<double>>& xs) {
    if (xs.size() != shape.block_count())
        throw ArityMismatch("expected " + std::to_string(shape.block_count()) +
                            " argument vectors, got " + std::to_string(xs.size()));
    std::vector<const std::vector<double>*> slots;
    slots.reserve(shape.total_degree());
    for (std::size_t i = 0; i < xs.size(); ++i)
        slots.insert(slots.end(), shape.degrees[i], &xs[i]);
    return slots;
}

}  // namespace detail

inline std::vector<double> eval_poly(const Multipolynomial& p,
                                     const std::vector<std::vector<double>>& xs) {
    auto slots = detail::diagonal_slots(p.rep.shape, xs);
    detail::check_slot_vectors(p.rep, slots);
    return detail::contract(p.rep, slots);
}

inline Multipolynomial hat(MultilinearMap t) {
    const bool symmetric = is_block_symmetric(t);
    return Multipolynomial{std::move(t), symmetric};
}

// The unique block-symmetric representative.
inline Multipolynomial check(const Multipolynomial& p) {
    if (p.canonical) return p;
    return Multipolynomial{block_symmetrize(p.rep), true};
}

inline BlockEvaluator poly_evaluator(const Multipolynomial& p) {
    return [p](const std::vector<std::vector<double>>& xs) { return eval_poly(p, xs); };
}

inline Multipolynomial id_multipolynomial(const std::vector<std::size_t>& degrees) {
    BlockShape shape;
    shape.degrees = degrees;
    shape.dims.assign(degrees.size(), 1);
    shape.codomain_dim = 1;
    shape.validate();
    return Multipolynomial{MultilinearMap{shape, {1.0}}, true};
}

struct BlackBoxOptions {
    std::size_t probes = 20;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::size_t coeff_cap = kDefaultCoeffCap;
    std::size_t budget_cap = kDefaultPolarizationBudget;
};

// Reconstructs the canonical representative of a black-box multipolynomial
// of the given shape: each orbit coefficient is recovered by polarizing at
// basis vectors, then the candidate is validated against the box on random
// probe points.  A box that is not a multipolynomial of this shape fails the
// probe check.
inline Multipolynomial from_black_box(const BlockEvaluator& eval, const BlockShape& shape,
                                      const BlackBoxOptions& opts = {}) {
    shape.validate(opts.coeff_cap);
    const FlatLayout layout(shape);
    const std::size_t m = shape.block_count();

    std::vector<std::vector<double>> zero_base(m);
    for (std::size_t i = 0; i < m; ++i) zero_base[i].assign(shape.dims[i], 0.0);

    MultilinearMap rep = zero_like(shape);
    std::vector<std::size_t> idx;
    std::size_t coord = 0;
    std::vector<std::size_t> scratch;
    for (std::size_t f = 0; f < rep.coeffs.size(); f += shape.codomain_dim) {
        layout.decode(f, idx, coord);
        scratch = idx;
        // the canonical index is the flat-smallest of its orbit, so it has
        // been filled by the time any other orbit member comes up
        const std::size_t canon = detail::canonical_flat(shape, layout, scratch, 0);
        if (canon != f) {
            for (std::size_t c = 0; c < shape.codomain_dim; ++c)
                rep.coeffs[f + c] = rep.coeffs[canon + c];
            continue;
        }
        BlockArgs basis(m);
        std::size_t slot = 0;
        for (std::size_t i = 0; i < m; ++i) {
            basis[i].resize(shape.degrees[i]);
            for (std::size_t q = 0; q < shape.degrees[i]; ++q, ++slot) {
                basis[i][q].assign(shape.dims[i], 0.0);
                basis[i][q][idx[slot]] = 1.0;
            }
        }
        std::vector<double> val;
        try {
            val = polarize(eval, shape, zero_base, basis, opts.budget_cap);
        } catch (const DimensionMismatch&) {
            throw ShapeMismatch("evaluator is incompatible with the requested shape");
        } catch (const ArityMismatch&) {
            throw ShapeMismatch("evaluator is incompatible with the requested shape");
        }
        for (std::size_t c = 0; c < shape.codomain_dim; ++c) rep.coeffs[f + c] = val[c];
    }

    Multipolynomial out{std::move(rep), true};
    Rng rng(opts.seed);
    Rng probe_rng = rng.stream(0x70726f6265ULL);
    for (std::size_t probe = 0; probe < opts.probes; ++probe) {
        std::vector<std::vector<double>> xs(m);
        for (std::size_t i = 0; i < m; ++i) xs[i] = probe_rng.uniform_vector(shape.dims[i], -1.0, 1.0);
        std::vector<double> expect;
        try {
            expect = eval(xs);
        } catch (const Error&) {
            throw ShapeMismatch("evaluator rejected a probe point of the requested shape");
        }
        if (expect.size() != shape.codomain_dim)
            throw ShapeMismatch("evaluator returned wrong codomain dimension");
        const std::vector<double> got = eval_poly(out, xs);
        double scale = 1.0;
        for (double v : expect) scale = std::max(scale, std::abs(v));
        for (std::size_t c = 0; c < shape.codomain_dim; ++c)
            if (std::abs(got[c] - expect[c]) > opts.tol * scale)
                throw NotAMultipolynomial("probe point disagrees with the reconstructed polynomial");
    }
    return out;
}

// t * P(u_1 y_1, ..., u_m y_m) for matrices t: R^k -> R^k' and u_i: R^{g_i} -> R^{d_i}.
inline Multipolynomial compose_poly(const Matrix& tmat, const Multipolynomial& p,
                                    const std::vector<Matrix>& us) {
    if (us.size() != p.rep.shape.block_count())
        throw ArityMismatch("expected one matrix per block");
    std::vector<const Matrix*> ptrs(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) ptrs[i] = &us[i];
    MultilinearMap rep = transform_arguments(p.rep, ptrs, &tmat);
    const bool symmetric = is_block_symmetric(rep);
    return Multipolynomial{std::move(rep), symmetric};
}

}  // namespace mpoly
