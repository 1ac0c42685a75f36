#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/shape.hpp"

namespace mpoly {

// args[i] holds the n_i vectors fed to block i
using BlockArgs = std::vector<std::vector<std::vector<double>>>;

inline constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

// Dense coefficient tensor of a multilinear map
// E_1^{n_1} x ... x E_m^{n_m} -> R^k in the flat layout of FlatLayout.
struct MultilinearMap {
    BlockShape shape;
    std::vector<double> coeffs;
};

inline MultilinearMap make_multilinear(BlockShape shape, std::vector<double> coeffs,
                                       std::size_t coeff_cap = kDefaultCoeffCap) {
    shape.validate(coeff_cap);
    if (coeffs.size() != shape.coeff_count())
        throw LengthMismatch("coefficient array has length " +
                             std::to_string(coeffs.size()) + ", shape wants " +
                             std::to_string(shape.coeff_count()));
    for (double c : coeffs)
        if (!std::isfinite(c)) throw NonFiniteCoefficient("coefficients must be finite");
    return MultilinearMap{std::move(shape), std::move(coeffs)};
}

inline MultilinearMap zero_like(const BlockShape& shape) {
    return MultilinearMap{shape, std::vector<double>(shape.coeff_count(), 0.0)};
}

inline MultilinearMap random_multilinear(const BlockShape& shape, Rng& rng,
                                         double lo = -1.0, double hi = 1.0) {
    shape.validate();
    return MultilinearMap{shape, rng.uniform_vector(shape.coeff_count(), lo, hi)};
}

namespace detail {

// Contracts slot axes with the given vectors, innermost first.  Axes whose
// keep flag is set stay open, in layout order.  When w is present the
// codomain axis is contracted with it before the slots.
inline std::vector<double> contract_keep(const MultilinearMap& t,
                                         const std::vector<const std::vector<double>*>& slots,
                                         const std::vector<bool>& keep,
                                         const std::vector<double>* w = nullptr) {
    const FlatLayout layout(t.shape);
    const std::size_t nslots = layout.dims.size();
    std::vector<double> buf;
    std::size_t tail;  // length of the kept axes right of the current one
    if (w != nullptr) {
        const std::size_t k = layout.codomain_dim;
        buf.resize(t.coeffs.size() / k);
        for (std::size_t r = 0; r < buf.size(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) s += t.coeffs[r * k + c] * (*w)[c];
            buf[r] = s;
        }
        tail = 1;
    } else {
        buf = t.coeffs;
        tail = layout.codomain_dim;
    }
    for (std::size_t s = nslots; s-- > 0;) {
        const std::size_t d = layout.dims[s];
        if (!keep.empty() && keep[s]) {
            tail *= d;
            continue;
        }
        const std::vector<double>& v = *slots[s];
        const std::size_t outer = buf.size() / (d * tail);
        std::vector<double> next(outer * tail);
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t src = o * d * tail;
            const std::size_t dst = o * tail;
            for (std::size_t tt = 0; tt < tail; ++tt) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += buf[src + j * tail + tt] * v[j];
                next[dst + tt] = acc;
            }
        }
        buf = std::move(next);
    }
    return buf;
}

inline std::vector<double> contract(const MultilinearMap& t,
                                    const std::vector<const std::vector<double>*>& slots,
                                    std::size_t skip = kNoSlot,
                                    const std::vector<double>* w = nullptr) {
    std::vector<bool> keep;
    if (skip != kNoSlot) {
        keep.assign(t.shape.total_degree(), false);
        keep[skip] = true;
    }
    return contract_keep(t, slots, keep, w);
}

inline void check_slot_vectors(const MultilinearMap& t,
                               const std::vector<const std::vector<double>*>& slots) {
    const std::vector<std::size_t> dims = t.shape.slot_dims();
    if (slots.size() != dims.size())
        throw ArityMismatch("expected " + std::to_string(dims.size()) + " slot vectors, got " +
                            std::to_string(slots.size()));
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (slots[s]->size() != dims[s])
            throw DimensionMismatch("slot " + std::to_string(s) + " wants dimension " +
                                    std::to_string(dims[s]) + ", got " +
                                    std::to_string(slots[s]->size()));
}

inline std::vector<const std::vector<double>*> slot_pointers(const MultilinearMap& t,
                                                             const BlockArgs& args) {
    if (args.size() != t.shape.block_count())
        throw ArityMismatch("expected " + std::to_string(t.shape.block_count()) +
                            " argument blocks, got " + std::to_string(args.size()));
    std::vector<const std::vector<double>*> slots;
    slots.reserve(t.shape.total_degree());
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].size() != t.shape.degrees[i])
            throw ArityMismatch("block " + std::to_string(i) + " wants " +
                                std::to_string(t.shape.degrees[i]) + " vectors, got " +
                                std::to_string(args[i].size()));
        for (const auto& v : args[i]) slots.push_back(&v);
    }
    return slots;
}

}  // namespace detail

// T applied to one vector per slot; result in R^k.
inline std::vector<double> eval_slots(const MultilinearMap& t,
                                      const std::vector<const std::vector<double>*>& slots) {
    detail::check_slot_vectors(t, slots);
    return detail::contract(t, slots);
}

inline std::vector<double> eval_slots(const MultilinearMap& t,
                                      const std::vector<std::vector<double>>& slots) {
    std::vector<const std::vector<double>*> ptrs(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) ptrs[s] = &slots[s];
    return eval_slots(t, ptrs);
}

inline std::vector<double> eval_multilinear(const MultilinearMap& t, const BlockArgs& args) {
    auto slots = detail::slot_pointers(t, args);
    detail::check_slot_vectors(t, slots);
    return detail::contract(t, slots);
}

// Gradient helper: fixes every slot except `slot` and contracts the codomain
// with w; the result is the vector g with <g, x> = <w, T(..., x at slot, ...)>.
inline std::vector<double> partial_gradient(const MultilinearMap& t,
                                            const std::vector<const std::vector<double>*>& slots,
                                            std::size_t slot, const std::vector<double>& w) {
    detail::check_slot_vectors(t, slots);
    return detail::contract(t, slots, slot, &w);
}

inline std::vector<double> partial_gradient(const MultilinearMap& t,
                                            const std::vector<std::vector<double>>& slots,
                                            std::size_t slot, const std::vector<double>& w) {
    std::vector<const std::vector<double>*> ptrs(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) ptrs[s] = &slots[s];
    return partial_gradient(t, ptrs, slot, w);
}

// T with the arguments of each block rearranged: block i position q reads the
// vector previously at position perms[i][q].
inline MultilinearMap permute_arguments(const MultilinearMap& t,
                                        const std::vector<std::vector<std::size_t>>& perms) {
    const BlockShape& shape = t.shape;
    if (perms.size() != shape.block_count())
        throw ArityMismatch("expected one permutation per block");
    std::vector<std::size_t> sigma;  // global slot map
    sigma.reserve(shape.total_degree());
    for (std::size_t i = 0; i < perms.size(); ++i) {
        const std::size_t n = shape.degrees[i];
        if (perms[i].size() != n)
            throw InvalidPermutation("block " + std::to_string(i) + " permutation has wrong length");
        std::vector<bool> seen(n, false);
        for (std::size_t v : perms[i]) {
            if (v >= n || seen[v])
                throw InvalidPermutation("block " + std::to_string(i) +
                                         " permutation is not a bijection");
            seen[v] = true;
        }
        const std::size_t offset = sigma.size();
        for (std::size_t q = 0; q < n; ++q) sigma.push_back(offset + perms[i][q]);
    }
    const FlatLayout layout(shape);
    MultilinearMap out = zero_like(shape);
    std::vector<std::size_t> knew, jold(sigma.size());
    std::size_t coord = 0;
    for (std::size_t f = 0; f < out.coeffs.size(); ++f) {
        layout.decode(f, knew, coord);
        for (std::size_t s = 0; s < sigma.size(); ++s) jold[s] = knew[sigma[s]];
        out.coeffs[f] = t.coeffs[layout.flat(jold, coord)];
    }
    return out;
}

namespace detail {

// One rectangular axis transform: out[o, b, t] = sum_a in[o, a, t] * w(a, b).
inline std::vector<double> transform_axis(const std::vector<double>& in, std::size_t in_dim,
                                          std::size_t out_dim, std::size_t tail,
                                          const Matrix& w) {
    const std::size_t outer = in.size() / (in_dim * tail);
    std::vector<double> out(outer * out_dim * tail, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t a = 0; a < in_dim; ++a)
            for (std::size_t b = 0; b < out_dim; ++b) {
                const double wab = w.at(a, b);
                if (wab == 0.0) continue;
                const std::size_t src = (o * in_dim + a) * tail;
                const std::size_t dst = (o * out_dim + b) * tail;
                for (std::size_t tt = 0; tt < tail; ++tt) out[dst + tt] += in[src + tt] * wab;
            }
    return out;
}

}  // namespace detail

// Coefficient tensor of (w, y_1, ..., y_N) -> tmat * T(u_{i(1)} y_1, ..., u_{i(N)} y_N):
// each u_i is d_i x g_i and tmat is k' x k.  Passing nullptr keeps an axis.
inline MultilinearMap transform_arguments(const MultilinearMap& t, const std::vector<const Matrix*>& us,
                                          const Matrix* tmat) {
    const BlockShape& shape = t.shape;
    if (us.size() != shape.block_count())
        throw ArityMismatch("expected one matrix per block");
    BlockShape new_shape = shape;
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (us[i] == nullptr) continue;
        if (us[i]->rows != shape.dims[i])
            throw DimensionMismatch("block " + std::to_string(i) + " matrix wants " +
                                    std::to_string(shape.dims[i]) + " rows");
        new_shape.dims[i] = us[i]->cols;
    }
    if (tmat != nullptr) {
        if (tmat->cols != shape.codomain_dim)
            throw DimensionMismatch("codomain matrix wants " +
                                    std::to_string(shape.codomain_dim) + " columns");
        new_shape.codomain_dim = tmat->rows;
    }
    new_shape.validate();

    std::vector<double> buf = t.coeffs;
    std::vector<std::size_t> cur_dims = shape.slot_dims();
    std::size_t cur_codomain = shape.codomain_dim;
    if (tmat != nullptr) {
        // out[c'] = sum_c tmat[c'][c] in[c], i.e. contract with the transpose
        Matrix wt(tmat->cols, tmat->rows);
        for (std::size_t r = 0; r < tmat->rows; ++r)
            for (std::size_t c = 0; c < tmat->cols; ++c) wt.at(c, r) = tmat->at(r, c);
        buf = detail::transform_axis(buf, cur_codomain, wt.cols, 1, wt);
        cur_codomain = wt.cols;
    }
    std::size_t slot = shape.total_degree();
    std::size_t tail = cur_codomain;
    for (std::size_t i = shape.block_count(); i-- > 0;) {
        for (std::size_t r = 0; r < shape.degrees[i]; ++r) {
            --slot;
            if (us[i] != nullptr) {
                buf = detail::transform_axis(buf, cur_dims[slot], us[i]->cols, tail, *us[i]);
                cur_dims[slot] = us[i]->cols;
            }
            tail *= cur_dims[slot];
        }
    }
    return MultilinearMap{std::move(new_shape), std::move(buf)};
}

inline double max_abs_coeff(const MultilinearMap& t) {
    double m = 0.0;
    for (double c : t.coeffs) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace mpoly
