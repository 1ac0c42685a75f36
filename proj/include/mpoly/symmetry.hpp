#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/shape.hpp"

namespace mpoly {

inline constexpr std::size_t kDefaultGroupCap = 1'000'000;
inline constexpr std::size_t kDefaultPolarizationBudget = 30;

namespace detail {

inline double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

// Smallest flat index in the orbit of `idx` under within-block permutations:
// sort the slot indices of every block, keep the codomain coordinate.
inline std::size_t canonical_flat(const BlockShape& shape, const FlatLayout& layout,
                                  std::vector<std::size_t>& idx, std::size_t coord) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        std::sort(idx.begin() + s, idx.begin() + s + shape.degrees[i]);
        s += shape.degrees[i];
    }
    return layout.flat(idx, coord);
}

struct KahanAcc {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// 1 / (2^N * n_1! * ... * n_m!)
inline double polarization_constant(const std::vector<std::size_t>& degrees) {
    std::size_t n_total = 0;
    double denom = 1.0;
    for (std::size_t n : degrees) {
        n_total += n;
        denom *= detail::factorial(n);
    }
    return 1.0 / (std::ldexp(1.0, static_cast<int>(n_total)) * denom);
}

// Largest |difference| within one within-block permutation orbit, maximized
// over all orbits.  Zero for block-symmetric tensors.
inline double block_asymmetry(const MultilinearMap& t) {
    const FlatLayout layout(t.shape);
    const std::size_t size = t.coeffs.size();
    std::vector<double> lo(size, 0.0), hi(size, 0.0);
    std::vector<bool> seen(size, false);
    std::vector<std::size_t> idx;
    std::size_t coord = 0;
    for (std::size_t f = 0; f < size; ++f) {
        layout.decode(f, idx, coord);
        const std::size_t c = detail::canonical_flat(t.shape, layout, idx, coord);
        if (!seen[c]) {
            seen[c] = true;
            lo[c] = hi[c] = t.coeffs[f];
        } else {
            lo[c] = std::min(lo[c], t.coeffs[f]);
            hi[c] = std::max(hi[c], t.coeffs[f]);
        }
    }
    double worst = 0.0;
    for (std::size_t f = 0; f < size; ++f)
        if (seen[f]) worst = std::max(worst, hi[f] - lo[f]);
    return worst;
}

inline bool is_block_symmetric(const MultilinearMap& t, double tol = 1e-12) {
    return block_asymmetry(t) <= tol;
}

// Same test with all slots in a single orbit; needs equal block dimensions.
inline bool is_fully_symmetric(const MultilinearMap& t, double tol = 1e-12) {
    for (std::size_t d : t.shape.dims)
        if (d != t.shape.dims[0])
            throw HeterogeneousBlocks("full symmetry needs equal block dimensions");
    BlockShape merged;
    merged.degrees = {t.shape.total_degree()};
    merged.dims = {t.shape.dims[0]};
    merged.codomain_dim = t.shape.codomain_dim;
    MultilinearMap view{merged, t.coeffs};
    return block_asymmetry(view) <= tol;
}

// Orbit averaging: every coefficient becomes the mean of its orbit.  Runs in
// one pass over the tensor regardless of the group order.
inline MultilinearMap block_symmetrize(const MultilinearMap& t) {
    const FlatLayout layout(t.shape);
    const std::size_t size = t.coeffs.size();
    std::vector<detail::KahanAcc> acc(size);
    std::vector<std::size_t> count(size, 0);
    std::vector<std::size_t> canon(size);
    std::vector<std::size_t> idx;
    std::size_t coord = 0;
    for (std::size_t f = 0; f < size; ++f) {
        layout.decode(f, idx, coord);
        const std::size_t c = detail::canonical_flat(t.shape, layout, idx, coord);
        canon[f] = c;
        acc[c].add(t.coeffs[f]);
        ++count[c];
    }
    MultilinearMap out = zero_like(t.shape);
    for (std::size_t f = 0; f < size; ++f) {
        const std::size_t c = canon[f];
        out.coeffs[f] = acc[c].sum / static_cast<double>(count[c]);
    }
    return out;
}

// Reference path: explicit average over the full within-block permutation
// group.  Cost is |group| passes; refuses groups beyond the cap.
inline MultilinearMap block_symmetrize_group_sum(const MultilinearMap& t,
                                                 std::size_t group_cap = kDefaultGroupCap) {
    const BlockShape& shape = t.shape;
    double order_d = 1.0;
    for (std::size_t n : shape.degrees) order_d *= detail::factorial(n);
    if (order_d > static_cast<double>(group_cap))
        throw GroupTooLarge("permutation group order exceeds cap " + std::to_string(group_cap));

    std::vector<std::vector<std::vector<std::size_t>>> block_perms(shape.block_count());
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        std::vector<std::size_t> p(shape.degrees[i]);
        for (std::size_t q = 0; q < p.size(); ++q) p[q] = q;
        do {
            block_perms[i].push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }

    const std::size_t size = t.coeffs.size();
    std::vector<detail::KahanAcc> acc(size);
    std::vector<std::size_t> pick(shape.block_count(), 0);
    std::size_t order = 0;
    for (;;) {
        std::vector<std::vector<std::size_t>> perms(shape.block_count());
        for (std::size_t i = 0; i < perms.size(); ++i) perms[i] = block_perms[i][pick[i]];
        MultilinearMap permuted = permute_arguments(t, perms);
        for (std::size_t f = 0; f < size; ++f) acc[f].add(permuted.coeffs[f]);
        ++order;
        std::size_t i = shape.block_count();
        while (i-- > 0) {
            if (++pick[i] < block_perms[i].size()) break;
            pick[i] = 0;
            if (i == 0) {
                MultilinearMap out = zero_like(shape);
                for (std::size_t f = 0; f < size; ++f)
                    out.coeffs[f] = acc[f].sum / static_cast<double>(order);
                return out;
            }
        }
    }
}

using BlockEvaluator = std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

// Recovers the value of the block-symmetric representative from point
// evaluations alone: an alternating-sign sum over 2^N shifted arguments,
// scaled by polarization_constant.  The result does not depend on the base
// points.  Cost 2^N evaluations, so N is capped.
inline std::vector<double> polarize(const BlockEvaluator& eval, const BlockShape& shape,
                                    const std::vector<std::vector<double>>& base,
                                    const BlockArgs& args,
                                    std::size_t budget_cap = kDefaultPolarizationBudget) {
    shape.validate();
    const std::size_t m = shape.block_count();
    const std::size_t n_total = shape.total_degree();
    if (n_total > budget_cap)
        throw BudgetExceeded("polarization needs 2^" + std::to_string(n_total) +
                             " evaluations, cap is 2^" + std::to_string(budget_cap));
    if (base.size() != m || args.size() != m)
        throw ArityMismatch("polarize wants one base point and one argument list per block");
    for (std::size_t i = 0; i < m; ++i) {
        if (base[i].size() != shape.dims[i])
            throw DimensionMismatch("base point " + std::to_string(i) + " has wrong dimension");
        if (args[i].size() != shape.degrees[i])
            throw ArityMismatch("block " + std::to_string(i) + " wants " +
                                std::to_string(shape.degrees[i]) + " argument vectors");
        for (const auto& v : args[i])
            if (v.size() != shape.dims[i])
                throw DimensionMismatch("argument in block " + std::to_string(i) +
                                        " has wrong dimension");
    }

    std::vector<PairwiseSum> acc(shape.codomain_dim);
    std::vector<std::vector<double>> point(m);
    for (std::size_t bits = 0; bits < (std::size_t{1} << n_total); ++bits) {
        std::size_t slot = 0;
        int parity = 0;
        for (std::size_t i = 0; i < m; ++i) {
            point[i] = base[i];
            for (std::size_t q = 0; q < shape.degrees[i]; ++q, ++slot) {
                const bool neg = (bits >> slot) & 1;
                parity ^= neg;
                const double sign = neg ? -1.0 : 1.0;
                for (std::size_t a = 0; a < shape.dims[i]; ++a)
                    point[i][a] += sign * args[i][q][a];
            }
        }
        std::vector<double> val = eval(point);
        if (val.size() != shape.codomain_dim)
            throw DimensionMismatch("evaluator returned wrong codomain dimension");
        const double sign = parity ? -1.0 : 1.0;
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c].add(sign * val[c]);
    }
    const double scale = polarization_constant(shape.degrees);
    std::vector<double> out(shape.codomain_dim);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = scale * acc[c].total();
    return out;
}

}  // namespace mpoly
