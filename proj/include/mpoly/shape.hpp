#pragma once

#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mpoly/errors.hpp"

namespace mpoly {

inline constexpr std::size_t kDefaultCoeffCap = 10'000'000;

inline std::size_t checked_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        throw ShapeTooLarge("coefficient count overflows the index range");
    return a * b;
}

// Degrees (n_1, ..., n_m), per-block domain dimensions (d_1, ..., d_m) and
// the codomain dimension k.  Block i contributes n_i argument slots; slots
// are numbered 0..N-1 in block order.
struct BlockShape {
    std::vector<std::size_t> degrees;
    std::vector<std::size_t> dims;
    std::size_t codomain_dim = 1;

    std::size_t block_count() const { return degrees.size(); }

    std::size_t total_degree() const {
        return std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
    }

    std::size_t block_of_slot(std::size_t slot) const {
        std::size_t i = 0;
        while (slot >= degrees[i]) slot -= degrees[i], ++i;
        return i;
    }

    // dims repeated per slot, length total_degree()
    std::vector<std::size_t> slot_dims() const {
        std::vector<std::size_t> out;
        out.reserve(total_degree());
        for (std::size_t i = 0; i < degrees.size(); ++i)
            out.insert(out.end(), degrees[i], dims[i]);
        return out;
    }

    std::size_t coeff_count() const {
        std::size_t n = codomain_dim;
        for (std::size_t i = 0; i < degrees.size(); ++i)
            for (std::size_t r = 0; r < degrees[i]; ++r) n = checked_mul(n, dims[i]);
        return n;
    }

    void validate(std::size_t coeff_cap = kDefaultCoeffCap) const {
        if (degrees.empty()) throw InvalidShape("shape needs at least one block");
        if (degrees.size() != dims.size())
            throw InvalidShape("degrees and dims must have equal length");
        for (std::size_t n : degrees)
            if (n == 0) throw InvalidShape("degrees must be positive");
        for (std::size_t d : dims)
            if (d == 0) throw InvalidShape("dims must be positive");
        if (codomain_dim == 0) throw InvalidShape("codomain dimension must be positive");
        std::size_t n = coeff_count();
        if (n > coeff_cap)
            throw ShapeTooLarge("coefficient count " + std::to_string(n) +
                                " exceeds cap " + std::to_string(coeff_cap));
    }

    bool operator==(const BlockShape& o) const {
        return degrees == o.degrees && dims == o.dims && codomain_dim == o.codomain_dim;
    }
};

// Flat layout of the coefficient array: slot indices vary row-major with
// slot 0 slowest, and the codomain coordinate varies fastest of all.
struct FlatLayout {
    std::vector<std::size_t> dims;     // per slot
    std::vector<std::size_t> strides;  // per slot
    std::size_t codomain_dim = 1;
    std::size_t size = 0;

    explicit FlatLayout(const BlockShape& shape)
        : dims(shape.slot_dims()), strides(dims.size()), codomain_dim(shape.codomain_dim) {
        std::size_t acc = codomain_dim;
        for (std::size_t s = dims.size(); s-- > 0;) {
            strides[s] = acc;
            acc = checked_mul(acc, dims[s]);
        }
        size = acc;
    }

    std::size_t flat(const std::vector<std::size_t>& idx, std::size_t coord) const {
        std::size_t f = coord;
        for (std::size_t s = 0; s < idx.size(); ++s) f += idx[s] * strides[s];
        return f;
    }

    void decode(std::size_t flat, std::vector<std::size_t>& idx, std::size_t& coord) const {
        idx.resize(dims.size());
        for (std::size_t s = 0; s < dims.size(); ++s) {
            idx[s] = flat / strides[s];
            flat -= idx[s] * strides[s];
        }
        coord = flat;
    }
};

}  // namespace mpoly
