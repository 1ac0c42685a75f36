#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mpoly/mpoly.hpp"

using namespace mpoly;

namespace {

// reference evaluator: one pass over the flat coefficient array, no shared
// code with the contraction in eval_multilinear
std::vector<double> eval_reference(const MultilinearMap& t,
                                   const std::vector<std::vector<double>>& slots) {
    const FlatLayout layout(t.shape);
    std::vector<double> out(t.shape.codomain_dim, 0.0);
    for (std::size_t f = 0; f < t.coeffs.size(); ++f) {
        std::vector<std::size_t> idx;
        std::size_t coord = 0;
        layout.decode(f, idx, coord);
        double prod = t.coeffs[f];
        for (std::size_t s = 0; s < idx.size(); ++s) prod *= slots[s][idx[s]];
        out[coord] += prod;
    }
    return out;
}

std::vector<std::vector<double>> random_slots(const BlockShape& shape, Rng& rng) {
    std::vector<std::vector<double>> slots;
    for (std::size_t i = 0; i < shape.block_count(); ++i)
        for (std::size_t q = 0; q < shape.degrees[i]; ++q)
            slots.push_back(rng.uniform_vector(shape.dims[i], -1.0, 1.0));
    return slots;
}

BlockArgs slots_to_args(const BlockShape& shape, const std::vector<std::vector<double>>& slots) {
    BlockArgs args(shape.block_count());
    std::size_t s = 0;
    for (std::size_t i = 0; i < shape.block_count(); ++i)
        for (std::size_t q = 0; q < shape.degrees[i]; ++q) args[i].push_back(slots[s++]);
    return args;
}

}  // namespace

TEST_CASE("flat layout orders slot indices slowest-first and codomain fastest") {
    BlockShape shape;
    shape.degrees = {1, 1};
    shape.dims = {2, 3};
    shape.codomain_dim = 2;
    const FlatLayout layout(shape);
    REQUIRE(layout.size == 12);
    // flat = (i0*3 + i1)*2 + c
    CHECK(layout.flat({0, 0}, 0) == 0);
    CHECK(layout.flat({0, 0}, 1) == 1);
    CHECK(layout.flat({0, 1}, 0) == 2);
    CHECK(layout.flat({0, 2}, 1) == 5);
    CHECK(layout.flat({1, 0}, 0) == 6);
    CHECK(layout.flat({1, 2}, 1) == 11);
    for (std::size_t f = 0; f < layout.size; ++f) {
        std::vector<std::size_t> idx;
        std::size_t coord = 0;
        layout.decode(f, idx, coord);
        CHECK(layout.flat(idx, coord) == f);
    }
}

TEST_CASE("shape validation rejects malformed shapes") {
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    REQUIRE_NOTHROW(shape.validate());

    BlockShape zero_degree = shape;
    zero_degree.degrees = {0};
    CHECK_THROWS_AS(zero_degree.validate(), InvalidShape);

    BlockShape zero_dim = shape;
    zero_dim.dims = {0};
    CHECK_THROWS_AS(zero_dim.validate(), InvalidShape);

    BlockShape mismatched = shape;
    mismatched.dims = {2, 2};
    CHECK_THROWS_AS(mismatched.validate(), InvalidShape);

    BlockShape no_blocks;
    no_blocks.codomain_dim = 1;
    CHECK_THROWS_AS(no_blocks.validate(), InvalidShape);

    BlockShape huge;
    huge.degrees = {5};
    huge.dims = {100};
    huge.codomain_dim = 1;
    CHECK_THROWS_AS(huge.validate(), ShapeTooLarge);
}

TEST_CASE("coefficient vectors must match the shape and be finite") {
    BlockShape shape;
    shape.degrees = {1};
    shape.dims = {2};
    shape.codomain_dim = 1;
    CHECK_THROWS_AS(make_multilinear(shape, {1.0}), LengthMismatch);
    CHECK_THROWS_AS(make_multilinear(shape, {1.0, std::nan("")}), NonFiniteCoefficient);
    REQUIRE_NOTHROW(make_multilinear(shape, {1.0, 2.0}));
}

TEST_CASE("evaluation agrees with the one-pass reference on random tensors") {
    Rng root(11);
    for (int trial = 0; trial < 50; ++trial) {
        Rng rng = root.stream(trial);
        BlockShape shape;
        const std::size_t m = 1 + rng.below(3);
        for (std::size_t i = 0; i < m; ++i) {
            shape.degrees.push_back(1 + rng.below(3));
            shape.dims.push_back(1 + rng.below(3));
        }
        shape.codomain_dim = 1 + rng.below(2);
        const MultilinearMap t = random_multilinear(shape, rng);
        const auto slots = random_slots(shape, rng);
        const std::vector<double> got = eval_slots(t, slots);
        const std::vector<double> want = eval_reference(t, slots);
        for (std::size_t c = 0; c < want.size(); ++c)
            CHECK(got[c] == Catch::Approx(want[c]).margin(1e-12).epsilon(1e-12));
        const std::vector<double> via_args = eval_multilinear(t, slots_to_args(shape, slots));
        for (std::size_t c = 0; c < want.size(); ++c) CHECK(via_args[c] == got[c]);
    }
}

TEST_CASE("evaluation is linear in each argument slot") {
    Rng rng(13);
    BlockShape shape;
    shape.degrees = {2, 1};
    shape.dims = {3, 2};
    shape.codomain_dim = 2;
    const MultilinearMap t = random_multilinear(shape, rng);
    auto slots = random_slots(shape, rng);
    const double alpha = 0.7, beta = -1.3;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const std::vector<double> x = slots[s];
        const std::vector<double> y =
            rng.uniform_vector(x.size(), -1.0, 1.0);
        std::vector<double> combo(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) combo[a] = alpha * x[a] + beta * y[a];

        auto at = [&](const std::vector<double>& v) {
            auto tmp = slots;
            tmp[s] = v;
            return eval_slots(t, tmp);
        };
        const std::vector<double> lhs = at(combo);
        const std::vector<double> fx = at(x), fy = at(y);
        for (std::size_t c = 0; c < lhs.size(); ++c)
            CHECK(lhs[c] == Catch::Approx(alpha * fx[c] + beta * fy[c]).margin(1e-12));
    }
}

TEST_CASE("permuting the two slots of a bilinear block transposes coefficients") {
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    const MultilinearMap t = make_multilinear(shape, {1.0, 2.0, 3.0, 4.0});
    const MultilinearMap swapped = permute_arguments(t, {{1, 0}});
    const std::vector<double> want = {1.0, 3.0, 2.0, 4.0};
    REQUIRE(swapped.coeffs == want);

    // the permuted map evaluates with its slots exchanged
    const std::vector<double> x = {0.3, -0.9}, y = {1.1, 0.4};
    CHECK(eval_slots(swapped, {x, y})[0] == Catch::Approx(eval_slots(t, {y, x})[0]).margin(1e-15));

    CHECK_THROWS_AS(permute_arguments(t, {{0, 0}}), InvalidPermutation);
    CHECK_THROWS_AS(permute_arguments(t, {{0}}), InvalidPermutation);
}

TEST_CASE("the rank-one witness evaluates as the product of picked coordinates") {
    BlockShape shape;
    shape.degrees = {2, 2};
    shape.dims = {2, 2};
    shape.codomain_dim = 1;
    std::vector<double> coeffs(shape.coeff_count(), 0.0);
    coeffs[FlatLayout(shape).flat({0, 0, 1, 1}, 0)] = 1.0;
    const MultilinearMap t = make_multilinear(shape, coeffs);
    // value is x * z * b * d on ((x,y),(z,w),(a,b),(c,d))
    const std::vector<double> v =
        eval_slots(t, {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}});
    CHECK(v[0] == 144.0);
}

TEST_CASE("argument transforms match evaluating at mapped vectors") {
    Rng rng(17);
    BlockShape shape;
    shape.degrees = {1, 2};
    shape.dims = {3, 2};
    shape.codomain_dim = 2;
    const MultilinearMap t = random_multilinear(shape, rng);

    Matrix u0(3, 2);
    Matrix u1(2, 2);
    for (double& v : u0.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : u1.a) v = rng.uniform(-1.0, 1.0);
    Matrix tm(3, 2);
    for (double& v : tm.a) v = rng.uniform(-1.0, 1.0);

    const MultilinearMap mapped = transform_arguments(t, {&u0, &u1}, &tm);
    REQUIRE(mapped.shape.dims == std::vector<std::size_t>{2, 2});
    REQUIRE(mapped.shape.codomain_dim == 3);

    BlockArgs ys(2);
    ys[0] = {rng.uniform_vector(2, -1.0, 1.0)};
    ys[1] = {rng.uniform_vector(2, -1.0, 1.0), rng.uniform_vector(2, -1.0, 1.0)};
    BlockArgs mapped_args(2);
    for (std::size_t i = 0; i < 2; ++i) {
        const Matrix& u = i == 0 ? u0 : u1;
        for (const std::vector<double>& y : ys[i]) {
            std::vector<double> x(u.rows, 0.0);
            for (std::size_t r = 0; r < u.rows; ++r)
                for (std::size_t c = 0; c < u.cols; ++c) x[r] += u.at(r, c) * y[c];
            mapped_args[i].push_back(x);
        }
    }
    const std::vector<double> inner = eval_multilinear(t, mapped_args);
    std::vector<double> want(3, 0.0);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 2; ++c) want[r] += tm.at(r, c) * inner[c];
    const std::vector<double> got = eval_multilinear(mapped, ys);
    for (std::size_t c = 0; c < 3; ++c) CHECK(got[c] == Catch::Approx(want[c]).margin(1e-12));
}

TEST_CASE("partial gradients satisfy the pairing identity") {
    Rng rng(19);
    BlockShape shape;
    shape.degrees = {2, 1};
    shape.dims = {2, 3};
    shape.codomain_dim = 2;
    const MultilinearMap t = random_multilinear(shape, rng);
    const auto slots = random_slots(shape, rng);
    const std::vector<double> w = rng.uniform_vector(2, -1.0, 1.0);
    const std::vector<double> value = eval_slots(t, slots);
    const double paired = value[0] * w[0] + value[1] * w[1];
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const std::vector<double> g = partial_gradient(t, slots, s, w);
        double recon = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) recon += slots[s][a] * g[a];
        CHECK(recon == Catch::Approx(paired).margin(1e-12));
    }
}

TEST_CASE("argument mismatches raise typed errors") {
    Rng rng(23);
    BlockShape shape;
    shape.degrees = {1, 1};
    shape.dims = {2, 2};
    shape.codomain_dim = 1;
    const MultilinearMap t = random_multilinear(shape, rng);
    CHECK_THROWS_AS(eval_slots(t, {{1.0, 0.0}}), ArityMismatch);
    CHECK_THROWS_AS(eval_slots(t, {{1.0, 0.0}, {1.0, 0.0, 0.0}}), DimensionMismatch);
}
