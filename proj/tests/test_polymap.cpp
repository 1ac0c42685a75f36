#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mpoly/mpoly.hpp"

using namespace mpoly;

TEST_CASE("diagonal restriction repeats each block argument") {
    Rng rng(47);
    BlockShape shape;
    shape.degrees = {2, 1};
    shape.dims = {2, 3};
    shape.codomain_dim = 2;
    const MultilinearMap t = random_multilinear(shape, rng);
    const Multipolynomial p = hat(t);
    const std::vector<double> x = rng.uniform_vector(2, -1.0, 1.0);
    const std::vector<double> y = rng.uniform_vector(3, -1.0, 1.0);
    const std::vector<double> got = eval_poly(p, {x, y});
    const std::vector<double> want = eval_slots(t, {x, x, y});
    for (std::size_t c = 0; c < want.size(); ++c) CHECK(got[c] == want[c]);
}

TEST_CASE("the canonical representative evaluates identically on the diagonal") {
    Rng root(53);
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng = root.stream(trial);
        BlockShape shape;
        const std::size_t m = 1 + rng.below(2);
        for (std::size_t i = 0; i < m; ++i) {
            shape.degrees.push_back(1 + rng.below(3));
            shape.dims.push_back(1 + rng.below(3));
        }
        shape.codomain_dim = 1 + rng.below(2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        const Multipolynomial pc = check(p);
        REQUIRE(pc.canonical);
        REQUIRE(is_block_symmetric(pc.rep));
        std::vector<std::vector<double>> xs(m);
        for (std::size_t i = 0; i < m; ++i) xs[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
        const std::vector<double> a = eval_poly(p, xs);
        const std::vector<double> b = eval_poly(pc, xs);
        for (std::size_t c = 0; c < a.size(); ++c)
            CHECK(b[c] == Catch::Approx(a[c]).margin(1e-12));
    }
}

TEST_CASE("check is the identity on canonical polynomials") {
    Rng rng(59);
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    const Multipolynomial pc = check(hat(random_multilinear(shape, rng)));
    const Multipolynomial again = check(pc);
    CHECK(again.rep.coeffs == pc.rep.coeffs);
}

TEST_CASE("coefficient extraction recovers a handwritten quadratic") {
    // P((x, y)) = 3 x^2 + 2 x y has canonical coefficients
    // T(e0, e0) = 3, T(e0, e1) = T(e1, e0) = 1, T(e1, e1) = 0
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    BlockEvaluator box = [](const std::vector<std::vector<double>>& xs) {
        const double x = xs[0][0], y = xs[0][1];
        return std::vector<double>{3.0 * x * x + 2.0 * x * y};
    };
    const Multipolynomial p = from_black_box(box, shape);
    REQUIRE(p.canonical);
    const std::vector<double> want = {3.0, 1.0, 1.0, 0.0};
    for (std::size_t f = 0; f < want.size(); ++f)
        CHECK(p.rep.coeffs[f] == Catch::Approx(want[f]).margin(1e-12));
}

TEST_CASE("coefficient extraction round-trips random polynomials") {
    Rng root(61);
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = root.stream(trial);
        BlockShape shape;
        const std::size_t m = 1 + rng.below(2);
        for (std::size_t i = 0; i < m; ++i) {
            shape.degrees.push_back(1 + rng.below(2));
            shape.dims.push_back(1 + rng.below(2));
        }
        shape.codomain_dim = 1 + rng.below(2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        const Multipolynomial recovered = from_black_box(poly_evaluator(p), shape);
        const MultilinearMap want = block_symmetrize(p.rep);
        for (std::size_t f = 0; f < want.coeffs.size(); ++f)
            CHECK(recovered.rep.coeffs[f] == Catch::Approx(want.coeffs[f]).margin(1e-11));
    }
}

TEST_CASE("extraction rejects a non-polynomial black box") {
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {1};
    shape.codomain_dim = 1;
    BlockEvaluator box = [](const std::vector<std::vector<double>>& xs) {
        return std::vector<double>{std::abs(xs[0][0])};
    };
    CHECK_THROWS_AS(from_black_box(box, shape), NotAMultipolynomial);
}

TEST_CASE("extraction surfaces evaluator shape violations") {
    BlockShape shape;
    shape.degrees = {1};
    shape.dims = {2};
    shape.codomain_dim = 1;
    BlockEvaluator wrong_codomain = [](const std::vector<std::vector<double>>&) {
        return std::vector<double>{1.0, 2.0};
    };
    CHECK_THROWS_AS(from_black_box(wrong_codomain, shape), ShapeMismatch);
}

TEST_CASE("the unit product polynomial multiplies powers of scalars") {
    const Multipolynomial p = id_multipolynomial({2, 3});
    REQUIRE(p.canonical);
    // P(x, y) = x^2 y^3 at x = 2, y = 3
    CHECK(eval_poly(p, {{2.0}, {3.0}})[0] == 108.0);
    CHECK(eval_poly(p, {{1.0}, {1.0}})[0] == 1.0);
}

TEST_CASE("composition with scalar maps multiplies through") {
    // Q(y) = 3 P(2 y) = 12 y^2 for P(x) = x^2
    const Multipolynomial p = id_multipolynomial({2});
    Matrix u(1, 1);
    u.a = {2.0};
    Matrix tm(1, 1);
    tm.a = {3.0};
    const Multipolynomial q = compose_poly(tm, p, {u});
    CHECK(eval_poly(q, {{1.0}})[0] == 12.0);
    CHECK(eval_poly(q, {{0.5}})[0] == 3.0);
}

TEST_CASE("composition evaluates as the chained maps on random input") {
    Rng rng(67);
    BlockShape shape;
    shape.degrees = {2, 1};
    shape.dims = {2, 2};
    shape.codomain_dim = 2;
    const Multipolynomial p = hat(random_multilinear(shape, rng));
    Matrix u0(2, 3), u1(2, 2), tm(3, 2);
    for (double& v : u0.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : u1.a) v = rng.uniform(-1.0, 1.0);
    for (double& v : tm.a) v = rng.uniform(-1.0, 1.0);
    const Multipolynomial q = compose_poly(tm, p, {u0, u1});

    const std::vector<double> y0 = rng.uniform_vector(3, -1.0, 1.0);
    const std::vector<double> y1 = rng.uniform_vector(2, -1.0, 1.0);
    auto apply = [](const Matrix& u, const std::vector<double>& y) {
        std::vector<double> x(u.rows, 0.0);
        for (std::size_t r = 0; r < u.rows; ++r)
            for (std::size_t c = 0; c < u.cols; ++c) x[r] += u.at(r, c) * y[c];
        return x;
    };
    const std::vector<double> inner = eval_poly(p, {apply(u0, y0), apply(u1, y1)});
    const std::vector<double> want = apply(tm, inner);
    const std::vector<double> got = eval_poly(q, {y0, y1});
    for (std::size_t c = 0; c < want.size(); ++c)
        CHECK(got[c] == Catch::Approx(want[c]).margin(1e-12));
}
