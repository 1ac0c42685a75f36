#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mpoly/mpoly.hpp"

using namespace mpoly;

namespace {

MultilinearMap diag_bilinear() {
    // T(x, y) = x1 y1 + 2 x2 y2, operator norm 2
    BlockShape shape;
    shape.degrees = {1, 1};
    shape.dims = {2, 2};
    shape.codomain_dim = 1;
    return make_multilinear(shape, {1.0, 0.0, 0.0, 2.0});
}

NormSpec euclidean_spec(std::size_t m) {
    NormSpec spec;
    spec.domain_p.assign(m, 2.0);
    return spec;
}

}  // namespace

TEST_CASE("spectral helpers reproduce handworked eigenvalues") {
    Matrix a(2, 2);
    a.a = {2.0, 1.0, 1.0, 2.0};
    CHECK(sym_eig_max(a) == Catch::Approx(3.0).margin(1e-12));

    Matrix b(2, 2);
    b.a = {3.0, 0.0, 4.0, 0.0};
    CHECK(sigma_max(b) == Catch::Approx(5.0).margin(1e-12));

    Matrix c(1, 1);
    c.a = {-7.0};
    CHECK(sigma_max(c) == Catch::Approx(7.0).margin(1e-12));
}

TEST_CASE("dual argmax picks extreme points with documented tie-breaks") {
    // p = 1 gains on a single coordinate, lowest index on ties
    const std::vector<double> g = {2.0, -2.0, 1.0};
    const std::vector<double> d1 = dual_argmax(g, 1.0);
    CHECK(d1 == std::vector<double>{1.0, 0.0, 0.0});
    // p = inf gains on the sign vector, zeros resolved upward
    const std::vector<double> dinf = dual_argmax({1.0, -3.0, 0.0}, kInf);
    CHECK(dinf == std::vector<double>{1.0, -1.0, 1.0});
    // zero gradient falls back to the first basis vector
    const std::vector<double> dz = dual_argmax({0.0, 0.0}, 2.0);
    CHECK(dz == std::vector<double>{1.0, 0.0});
}

TEST_CASE("chain constants match handworked values") {
    CHECK(chain_constant({1, 1}) == 1.0);
    CHECK(chain_constant({2, 2}) == 4.0);
    CHECK(chain_constant({3}) == 4.5);
    CHECK(chain_constant({2}) == 2.0);
    CHECK(chain_constant({1, 2}) == 2.0);
    CHECK(chain_constant({3, 3}) == Catch::Approx(20.25).margin(1e-12));
}

TEST_CASE("the coefficient bound sums fiber norms") {
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    const MultilinearMap t = make_multilinear(shape, {1.0, -2.0, 3.0, -4.0});
    CHECK(coeff_upper_bound(t, euclidean_spec(1)) == 10.0);
}

TEST_CASE("ascent finds the scalar product norm exactly") {
    BlockShape shape;
    shape.degrees = {2, 2};
    shape.dims = {1, 1};
    shape.codomain_dim = 1;
    const MultilinearMap t = make_multilinear(shape, {1.0});
    const NormReport r = multilinear_norm_lower(t, euclidean_spec(2), 32, 0);
    CHECK(r.lower == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.upper >= r.lower);
    CHECK(r.converged);
}

TEST_CASE("ascent reaches the top singular value of a diagonal form") {
    const MultilinearMap t = diag_bilinear();
    const NormReport r = multilinear_norm_lower(t, euclidean_spec(2), 32, 0);
    CHECK(r.lower == Catch::Approx(2.0).margin(1e-9));

    // under max norms the sup over the cube is attained at a vertex
    NormSpec cube;
    cube.domain_p = {kInf, kInf};
    const NormReport rc = multilinear_norm_lower(t, cube, 32, 0);
    CHECK(rc.lower == Catch::Approx(3.0).margin(1e-9));

    // under one-norms the sup is over coordinate picks
    NormSpec cross;
    cross.domain_p = {1.0, 1.0};
    const NormReport r1 = multilinear_norm_lower(t, cross, 32, 0);
    CHECK(r1.lower == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("polynomial ascent finds the square norm on the cube") {
    // P(x) = x1 x2, sup over the max-norm ball is 1 at (1, 1)
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    const MultilinearMap t = make_multilinear(shape, {0.0, 0.5, 0.5, 0.0});
    const Multipolynomial p = hat(t);
    NormSpec cube;
    cube.domain_p = {kInf};
    const NormReport r = poly_norm_lower(p, cube, 32, 0);
    CHECK(r.lower == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("grid brackets are exact when every slot has a closed-form tail") {
    const MultilinearMap t = diag_bilinear();
    const NormBracket b = grid_bracket_multilinear(t, euclidean_spec(2));
    CHECK(b.exact);
    CHECK(b.grid_points == 1);
    CHECK(b.lower == Catch::Approx(2.0).margin(1e-12));
    CHECK(b.upper == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("grid brackets contain the known norm with sub-percent width") {
    // symmetric quadratic on the plane, norm two from the larger eigenvalue
    BlockShape shape;
    shape.degrees = {2};
    shape.dims = {2};
    shape.codomain_dim = 1;
    const Multipolynomial pc = check(hat(make_multilinear(shape, {1.0, 0.0, 0.0, 2.0})));
    NormSpec spec = euclidean_spec(1);
    const NormBracket bt = grid_bracket_multilinear(pc.rep, spec);
    CHECK(bt.lower <= 2.0);
    CHECK(bt.upper >= 2.0);
    CHECK((bt.upper - bt.lower) / bt.lower <= 0.01);
    const NormBracket bp = grid_bracket_poly(pc, spec, 0.005, bt.upper);
    CHECK(bp.lower <= 2.0 * (1.0 + 1e-12));
    CHECK(bp.upper >= 2.0 * (1.0 - 1e-12));
    CHECK((bp.upper - bp.lower) / bp.lower <= 0.01);
}

TEST_CASE("grid bracketing is restricted to Euclidean norms and planar blocks") {
    const MultilinearMap t = diag_bilinear();
    NormSpec cube;
    cube.domain_p = {kInf, kInf};
    CHECK_THROWS_AS(grid_bracket_multilinear(t, cube), Error);

    BlockShape wide;
    wide.degrees = {1, 1, 1};
    wide.dims = {3, 3, 3};
    wide.codomain_dim = 1;
    Rng rng(71);
    const MultilinearMap big = random_multilinear(wide, rng);
    CHECK_THROWS_AS(grid_bracket_multilinear(big, euclidean_spec(3)), Error);
}

TEST_CASE("norm chain reports keep both inequalities on random instances") {
    Rng root(73);
    for (int trial = 0; trial < 15; ++trial) {
        Rng rng = root.stream(trial);
        BlockShape shape;
        const std::size_t m = 1 + rng.below(2);
        for (std::size_t i = 0; i < m; ++i) {
            shape.degrees.push_back(1 + rng.below(3));
            shape.dims.push_back(1 + rng.below(3));
        }
        shape.codomain_dim = 1 + rng.below(2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        const ChainReport r = norm_chain_report(p, euclidean_spec(m), 16, 73 + trial);
        CHECK(r.left_ok);
        CHECK(r.right_ok);
        CHECK(r.constant == chain_constant(shape.degrees));
        CHECK(r.poly_norm.lower <= r.check_norm.lower * (1.0 + 1e-9));
    }
}

TEST_CASE("norm specs are validated") {
    const MultilinearMap t = diag_bilinear();
    NormSpec bad;
    bad.domain_p = {0.5, 2.0};
    CHECK_THROWS_AS(multilinear_norm_lower(t, bad, 4, 0), Error);
    NormSpec wrong_count;
    wrong_count.domain_p = {2.0};
    CHECK_THROWS_AS(multilinear_norm_lower(t, wrong_count, 4, 0), Error);
    CHECK_THROWS_AS(multilinear_norm_lower(t, euclidean_spec(2), 0, 0), Error);
}

TEST_CASE("matched seeds make the report deterministic") {
    Rng rng(79);
    BlockShape shape;
    shape.degrees = {2, 1};
    shape.dims = {3, 2};
    shape.codomain_dim = 2;
    const MultilinearMap t = random_multilinear(shape, rng);
    const NormReport a = multilinear_norm_lower(t, euclidean_spec(2), 16, 5, 1);
    const NormReport b = multilinear_norm_lower(t, euclidean_spec(2), 16, 5, 8);
    CHECK(a.lower == b.lower);
    CHECK(a.argmax == b.argmax);
}
