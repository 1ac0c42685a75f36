#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpoly/errors.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/norms.hpp"
#include "mpoly/polynomial.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/seqclass.hpp"
#include "mpoly/summing.hpp"
#include "mpoly/symmetry.hpp"

namespace mpoly {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // the residual the check compared against its tolerance
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyConfig {
    int trials = 100;
    double tol = -1.0;  // <= 0 keeps each check's own tolerance
    std::uint64_t seed = 0;
    int threads = 1;
};

namespace detail {

inline double eff_tol(const VerifyConfig& cfg, double fallback) {
    return cfg.tol > 0.0 ? cfg.tol : fallback;
}

inline BlockShape random_small_shape(Rng& rng, std::size_t max_m, std::size_t max_n,
                                     std::size_t max_d, std::size_t max_k) {
    BlockShape shape;
    const std::size_t m = 1 + rng.below(max_m);
    for (std::size_t i = 0; i < m; ++i) {
        shape.degrees.push_back(1 + rng.below(max_n));
        shape.dims.push_back(1 + rng.below(max_d));
    }
    shape.codomain_dim = 1 + rng.below(max_k);
    return shape;
}

inline BlockArgs random_block_args(const BlockShape& shape, Rng& rng, double amp = 1.0) {
    BlockArgs args(shape.block_count());
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        args[i].resize(shape.degrees[i]);
        for (std::size_t q = 0; q < shape.degrees[i]; ++q)
            args[i][q] = rng.uniform_vector(shape.dims[i], -amp, amp);
    }
    return args;
}

// the two shipped block-symmetric fixtures, rebuilt in code

inline MultilinearMap scalar_blocks_product_fixture() {
    BlockShape shape;
    shape.degrees = {2, 2};
    shape.dims = {1, 1};
    shape.codomain_dim = 1;
    return make_multilinear(shape, {1.0});
}

inline MultilinearMap proper_inclusion_witness_fixture() {
    BlockShape shape;
    shape.degrees = {2, 2};
    shape.dims = {2, 2};
    shape.codomain_dim = 1;
    std::vector<double> coeffs(shape.coeff_count(), 0.0);
    const FlatLayout layout(shape);
    // value x * z * b * d on ((x,y),(z,w),(a,b),(c,d)): slot indices (0,0,1,1)
    coeffs[layout.flat({0, 0, 1, 1}, 0)] = 1.0;
    return make_multilinear(shape, std::move(coeffs));
}

}  // namespace detail

inline SuiteResult run_polarization_suite(const VerifyConfig& cfg) {
    SuiteResult suite{"polarization", {}};
    Rng root(cfg.seed);
    Rng shapes = root.stream(1);

    double worst_rec = 0.0;
    double worst_base = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = root.stream(100 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 3, 3, 2);
        const MultilinearMap t0 = random_multilinear(shape, rng);
        const MultilinearMap ts = block_symmetrize(t0);
        const Multipolynomial p = hat(t0);
        const BlockEvaluator box = poly_evaluator(p);
        for (int a = 0; a < 2; ++a) {
            const BlockArgs args = detail::random_block_args(shape, rng);
            std::vector<std::vector<double>> base(shape.block_count());
            for (std::size_t i = 0; i < shape.block_count(); ++i)
                base[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
            const std::vector<double> want = eval_multilinear(ts, args);
            const std::vector<double> got = polarize(box, shape, base, args);
            double scale = 1.0;
            for (double v : want) scale = std::max(scale, std::abs(v));
            for (std::size_t c = 0; c < want.size(); ++c)
                worst_rec = std::max(worst_rec, std::abs(got[c] - want[c]) / scale);

            // spread over further base points
            std::vector<double> lo = got, hi = got;
            for (int b = 0; b < 4; ++b) {
                for (std::size_t i = 0; i < shape.block_count(); ++i)
                    base[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
                const std::vector<double> other = polarize(box, shape, base, args);
                for (std::size_t c = 0; c < other.size(); ++c) {
                    lo[c] = std::min(lo[c], other[c]);
                    hi[c] = std::max(hi[c], other[c]);
                }
            }
            for (std::size_t c = 0; c < got.size(); ++c)
                worst_base = std::max(worst_base, (hi[c] - lo[c]) / scale);
        }
    }
    const double rec_tol = detail::eff_tol(cfg, 1e-9);
    suite.checks.push_back({"reconstructs-symmetrized-values", worst_rec <= rec_tol, worst_rec});
    const double base_tol = detail::eff_tol(cfg, 1e-8);
    suite.checks.push_back({"base-point-independent", worst_base <= base_tol, worst_base});

    double worst_coeff = 0.0;
    const int extraction_trials = std::max(1, cfg.trials / 10);
    for (int t = 0; t < extraction_trials; ++t) {
        Rng rng = root.stream(5000 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 2, 2, 2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        const Multipolynomial recovered = from_black_box(poly_evaluator(p), shape);
        const MultilinearMap want = block_symmetrize(p.rep);
        for (std::size_t f = 0; f < want.coeffs.size(); ++f)
            worst_coeff = std::max(worst_coeff, std::abs(recovered.rep.coeffs[f] - want.coeffs[f]));
    }
    suite.checks.push_back(
        {"extracts-canonical-coefficients", worst_coeff <= detail::eff_tol(cfg, 1e-9), worst_coeff});
    return suite;
}

inline SuiteResult run_symmetry_suite(const VerifyConfig& cfg) {
    SuiteResult suite{"symmetry", {}};
    Rng root(cfg.seed);
    Rng shapes = root.stream(2);

    double worst_paths = 0.0;
    double worst_idem = 0.0;
    double worst_diag = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = root.stream(200 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 3, 3, 2);
        const MultilinearMap t0 = random_multilinear(shape, rng);
        const MultilinearMap ts = block_symmetrize(t0);
        const MultilinearMap tg = block_symmetrize_group_sum(t0);
        for (std::size_t f = 0; f < ts.coeffs.size(); ++f)
            worst_paths = std::max(worst_paths, std::abs(ts.coeffs[f] - tg.coeffs[f]));
        const MultilinearMap ts2 = block_symmetrize(ts);
        for (std::size_t f = 0; f < ts.coeffs.size(); ++f)
            worst_idem = std::max(worst_idem, std::abs(ts2.coeffs[f] - ts.coeffs[f]));
        std::vector<std::vector<double>> xs(shape.block_count());
        for (std::size_t i = 0; i < shape.block_count(); ++i)
            xs[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
        const std::vector<double> a = eval_poly(hat(t0), xs);
        const std::vector<double> b = eval_poly(hat(ts), xs);
        for (std::size_t c = 0; c < a.size(); ++c)
            worst_diag =
                std::max(worst_diag, std::abs(a[c] - b[c]) / std::max(1.0, std::abs(a[c])));
    }
    suite.checks.push_back(
        {"orbit-average-matches-group-sum", worst_paths <= detail::eff_tol(cfg, 1e-12), worst_paths});
    suite.checks.push_back(
        {"symmetrization-idempotent", worst_idem <= detail::eff_tol(cfg, 1e-12), worst_idem});
    suite.checks.push_back(
        {"symmetrization-fixes-diagonal", worst_diag <= detail::eff_tol(cfg, 1e-10), worst_diag});

    const MultilinearMap f1 = detail::scalar_blocks_product_fixture();
    const MultilinearMap f2 = detail::proper_inclusion_witness_fixture();
    const bool fixture_ok = is_block_symmetric(f1, 1e-12) && is_block_symmetric(f2, 1e-12);
    suite.checks.push_back({"fixtures-block-symmetric", fixture_ok, fixture_ok ? 0.0 : 1.0});
    const bool witness_ok = !is_fully_symmetric(f2, 1e-12);
    suite.checks.push_back(
        {"witness-not-fully-symmetric", witness_ok, witness_ok ? 0.0 : 1.0});
    return suite;
}

inline SuiteResult run_norm_chain_suite(const VerifyConfig& cfg) {
    SuiteResult suite{"norm-chain", {}};
    Rng root(cfg.seed);

    {
        double worst = 0.0;
        worst = std::max(worst, std::abs(chain_constant({1, 1}) - 1.0));
        worst = std::max(worst, std::abs(chain_constant({2, 2}) - 4.0));
        worst = std::max(worst, std::abs(chain_constant({3}) - 4.5));
        suite.checks.push_back({"constant-spot-values", worst == 0.0, worst});
    }

    struct GridShape {
        std::vector<std::size_t> degrees, dims;
        std::size_t k;
    };
    const std::vector<GridShape> grid_shapes = {
        {{2}, {2}, 1}, {{1, 1}, {2, 2}, 1}, {{2, 2}, {1, 2}, 1}, {{2, 2}, {1, 1}, 1}, {{1, 1}, {2, 2}, 2},
    };
    const int grid_trials = std::max(5, std::min(cfg.trials / 5, 20));
    double worst_width = 0.0;
    double worst_ascent_gap = 0.0;
    double worst_chain = 0.0;
    for (int t = 0; t < grid_trials; ++t) {
        Rng rng = root.stream(300 + t);
        const GridShape& gs = grid_shapes[t % grid_shapes.size()];
        BlockShape shape;
        shape.degrees = gs.degrees;
        shape.dims = gs.dims;
        shape.codomain_dim = gs.k;
        const Multipolynomial pc = check(hat(random_multilinear(shape, rng)));
        NormSpec spec;
        spec.domain_p.assign(shape.block_count(), 2.0);
        const NormBracket bt = grid_bracket_multilinear(pc.rep, spec);
        const NormBracket bp = grid_bracket_poly(pc, spec, 0.005, bt.upper);
        if (bt.lower > 0.0) worst_width = std::max(worst_width, (bt.upper - bt.lower) / bt.lower);
        if (bp.lower > 0.0) worst_width = std::max(worst_width, (bp.upper - bp.lower) / bp.lower);

        const ChainReport chain = norm_chain_report(pc, spec, 16, cfg.seed + t, 0.02, cfg.threads);
        worst_ascent_gap = std::max(worst_ascent_gap,
                                    chain.check_norm.lower / bt.upper - 1.0);
        worst_ascent_gap = std::max(worst_ascent_gap, chain.poly_norm.lower / bp.upper - 1.0);
        worst_ascent_gap = std::max(worst_ascent_gap, bt.lower / chain.check_norm.lower - 1.0);
        worst_ascent_gap = std::max(worst_ascent_gap, bp.lower / chain.poly_norm.lower - 1.0);

        const double c = chain_constant(shape.degrees);
        worst_chain = std::max(worst_chain, bp.lower / (bt.upper * 1.02) - 1.0);
        worst_chain = std::max(worst_chain, bt.lower / (c * bp.upper * 1.02) - 1.0);
    }
    suite.checks.push_back({"bracket-width-within-1pct", worst_width <= 0.01, worst_width});
    suite.checks.push_back(
        {"ascent-agrees-with-bracket", worst_ascent_gap <= detail::eff_tol(cfg, 1e-6), worst_ascent_gap});
    suite.checks.push_back({"chain-holds-at-brackets", worst_chain <= 0.0, worst_chain});

    int monotone_failures = 0;
    const int chain_trials = std::max(5, cfg.trials / 5);
    Rng shapes = root.stream(3);
    for (int t = 0; t < chain_trials; ++t) {
        Rng rng = root.stream(400 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 3, 4, 2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        NormSpec spec;
        spec.domain_p.assign(shape.block_count(), 2.0);
        const ChainReport chain = norm_chain_report(p, spec, 8, cfg.seed + t, 0.02, cfg.threads);
        if (!chain.left_ok) ++monotone_failures;
    }
    suite.checks.push_back({"matched-seed-monotone", monotone_failures == 0,
                            static_cast<double>(monotone_failures)});
    return suite;
}

inline SuiteResult run_summing_suite(const VerifyConfig& cfg) {
    SuiteResult suite{"summing", {}};
    Rng root(cfg.seed);
    Rng shapes = root.stream(4);

    double worst_zero = 0.0;
    double worst_scale = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = root.stream(500 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 2, 3, 2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        ClassTriple triple;
        triple.input_kinds.assign(shape.block_count(), ClassKind::lp(2.0));
        triple.output_kind = ClassKind::lp(2.0);
        SummingOptions opts;
        opts.max_len = 4;
        SummingInstance inst = random_instance(shape, rng, AnchorMode::Origin, opts);
        const FiniteSequence direct = induced_map(p, inst.sequences, opts.out_space_p);
        const FiniteSequence shifted =
            shifted_residual(p, inst.anchor, inst.sequences, opts.out_space_p);
        for (std::size_t j = 0; j < direct.entries.size(); ++j)
            for (std::size_t c = 0; c < direct.entries[j].size(); ++c)
                worst_zero = std::max(
                    worst_zero, std::abs(direct.entries[j][c] - shifted.entries[j][c]));

        // scaling block 0 by lambda leaves the ratio unchanged
        Rng rng2 = root.stream(600 + t);
        SummingInstance scaled = random_instance(shape, rng2, AnchorMode::Everywhere, opts);
        const double r0 = instance_ratio(p, triple, scaled, opts);
        const double lambda = 0.25 + rng2.next_double();
        for (double& a : scaled.anchor[0]) a *= lambda;
        for (auto& e : scaled.sequences[0].entries)
            for (double& v : e) v *= lambda;
        const double r1 = instance_ratio(p, triple, scaled, opts);
        worst_scale = std::max(worst_scale, std::abs(r1 - r0) / std::max(1.0, std::abs(r0)));
    }
    suite.checks.push_back({"zero-anchor-matches-induced-map", worst_zero == 0.0, worst_zero});
    suite.checks.push_back(
        {"ratio-block-scale-invariant", worst_scale <= detail::eff_tol(cfg, 1e-10), worst_scale});

    double worst_ev = 0.0;
    double worst_stab = 0.0;
    bool chain_ok = true;
    const int id_trials = std::max(10, cfg.trials / 4);
    for (int t = 0; t < id_trials; ++t) {
        Rng rng = root.stream(700 + t);
        const BlockShape shape = detail::random_small_shape(shapes, 2, 2, 2, 2);
        const MultilinearMap t0 = random_multilinear(shape, rng);
        const Multipolynomial p = hat(t0);
        const auto ev = check_ev_equivalence(p, 3, cfg.seed + t);
        worst_ev = std::max(worst_ev, ev.worst);
        const auto stab = check_symmetrization_stability(t0, 3, cfg.seed + t);
        worst_stab = std::max(worst_stab, stab.worst);
        ClassTriple triple;
        triple.input_kinds.assign(shape.block_count(), ClassKind::lp(2.0));
        triple.output_kind = ClassKind::lp(1.0);
        SummingOptions opts;
        opts.max_len = 3;
        const PiChainReport chain = pi_chain_report(p, triple, 3, cfg.seed + t, opts);
        chain_ok = chain_ok && chain.left_ok && chain.polarization_ok;
    }
    suite.checks.push_back({"residual-identity-between-representatives",
                            worst_ev <= detail::eff_tol(cfg, 1e-10), worst_ev});
    suite.checks.push_back({"symmetrization-average-identity",
                            worst_stab <= detail::eff_tol(cfg, 1e-10), worst_stab});
    suite.checks.push_back({"summing-chain-and-sign-sum-bound", chain_ok, chain_ok ? 0.0 : 1.0});

    {
        const Multipolynomial id11 = id_multipolynomial({1, 1});
        ClassTriple triple;
        triple.input_kinds = {ClassKind::lp(2.0), ClassKind::lp(2.0)};
        triple.output_kind = ClassKind::lp(1.0);
        const SummingReport report = pi_lower_estimate(
            id11, triple, std::max(cfg.trials, 50), cfg.seed, AnchorMode::Origin);
        const double dev = std::abs(report.c_lower - 1.0);
        suite.checks.push_back(
            {"product-map-constant-one", dev <= detail::eff_tol(cfg, 1e-6), dev});
    }
    return suite;
}

inline SuiteResult run_seqclass_suite(const VerifyConfig& cfg) {
    SuiteResult suite{"seqclass", {}};
    Rng root(cfg.seed);
    const std::vector<ClassKind> scalar_kinds = {ClassKind::lp(1.0), ClassKind::lp(2.0),
                                                 ClassKind::weak_lp(2.0), ClassKind::linf()};

    double worst_unit = 0.0;
    for (const ClassKind& kind : scalar_kinds)
        for (std::size_t j = 0; j < 100; ++j) {
            FiniteSequence ej = scalar_sequence(std::vector<double>(j + 1, 0.0));
            ej.entries[j][0] = 1.0;
            worst_unit = std::max(worst_unit, std::abs(seq_norm(ej, kind).value - 1.0));
        }
    suite.checks.push_back({"unit-coordinate-vectors", worst_unit == 0.0, worst_unit});

    // kinds whose norms are computed exactly on these samples
    auto exact_kind = [&](Rng& rng) {
        switch (rng.below(4)) {
            case 0: return ClassKind::lp(1.0 + 3.0 * rng.next_double());
            case 1: return ClassKind::lp(1.0);
            case 2: return ClassKind::linf();
            default: return ClassKind::weak_lp(2.0);
        }
    };
    double worst_dom = 0.0;
    double worst_weak = 0.0;
    double worst_axiom = 0.0;
    int monotone_failures = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = root.stream(800 + t);
        const ClassKind kind = exact_kind(rng);
        const std::size_t dim = kind.tag == ClassKind::Tag::WeakLp ? 1 + rng.below(3) : 1;
        FiniteSequence s = random_sequence(rng, dim, 1 + rng.below(8), 2.0);
        const double full = seq_norm(s, kind).value;
        const double sup = seq_norm(s, ClassKind::linf()).value;
        worst_dom = std::max(worst_dom, sup - full);
        if (!check_finitely_determined(s, kind)) ++monotone_failures;
        if (kind.tag != ClassKind::Tag::LInf) {
            const double strong = seq_norm(s, ClassKind::lp(kind.p)).value;
            if (kind.tag == ClassKind::Tag::WeakLp)
                worst_weak = std::max(worst_weak, full - strong);
        }
        // homogeneity and triangle inequality
        const double alpha = -2.0 + 4.0 * rng.next_double();
        FiniteSequence sa = s;
        for (auto& e : sa.entries)
            for (double& v : e) v *= alpha;
        worst_axiom = std::max(
            worst_axiom, std::abs(seq_norm(sa, kind).value - std::abs(alpha) * full));
        FiniteSequence other = random_sequence(rng, dim, s.entries.size(), 2.0);
        FiniteSequence sum = s;
        for (std::size_t j = 0; j < sum.entries.size(); ++j)
            for (std::size_t a = 0; a < sum.entries[j].size(); ++a)
                sum.entries[j][a] += other.entries[j][a];
        worst_axiom = std::max(worst_axiom, seq_norm(sum, kind).value - full -
                                                seq_norm(other, kind).value);
    }
    suite.checks.push_back(
        {"dominates-sup-norm", worst_dom <= detail::eff_tol(cfg, 1e-12), worst_dom});
    suite.checks.push_back({"truncation-monotone", monotone_failures == 0,
                            static_cast<double>(monotone_failures)});
    suite.checks.push_back(
        {"weak-norm-below-strong", worst_weak <= detail::eff_tol(cfg, 1e-12), worst_weak});
    suite.checks.push_back(
        {"homogeneity-and-triangle", worst_axiom <= detail::eff_tol(cfg, 1e-10), worst_axiom});

    int holder_failures = 0;
    double worst_holder = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng = root.stream(900 + t);
        const std::size_t n = 2 + rng.below(2);
        const std::size_t len = 1 + rng.below(8);
        std::vector<std::vector<double>> factors(n);
        std::vector<double> exps(n);
        double inv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            factors[i] = rng.uniform_vector(len, -1.0, 1.0);
            exps[i] = 1.5 + 3.0 * rng.next_double();
            inv += 1.0 / exps[i];
        }
        // rescale so the target exponent stays a norm exponent
        if (inv > 1.0 / 1.05) {
            const double c = 1.05 * inv;
            inv = 0.0;
            for (double& q : exps) {
                q *= c;
                inv += 1.0 / q;
            }
        }
        const HolderReport rep = check_holder_product(factors, exps, 1.0 / inv);
        if (!rep.pass) ++holder_failures;
        worst_holder = std::max(worst_holder, rep.lhs - rep.rhs);
    }
    suite.checks.push_back({"generalized-holder", holder_failures == 0,
                            static_cast<double>(holder_failures)});
    return suite;
}

inline std::vector<std::string> suite_names() {
    return {"polarization", "symmetry", "norm-chain", "summing", "seqclass"};
}

inline SuiteResult run_suite(const std::string& name, const VerifyConfig& cfg) {
    if (name == "polarization") return run_polarization_suite(cfg);
    if (name == "symmetry") return run_symmetry_suite(cfg);
    if (name == "norm-chain") return run_norm_chain_suite(cfg);
    if (name == "summing") return run_summing_suite(cfg);
    if (name == "seqclass") return run_seqclass_suite(cfg);
    throw Error("unknown verify suite '" + name + "'");
}

}  // namespace mpoly
