// acceptance gate: one line per criterion, exit 0 only if all pass

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "mpoly/mpoly.hpp"

using namespace mpoly;

namespace {

int failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", index, name, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

BlockShape random_shape(Rng& rng, std::size_t max_m, std::size_t max_n, std::size_t max_d,
                        std::size_t max_k) {
    BlockShape shape;
    const std::size_t m = 1 + rng.below(max_m);
    for (std::size_t i = 0; i < m; ++i) {
        shape.degrees.push_back(1 + rng.below(max_n));
        shape.dims.push_back(1 + rng.below(max_d));
    }
    shape.codomain_dim = 1 + rng.below(max_k);
    return shape;
}

BlockArgs random_args(const BlockShape& shape, Rng& rng) {
    BlockArgs args(shape.block_count());
    for (std::size_t i = 0; i < shape.block_count(); ++i)
        for (std::size_t q = 0; q < shape.degrees[i]; ++q)
            args[i].push_back(rng.uniform_vector(shape.dims[i], -1.0, 1.0));
    return args;
}

// criteria 1 and 2 share their instances
void run_polarization_criteria() {
    Rng root(2024);
    double worst_rel = 0.0;
    double worst_spread = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng = root.stream(trial);
        const BlockShape shape = random_shape(rng, 2, 3, 3, 1);
        const MultilinearMap t = random_multilinear(shape, rng);
        const MultilinearMap ts = block_symmetrize(t);
        const BlockEvaluator box = poly_evaluator(hat(t));
        const std::size_t m = shape.block_count();
        for (int tuple = 0; tuple < 10; ++tuple) {
            const BlockArgs args = random_args(shape, rng);
            std::vector<std::vector<double>> base(m);
            for (std::size_t i = 0; i < m; ++i)
                base[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
            const double want = eval_multilinear(ts, args)[0];
            const double got = polarize(box, shape, base, args)[0];
            const double scale = std::max(1.0, std::abs(want));
            worst_rel = std::max(worst_rel, std::abs(got - want) / scale);

            double lo = got, hi = got;
            for (int b = 0; b < 9; ++b) {
                for (std::size_t i = 0; i < m; ++i)
                    base[i] = rng.uniform_vector(shape.dims[i], -1.0, 1.0);
                const double other = polarize(box, shape, base, args)[0];
                lo = std::min(lo, other);
                hi = std::max(hi, other);
            }
            worst_spread = std::max(worst_spread, (hi - lo) / scale);
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, "polarization reconstructs the symmetrized tensor",
           worst_rel <= 1e-9 && secs <= 10.0,
           "max rel err " + fmt("%.3e", worst_rel) + " over 100 tensors x 10 tuples in " +
               fmt("%.2f", secs) + " s (budget 1e-9, 10 s)");
    report(2, "polarization is base-point independent", worst_spread <= 1e-8,
           "max rel spread " + fmt("%.3e", worst_spread) + " over 10 base tuples (budget 1e-8)");
}

void run_fixture_criterion(const std::string& fixture_dir) {
    bool pass = true;
    std::string detail;
    try {
        const MultilinearMap product = load_tensor(fixture_dir + "/scalar_blocks_product.json");
        const MultilinearMap witness = load_tensor(fixture_dir + "/proper_inclusion_witness.json");
        const bool p1 = is_block_symmetric(product, 1e-12);
        const bool p2 = is_block_symmetric(witness, 1e-12);
        const bool p3 = !is_fully_symmetric(witness, 1e-12);
        pass = p1 && p2 && p3;
        detail = std::string("block-symmetric: ") + (p1 && p2 ? "both" : "MISSING") +
                 ", witness fully-symmetric: " + (p3 ? "no (as required)" : "YES");
    } catch (const Error& e) {
        pass = false;
        detail = std::string("fixture load failed: ") + e.what();
    }
    report(3, "shipped fixtures separate block symmetry from full symmetry", pass, detail);
}

void run_norm_chain_criterion() {
    struct GridShape {
        std::vector<std::size_t> degrees, dims;
        std::size_t k;
    };
    const std::vector<GridShape> shapes = {
        {{2}, {2}, 1},    {{1, 1}, {2, 2}, 1}, {{2, 2}, {1, 2}, 1},
        {{2, 2}, {1, 1}, 1}, {{1, 1}, {2, 2}, 2},
    };
    Rng root(4096);
    double worst_width = 0.0;
    double worst_chain_excess = 0.0;
    bool widths_ok = true, chain_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = root.stream(trial);
        const GridShape& gs = shapes[trial % shapes.size()];
        BlockShape shape;
        shape.degrees = gs.degrees;
        shape.dims = gs.dims;
        shape.codomain_dim = gs.k;
        const Multipolynomial pc = check(hat(random_multilinear(shape, rng)));
        NormSpec spec;
        spec.domain_p.assign(shape.block_count(), 2.0);
        const NormBracket bt = grid_bracket_multilinear(pc.rep, spec, 0.005);
        const NormBracket bp = grid_bracket_poly(pc, spec, 0.005, bt.upper);
        if (bt.lower > 0.0) worst_width = std::max(worst_width, (bt.upper - bt.lower) / bt.lower);
        if (bp.lower > 0.0) worst_width = std::max(worst_width, (bp.upper - bp.lower) / bp.lower);
        widths_ok = widths_ok && worst_width <= 0.01;
        const double c = chain_constant(shape.degrees);
        const double left = bp.lower / (bt.upper * 1.02) - 1.0;
        const double right = bt.lower / (c * bp.upper * 1.02) - 1.0;
        worst_chain_excess = std::max({worst_chain_excess, left, right});
        chain_ok = chain_ok && left <= 0.0 && right <= 0.0;
    }

    int monotone_failures = 0;
    Rng asc(8192);
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng = asc.stream(trial);
        const BlockShape shape = random_shape(rng, 2, 3, 4, 2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        NormSpec spec;
        spec.domain_p.assign(shape.block_count(), 2.0);
        const ChainReport r = norm_chain_report(p, spec, 8, 8192 + trial);
        if (!r.left_ok) ++monotone_failures;
    }
    report(4, "norm chain holds at bracketing resolution",
           widths_ok && chain_ok && monotone_failures == 0,
           "max bracket width " + fmt("%.3e", worst_width) + " (cap 0.01), chain excess " +
               fmt("%.3e", worst_chain_excess) + " at slack 1.02, ascent monotonicity failures " +
               std::to_string(monotone_failures) + "/30");
}

void run_constant_criterion() {
    const bool pass = chain_constant({1, 1}) == 1.0 && chain_constant({2, 2}) == 4.0 &&
                      chain_constant({3}) == 4.5;
    report(5, "chain constants take their closed-form spot values", pass,
           "(1,1)->" + fmt("%.1f", chain_constant({1, 1})) + " (2,2)->" +
               fmt("%.1f", chain_constant({2, 2})) + " (3)->" + fmt("%.1f", chain_constant({3})));
}

void run_composition_criterion() {
    Rng root(515);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Rng rng = root.stream(trial);
        BlockShape shape;
        const std::size_t m = 1 + rng.below(2);
        std::vector<std::size_t> gdims;
        for (std::size_t i = 0; i < m; ++i) {
            shape.degrees.push_back(1 + rng.below(2));
            shape.dims.push_back(1 + rng.below(2));
            gdims.push_back(1 + rng.below(2));
        }
        shape.codomain_dim = 1 + rng.below(2);
        const std::size_t k_out = 1 + rng.below(2);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        std::vector<Matrix> us;
        for (std::size_t i = 0; i < m; ++i) {
            Matrix u(shape.dims[i], gdims[i]);
            for (double& v : u.a) v = rng.uniform(-1.0, 1.0);
            us.push_back(u);
        }
        Matrix tm(k_out, shape.codomain_dim);
        for (double& v : tm.a) v = rng.uniform(-1.0, 1.0);

        const Multipolynomial lhs = check(compose_poly(tm, p, us));

        // oracle: contract the canonical representative slot by slot, one
        // explicit quadruple loop, no shared code with transform_arguments
        const Multipolynomial pc = check(p);
        BlockShape out_shape;
        out_shape.degrees = shape.degrees;
        out_shape.dims = gdims;
        out_shape.codomain_dim = k_out;
        const FlatLayout in_layout(pc.rep.shape);
        const FlatLayout out_layout(out_shape);
        std::vector<double> oracle(out_shape.coeff_count(), 0.0);
        std::vector<std::size_t> kidx, jidx;
        std::size_t kc = 0, jc = 0;
        for (std::size_t of = 0; of < oracle.size(); ++of) {
            out_layout.decode(of, kidx, kc);
            double acc = 0.0;
            for (std::size_t inf = 0; inf < pc.rep.coeffs.size(); ++inf) {
                in_layout.decode(inf, jidx, jc);
                double w = pc.rep.coeffs[inf] * tm.at(kc, jc);
                std::size_t slot = 0;
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t q = 0; q < shape.degrees[i]; ++q, ++slot)
                        w *= us[i].at(jidx[slot], kidx[slot]);
                acc += w;
            }
            oracle[of] = acc;
        }
        for (std::size_t f = 0; f < oracle.size(); ++f)
            worst = std::max(worst, std::abs(lhs.rep.coeffs[f] - oracle[f]));
    }
    report(6, "composition commutes with taking the canonical representative", worst <= 1e-10,
           "max coefficient error " + fmt("%.3e", worst) + " over 50 triples (budget 1e-10)");
}

void run_summing_criterion() {
    const Multipolynomial id11 = id_multipolynomial({1, 1});
    ClassTriple cs;
    cs.input_kinds = {ClassKind::lp(2.0), ClassKind::lp(2.0)};
    cs.output_kind = ClassKind::lp(1.0);
    const SummingReport csr = pi_lower_estimate(id11, cs, 200, 0);
    const bool cs_ok = std::abs(csr.c_lower - 1.0) <= 1e-6;

    Rng root(717);
    double worst_ev = 0.0, worst_stab = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng = root.stream(trial);
        const BlockShape shape = random_shape(rng, 2, 2, 2, 2);
        const MultilinearMap t = random_multilinear(shape, rng);
        worst_ev = std::max(worst_ev, check_ev_equivalence(hat(t), 3, 717 + trial).worst);
        worst_stab =
            std::max(worst_stab, check_symmetrization_stability(t, 3, 717 + trial).worst);
    }

    bool chain_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = root.stream(4000 + trial);
        const BlockShape shape = random_shape(rng, 2, 2, 2, 1);
        const Multipolynomial p = hat(random_multilinear(shape, rng));
        ClassTriple triple;
        triple.input_kinds.assign(shape.block_count(), ClassKind::lp(2.0));
        triple.output_kind = ClassKind::lp(1.0);
        SummingOptions opts;
        opts.max_len = 3;
        const PiChainReport r = pi_chain_report(p, triple, 5, 4000 + trial, opts);
        chain_ok = chain_ok && r.left_ok && r.polarization_ok;
    }
    report(7, "summing machinery meets its fixture and identity contracts",
           cs_ok && worst_ev <= 1e-10 && worst_stab <= 1e-10 && chain_ok,
           "tight-instance constant " + fmt("%.9f", csr.c_lower) +
               " (need 1 +- 1e-6), residual identity worst " + fmt("%.3e", worst_ev) +
               ", group-average worst " + fmt("%.3e", worst_stab) + ", chain flags " +
               (chain_ok ? "all ok" : "VIOLATED"));
}

void run_seqclass_criterion() {
    const std::vector<ClassKind> kinds = {ClassKind::lp(1.0), ClassKind::lp(2.0),
                                          ClassKind::lp(3.5), ClassKind::weak_lp(2.0),
                                          ClassKind::linf()};
    bool units_ok = true;
    for (const ClassKind& kind : kinds)
        for (std::size_t j = 0; j < 100; ++j) {
            FiniteSequence ej = scalar_sequence(std::vector<double>(j + 1, 0.0));
            ej.entries[j][0] = 1.0;
            units_ok = units_ok && seq_norm(ej, kind).value == 1.0;
        }

    Rng root(818);
    int monotone_failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = root.stream(trial);
        const ClassKind kind = kinds[rng.below(kinds.size())];
        const std::size_t dim = kind.tag == ClassKind::Tag::WeakLp && rng.below(2) == 1 ? 2 : 1;
        FiniteSequence s = random_sequence(rng, dim, 1 + rng.below(8), 2.0);
        if (dim == 2) s.space_p = 2.0;
        if (!check_finitely_determined(s, kind)) ++monotone_failures;
    }

    int holder_violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = root.stream(100000 + trial);
        const std::size_t n = 2 + rng.below(2);
        const std::size_t len = 1 + rng.below(8);
        std::vector<std::vector<double>> factors(n);
        std::vector<double> exps(n);
        double inv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            factors[i] = rng.uniform_vector(len, -2.0, 2.0);
            exps[i] = 1.5 + 3.0 * rng.next_double();
            inv += 1.0 / exps[i];
        }
        if (inv > 1.0 / 1.05) {
            const double c = 1.05 * inv;
            inv = 0.0;
            for (double& q : exps) {
                q *= c;
                inv += 1.0 / q;
            }
        }
        if (!check_holder_product(factors, exps, 1.0 / inv).pass) ++holder_violations;
    }
    report(8, "sequence classes satisfy the axioms and the product inequality",
           units_ok && monotone_failures == 0 && holder_violations == 0,
           std::string("unit vectors ") + (units_ok ? "exact" : "OFF") +
               ", truncation monotonicity failures " + std::to_string(monotone_failures) +
               "/1000, product-inequality violations " + std::to_string(holder_violations) +
               "/1000");
}

struct CliHarness {
    std::string cli;
    std::filesystem::path dir;

    explicit CliHarness(std::string cli_path) : cli(std::move(cli_path)) {
        dir = std::filesystem::temp_directory_path() /
              ("mpoly_acceptance_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~CliHarness() { std::filesystem::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    bool run(const std::string& args) const {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    }

    bool same(const std::string& a, const std::string& b) const {
        try {
            return read_file(a) == read_file(b);
        } catch (const Error&) {
            return false;
        }
    }
};

void run_determinism_criterion(const std::string& cli, const std::string& fixture_dir) {
    CliHarness h(cli);
    const std::string id22 = fixture_dir + "/id_2_2.json";
    const std::string id11 = fixture_dir + "/id_1_1.json";
    std::vector<std::string> notes;
    bool pass = true;

    auto twice = [&](const char* label, const std::string& args_a, const std::string& args_b,
                     const std::string& out_a, const std::string& out_b) {
        const bool ran = h.run(args_a + " --out " + out_a) && h.run(args_b + " --out " + out_b);
        const bool ok = ran && h.same(out_a, out_b);
        if (!ok) {
            pass = false;
            notes.push_back(label);
        }
    };

    twice("gen", "gen --degrees 2,2 --dims 2,2 --codomain 1 --seed 42",
          "gen --degrees 2,2 --dims 2,2 --codomain 1 --seed 42", h.path("g1.json"),
          h.path("g2.json"));
    twice("norm", "norm --in " + id22 + " --p 2,2 --restarts 32 --seed 7 --threads 1",
          "norm --in " + id22 + " --p 2,2 --restarts 32 --seed 7 --threads 8",
          h.path("n1.json"), h.path("n2.json"));
    twice("norm-chain", "norm --in " + id22 + " --p 2,2 --chain --seed 7 --threads 1",
          "norm --in " + id22 + " --p 2,2 --chain --seed 7 --threads 8", h.path("nc1.json"),
          h.path("nc2.json"));
    twice("summing",
          "summing --in " + id11 + " --classes 'lp:2,lp:2->lp:1' --trials 60 --seed 5 --threads 1",
          "summing --in " + id11 + " --classes 'lp:2,lp:2->lp:1' --trials 60 --seed 5 --threads 8",
          h.path("s1.json"), h.path("s2.json"));
    twice("summing-chain",
          "summing --in " + id11 +
              " --classes 'lp:2,lp:2->lp:1' --chain --trials 10 --seed 5 --threads 1",
          "summing --in " + id11 +
              " --classes 'lp:2,lp:2->lp:1' --chain --trials 10 --seed 5 --threads 8",
          h.path("sc1.json"), h.path("sc2.json"));
    twice("verify", "verify --suite symmetry --trials 20 --seed 3 --threads 1",
          "verify --suite symmetry --trials 20 --seed 3 --threads 8", h.path("v1.json"),
          h.path("v2.json"));
    twice("summing-csv",
          "summing --in " + id11 +
              " --classes 'lp:2,lp:2->lp:1' --trials 40 --seed 5 --format csv --threads 1",
          "summing --in " + id11 +
              " --classes 'lp:2,lp:2->lp:1' --trials 40 --seed 5 --format csv --threads 8",
          h.path("t1.csv"), h.path("t2.csv"));

    // aggregate the first run's reports twice
    const bool rep_ran =
        h.run("report --dir " + h.dir.string() + " --format csv --out " + h.path("r1.csv")) &&
        h.run("report --dir " + h.dir.string() + " --format csv --out " + h.path("r2.csv"));
    if (!(rep_ran && h.same(h.path("r1.csv"), h.path("r2.csv")))) {
        pass = false;
        notes.push_back("report");
    }

    std::string detail = "gen, norm, chain, summing, verify, report byte-compared across seeds "
                         "and thread counts";
    if (!pass) {
        detail = "mismatched commands:";
        for (const std::string& n : notes) detail += " " + n;
    }
    report(9, "the command line is byte-for-byte deterministic", pass, detail);
}

}  // namespace

int main() {
    const std::string cli = MPOLY_CLI_PATH;
    const std::string fixtures = MPOLY_FIXTURE_DIR;
    run_polarization_criteria();
    run_fixture_criterion(fixtures);
    run_norm_chain_criterion();
    run_constant_criterion();
    run_composition_criterion();
    run_summing_criterion();
    run_seqclass_criterion();
    run_determinism_criterion(cli, fixtures);
    if (failures == 0) {
        std::printf("acceptance: all 9 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
