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
#include "mpoly/parallel.hpp"
#include "mpoly/polynomial.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/seqclass.hpp"
#include "mpoly/symmetry.hpp"

namespace mpoly {

// One sequence class per input block plus the class of the output residual.
struct ClassTriple {
    std::vector<ClassKind> input_kinds;
    ClassKind output_kind;
};

inline void validate_class_triple(const ClassTriple& triple, std::size_t blocks) {
    if (triple.input_kinds.size() != blocks)
        throw ArityMismatch("expected one input class per block");
    for (const ClassKind& kind : triple.input_kinds) validate_class_kind(kind);
    validate_class_kind(triple.output_kind);
}

// An anchor point and one perturbation sequence per block, all of equal
// length.
struct SummingInstance {
    std::vector<std::vector<double>> anchor;
    std::vector<FiniteSequence> sequences;
};

enum class AnchorMode { Origin, Everywhere };

struct SummingOptions {
    std::size_t max_len = 8;
    double out_space_p = 2.0;  // codomain norm carried by residual sequences
    double amplitude = 1.0;
    int threads = 1;
};

inline void validate_instance(const Multipolynomial& p, const SummingInstance& inst) {
    const BlockShape& shape = p.rep.shape;
    const std::size_t m = shape.block_count();
    if (inst.anchor.size() != m || inst.sequences.size() != m)
        throw ArityMismatch("instance wants one anchor and one sequence per block");
    std::size_t len = inst.sequences.empty() ? 0 : inst.sequences[0].entries.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (inst.anchor[i].size() != shape.dims[i])
            throw DimensionMismatch("anchor " + std::to_string(i) + " has wrong dimension");
        validate_sequence(inst.sequences[i]);
        if (inst.sequences[i].dim != shape.dims[i])
            throw DimensionMismatch("sequence " + std::to_string(i) + " has wrong dimension");
        if (inst.sequences[i].entries.size() != len)
            throw LengthMismatch("perturbation sequences must have equal length");
    }
}

inline FiniteSequence induced_map(const Multipolynomial& p,
                                  const std::vector<FiniteSequence>& sequences,
                                  double out_space_p = 2.0) {
    const BlockShape& shape = p.rep.shape;
    const std::size_t m = shape.block_count();
    if (sequences.size() != m) throw ArityMismatch("expected one sequence per block");
    std::size_t len = sequences[0].entries.size();
    for (const FiniteSequence& s : sequences) {
        validate_sequence(s);
        if (s.entries.size() != len) throw LengthMismatch("sequences must have equal length");
    }
    FiniteSequence out{shape.codomain_dim, out_space_p, {}};
    out.entries.reserve(len);
    std::vector<std::vector<double>> xs(m);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t i = 0; i < m; ++i) xs[i] = sequences[i].entries[j];
        out.entries.push_back(eval_poly(p, xs));
    }
    return out;
}

// Entry j is P(a + x_j) - P(a).  A zero anchor reproduces induced_map
// bit-for-bit: adding 0 and subtracting P(0) = 0 are both exact.
inline FiniteSequence shifted_residual(const Multipolynomial& p,
                                       const std::vector<std::vector<double>>& anchor,
                                       const std::vector<FiniteSequence>& sequences,
                                       double out_space_p = 2.0) {
    const BlockShape& shape = p.rep.shape;
    const std::size_t m = shape.block_count();
    if (anchor.size() != m) throw ArityMismatch("expected one anchor per block");
    for (std::size_t i = 0; i < m; ++i)
        if (anchor[i].size() != shape.dims[i])
            throw DimensionMismatch("anchor " + std::to_string(i) + " has wrong dimension");
    if (sequences.size() != m) throw ArityMismatch("expected one sequence per block");
    std::size_t len = sequences[0].entries.size();
    for (const FiniteSequence& s : sequences) {
        validate_sequence(s);
        if (s.entries.size() != len) throw LengthMismatch("sequences must have equal length");
    }
    const std::vector<double> base = eval_poly(p, anchor);
    FiniteSequence out{shape.codomain_dim, out_space_p, {}};
    out.entries.reserve(len);
    std::vector<std::vector<double>> xs(m);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            xs[i] = anchor[i];
            for (std::size_t a = 0; a < xs[i].size(); ++a)
                xs[i][a] += sequences[i].entries[j][a];
        }
        std::vector<double> val = eval_poly(p, xs);
        for (std::size_t c = 0; c < val.size(); ++c) val[c] -= base[c];
        out.entries.push_back(std::move(val));
    }
    return out;
}

namespace detail {

inline void note_estimate(std::vector<std::string>& flags, const std::string& what) {
    for (const std::string& f : flags)
        if (f == what) return;
    flags.push_back(what);
}

}  // namespace detail

// ||residual||_gamma / prod_i (||a_i|| + ||x^(i)||_gamma_i)^{n_i}; the
// quantity whose sup over instances the summing constant bounds.
inline double instance_ratio(const Multipolynomial& p, const ClassTriple& triple,
                             const SummingInstance& inst, const SummingOptions& opts = {},
                             std::vector<std::string>* estimate_flags = nullptr) {
    const BlockShape& shape = p.rep.shape;
    validate_class_triple(triple, shape.block_count());
    validate_instance(p, inst);
    const FiniteSequence residual =
        shifted_residual(p, inst.anchor, inst.sequences, opts.out_space_p);
    const SeqNorm num = seq_norm(residual, triple.output_kind);
    if (estimate_flags && num.estimated)
        detail::note_estimate(*estimate_flags, "estimated-norm:output");
    double den = 1.0;
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        const SeqNorm sn = seq_norm(inst.sequences[i], triple.input_kinds[i]);
        if (estimate_flags && sn.estimated)
            detail::note_estimate(*estimate_flags, "estimated-norm:block-" + std::to_string(i));
        const double base = pnorm(inst.anchor[i], inst.sequences[i].space_p) + sn.value;
        for (std::size_t r = 0; r < shape.degrees[i]; ++r) den *= base;
    }
    return den > 0.0 ? num.value / den : 0.0;
}

inline SummingInstance random_instance(const BlockShape& shape, Rng& rng, AnchorMode mode,
                                       const SummingOptions& opts, double space_p = 2.0) {
    SummingInstance inst;
    const std::size_t len = 1 + rng.below(opts.max_len);
    inst.anchor.resize(shape.block_count());
    inst.sequences.resize(shape.block_count());
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        inst.anchor[i] = mode == AnchorMode::Everywhere
                             ? rng.uniform_vector(shape.dims[i], -opts.amplitude, opts.amplitude)
                             : std::vector<double>(shape.dims[i], 0.0);
        inst.sequences[i] = random_sequence(rng, shape.dims[i], len, space_p, opts.amplitude);
    }
    return inst;
}

struct SummingReport {
    double ratio = 0.0;    // ratio of the reported best instance
    double c_lower = 0.0;  // sup of all observed ratios
    SummingInstance best_instance;
    int trials = 0;
    std::vector<std::string> estimate_flags;
    std::vector<double> trial_ratios;
};

// Lower estimate of the summing constant: sup of ratios over random
// instances (anchors at the origin or drawn at random), then 2*trials
// random-perturbation ascent steps around the incumbent with a decaying
// radius.  Deterministic in seed; threads only split the trial loop.
inline SummingReport pi_lower_estimate(const Multipolynomial& p, const ClassTriple& triple,
                                       int trials, std::uint64_t seed,
                                       AnchorMode mode = AnchorMode::Origin,
                                       const SummingOptions& opts = {}) {
    const BlockShape& shape = p.rep.shape;
    validate_class_triple(triple, shape.block_count());
    if (trials < 1) throw Error("pi_lower_estimate needs at least one trial");

    const Rng base(seed);
    struct Outcome {
        double ratio;
        SummingInstance inst;
        std::vector<std::string> flags;
    };
    auto outcomes = parallel_map<Outcome>(
        static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
            Rng rng = base.stream(t);
            Outcome o;
            o.inst = random_instance(shape, rng, mode, opts);
            o.ratio = instance_ratio(p, triple, o.inst, opts, &o.flags);
            return o;
        });

    SummingReport report;
    report.trials = trials;
    report.trial_ratios.reserve(outcomes.size());
    std::size_t best = 0;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        report.trial_ratios.push_back(outcomes[t].ratio);
        for (const std::string& f : outcomes[t].flags)
            detail::note_estimate(report.estimate_flags, f);
        if (outcomes[t].ratio > outcomes[best].ratio) best = t;
    }
    SummingInstance incumbent = std::move(outcomes[best].inst);
    double ratio = outcomes[best].ratio;

    const int refine_steps = 2 * trials;
    for (int step = 0; step < refine_steps; ++step) {
        Rng rng = base.stream((std::uint64_t{1} << 32) + static_cast<std::uint64_t>(step));
        const double frac = refine_steps > 1 ? static_cast<double>(step) / (refine_steps - 1) : 1.0;
        const double radius = 0.5 * opts.amplitude * std::pow(2e-8, frac);
        SummingInstance cand = incumbent;
        for (std::size_t i = 0; i < cand.anchor.size(); ++i) {
            if (mode == AnchorMode::Everywhere)
                for (double& a : cand.anchor[i]) a += rng.uniform(-radius, radius);
            for (auto& entry : cand.sequences[i].entries)
                for (double& v : entry) v += rng.uniform(-radius, radius);
        }
        const double cand_ratio = instance_ratio(p, triple, cand, opts, &report.estimate_flags);
        if (cand_ratio > ratio) {
            ratio = cand_ratio;
            incumbent = std::move(cand);
        }
    }

    report.ratio = ratio;
    report.c_lower = ratio;
    report.best_instance = std::move(incumbent);
    return report;
}

struct ResidualIdentityReport {
    bool pass = true;
    double worst = 0.0;  // largest relative deviation seen
    int samples = 0;
};

// The residual of P and the diagonal residual of its symmetric
// representative agree at every anchor: both sides evaluate the same
// polynomial through different representatives.
inline ResidualIdentityReport check_ev_equivalence(const Multipolynomial& p, int samples,
                                                   std::uint64_t seed = 0, double tol = 1e-10,
                                                   const SummingOptions& opts = {}) {
    const BlockShape& shape = p.rep.shape;
    const Multipolynomial pc = check(p);
    const Rng base(seed);
    ResidualIdentityReport report;
    report.samples = samples;
    SummingOptions sample_opts = opts;
    sample_opts.max_len = std::min<std::size_t>(opts.max_len, 4);
    for (int s = 0; s < samples; ++s) {
        Rng rng = base.stream(s);
        const SummingInstance inst =
            random_instance(shape, rng, AnchorMode::Everywhere, sample_opts);
        const FiniteSequence lhs =
            shifted_residual(p, inst.anchor, inst.sequences, opts.out_space_p);
        const FiniteSequence rhs =
            shifted_residual(pc, inst.anchor, inst.sequences, opts.out_space_p);
        for (std::size_t j = 0; j < lhs.entries.size(); ++j)
            for (std::size_t c = 0; c < shape.codomain_dim; ++c) {
                const double dev = std::abs(lhs.entries[j][c] - rhs.entries[j][c]) /
                                   std::max(1.0, std::abs(rhs.entries[j][c]));
                report.worst = std::max(report.worst, dev);
            }
    }
    report.pass = report.worst <= tol;
    return report;
}

// Per-slot residual of a multilinear map: entry j is
// T(a_1 + x_j^(1), ..., a_N + x_j^(N)) - T(a_1, ..., a_N).
inline FiniteSequence residual_multilinear(const MultilinearMap& t,
                                           const std::vector<std::vector<double>>& slot_anchors,
                                           const std::vector<FiniteSequence>& slot_sequences,
                                           double out_space_p = 2.0) {
    const std::vector<std::size_t> dims = t.shape.slot_dims();
    const std::size_t nslots = dims.size();
    if (slot_anchors.size() != nslots || slot_sequences.size() != nslots)
        throw ArityMismatch("expected one anchor and one sequence per slot");
    std::size_t len = slot_sequences[0].entries.size();
    for (std::size_t s = 0; s < nslots; ++s) {
        if (slot_anchors[s].size() != dims[s])
            throw DimensionMismatch("slot anchor has wrong dimension");
        validate_sequence(slot_sequences[s]);
        if (slot_sequences[s].dim != dims[s])
            throw DimensionMismatch("slot sequence has wrong dimension");
        if (slot_sequences[s].entries.size() != len)
            throw LengthMismatch("slot sequences must have equal length");
    }
    std::vector<std::vector<double>> points(nslots);
    std::vector<const std::vector<double>*> ptrs(nslots);
    for (std::size_t s = 0; s < nslots; ++s) ptrs[s] = &points[s];
    for (std::size_t s = 0; s < nslots; ++s) points[s] = slot_anchors[s];
    const std::vector<double> basev = detail::contract(t, ptrs);
    FiniteSequence out{t.shape.codomain_dim, out_space_p, {}};
    out.entries.reserve(len);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t s = 0; s < nslots; ++s) {
            points[s] = slot_anchors[s];
            for (std::size_t a = 0; a < points[s].size(); ++a)
                points[s][a] += slot_sequences[s].entries[j][a];
        }
        std::vector<double> val = detail::contract(t, ptrs);
        for (std::size_t c = 0; c < val.size(); ++c) val[c] -= basev[c];
        out.entries.push_back(std::move(val));
    }
    return out;
}

// The residual of the symmetrized map is the group average of residuals of
// the original map at permuted inputs; exact linear algebra, checked to tol.
inline ResidualIdentityReport check_symmetrization_stability(const MultilinearMap& t, int samples,
                                                             std::uint64_t seed = 0,
                                                             double tol = 1e-10,
                                                             std::size_t group_cap = kDefaultGroupCap) {
    const BlockShape& shape = t.shape;
    double order_d = 1.0;
    for (std::size_t n : shape.degrees) order_d *= detail::factorial(n);
    if (order_d > static_cast<double>(group_cap))
        throw GroupTooLarge("permutation group order exceeds cap " + std::to_string(group_cap));

    std::vector<std::vector<std::vector<std::size_t>>> block_perms(shape.block_count());
    for (std::size_t i = 0; i < shape.block_count(); ++i) {
        std::vector<std::size_t> perm(shape.degrees[i]);
        for (std::size_t q = 0; q < perm.size(); ++q) perm[q] = q;
        do {
            block_perms[i].push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    const MultilinearMap ts = block_symmetrize(t);
    const std::vector<std::size_t> dims = shape.slot_dims();
    const std::size_t nslots = dims.size();
    const Rng base(seed);
    ResidualIdentityReport report;
    report.samples = samples;
    for (int s = 0; s < samples; ++s) {
        Rng rng = base.stream(s);
        const std::size_t len = 1 + rng.below(4);
        std::vector<std::vector<double>> anchors(nslots);
        std::vector<FiniteSequence> seqs(nslots);
        for (std::size_t slot = 0; slot < nslots; ++slot) {
            anchors[slot] = rng.uniform_vector(dims[slot], -1.0, 1.0);
            seqs[slot] = random_sequence(rng, dims[slot], len, 2.0);
        }
        const FiniteSequence lhs = residual_multilinear(ts, anchors, seqs);

        std::vector<std::vector<detail::KahanAcc>> acc(
            len, std::vector<detail::KahanAcc>(shape.codomain_dim));
        std::vector<std::size_t> pick(shape.block_count(), 0);
        std::size_t order = 0;
        bool more = true;
        while (more) {
            std::vector<std::size_t> sigma(nslots);
            std::size_t offset = 0;
            for (std::size_t i = 0; i < shape.block_count(); ++i) {
                const auto& perm = block_perms[i][pick[i]];
                for (std::size_t q = 0; q < perm.size(); ++q)
                    sigma[offset + q] = offset + perm[q];
                offset += perm.size();
            }
            std::vector<std::vector<double>> panchors(nslots);
            std::vector<FiniteSequence> pseqs(nslots);
            for (std::size_t slot = 0; slot < nslots; ++slot) {
                panchors[slot] = anchors[sigma[slot]];
                pseqs[slot] = seqs[sigma[slot]];
            }
            const FiniteSequence part = residual_multilinear(t, panchors, pseqs);
            for (std::size_t j = 0; j < len; ++j)
                for (std::size_t c = 0; c < shape.codomain_dim; ++c)
                    acc[j][c].add(part.entries[j][c]);
            ++order;
            std::size_t i = shape.block_count();
            more = false;
            while (i-- > 0) {
                if (++pick[i] < block_perms[i].size()) {
                    more = true;
                    break;
                }
                pick[i] = 0;
                if (i == 0) break;
            }
        }
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t c = 0; c < shape.codomain_dim; ++c) {
                const double rhs = acc[j][c].sum / static_cast<double>(order);
                const double dev = std::abs(lhs.entries[j][c] - rhs) / std::max(1.0, std::abs(rhs));
                report.worst = std::max(report.worst, dev);
            }
    }
    report.pass = report.worst <= tol;
    return report;
}

struct PiChainReport {
    double pi_poly = 0.0;
    double pi_check = 0.0;
    double constant = 1.0;
    bool left_ok = false;
    bool polarization_ok = true;
    double worst_polarization_excess = 0.0;
    int poly_samples = 0;
    int check_samples = 0;
    std::vector<std::string> estimate_flags;
};

// Summing-constant chain: the estimate for the symmetric representative is
// taken over per-slot samples that include the diagonal lift of every
// polynomial sample, so pi_poly <= pi_check by construction.  Every per-slot
// sample is additionally checked against the sign-sum bound
// ||residual of P_check|| <= A * sum over sign patterns of ||residual of P||,
// the computable content of the right-hand chain inequality.
inline PiChainReport pi_chain_report(const Multipolynomial& p, const ClassTriple& triple,
                                     int trials, std::uint64_t seed = 0,
                                     const SummingOptions& opts = {}) {
    const BlockShape& shape = p.rep.shape;
    validate_class_triple(triple, shape.block_count());
    if (trials < 1) throw Error("pi_chain_report needs at least one trial");
    const std::size_t n_total = shape.total_degree();
    if (n_total > kDefaultPolarizationBudget)
        throw BudgetExceeded("sign-sum bound needs 2^" + std::to_string(n_total) + " residuals");

    const Multipolynomial pc = check(p);
    const double scale = polarization_constant(shape.degrees);
    const std::size_t m = shape.block_count();
    const Rng base(seed);

    PiChainReport report;
    report.constant = chain_constant(shape.degrees);
    report.poly_samples = trials;

    // slot-level class kinds follow the block kinds
    std::vector<ClassKind> slot_kinds;
    for (std::size_t i = 0; i < m; ++i)
        slot_kinds.insert(slot_kinds.end(), shape.degrees[i], triple.input_kinds[i]);

    auto multilinear_ratio = [&](const std::vector<std::vector<double>>& anchors,
                                 const std::vector<FiniteSequence>& seqs) {
        const FiniteSequence residual =
            residual_multilinear(pc.rep, anchors, seqs, opts.out_space_p);
        const SeqNorm num = seq_norm(residual, triple.output_kind);
        if (num.estimated) detail::note_estimate(report.estimate_flags, "estimated-norm:output");
        double den = 1.0;
        for (std::size_t s = 0; s < seqs.size(); ++s) {
            const SeqNorm sn = seq_norm(seqs[s], slot_kinds[s]);
            if (sn.estimated)
                detail::note_estimate(report.estimate_flags,
                                      "estimated-norm:slot-" + std::to_string(s));
            den *= pnorm(anchors[s], seqs[s].space_p) + sn.value;
        }
        return den > 0.0 ? num.value / den : 0.0;
    };

    auto polarization_bound = [&](const std::vector<std::vector<double>>& anchors,
                                  const std::vector<FiniteSequence>& seqs) {
        const FiniteSequence residual =
            residual_multilinear(pc.rep, anchors, seqs, opts.out_space_p);
        const double lhs = seq_norm(residual, triple.output_kind).value;
        const std::size_t len = seqs[0].entries.size();
        double rhs_sum = 0.0;
        for (std::size_t bits = 0; bits < (std::size_t{1} << n_total); ++bits) {
            std::vector<std::vector<double>> eps_anchor(m);
            std::vector<FiniteSequence> eps_seq(m);
            std::size_t slot = 0;
            for (std::size_t i = 0; i < m; ++i) {
                eps_anchor[i].assign(shape.dims[i], 0.0);
                eps_seq[i].dim = shape.dims[i];
                eps_seq[i].space_p = seqs[slot].space_p;
                eps_seq[i].entries.assign(len, std::vector<double>(shape.dims[i], 0.0));
                for (std::size_t q = 0; q < shape.degrees[i]; ++q, ++slot) {
                    const double sign = (bits >> slot) & 1 ? -1.0 : 1.0;
                    for (std::size_t a = 0; a < shape.dims[i]; ++a) {
                        eps_anchor[i][a] += sign * anchors[slot][a];
                        for (std::size_t j = 0; j < len; ++j)
                            eps_seq[i].entries[j][a] += sign * seqs[slot].entries[j][a];
                    }
                }
            }
            const FiniteSequence part =
                shifted_residual(p, eps_anchor, eps_seq, opts.out_space_p);
            rhs_sum += seq_norm(part, triple.output_kind).value;
        }
        const double rhs = scale * rhs_sum;
        const double excess = lhs - rhs * (1.0 + 1e-9) - 1e-12;
        report.worst_polarization_excess = std::max(report.worst_polarization_excess, excess);
        if (excess > 0.0) report.polarization_ok = false;
    };

    for (int t = 0; t < trials; ++t) {
        Rng rng = base.stream(t);
        const SummingInstance inst = random_instance(shape, rng, AnchorMode::Everywhere, opts);
        const double poly_ratio = instance_ratio(p, triple, inst, opts, &report.estimate_flags);
        report.pi_poly = std::max(report.pi_poly, poly_ratio);

        // diagonal lift: each block's anchor and sequence repeated per slot
        std::vector<std::vector<double>> lift_anchor;
        std::vector<FiniteSequence> lift_seq;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t q = 0; q < shape.degrees[i]; ++q) {
                lift_anchor.push_back(inst.anchor[i]);
                lift_seq.push_back(inst.sequences[i]);
            }
        report.pi_check = std::max(report.pi_check, multilinear_ratio(lift_anchor, lift_seq));
        polarization_bound(lift_anchor, lift_seq);
        ++report.check_samples;

        // an independent per-slot sample
        Rng srng = base.stream((std::uint64_t{1} << 33) + static_cast<std::uint64_t>(t));
        const std::size_t len = 1 + srng.below(opts.max_len);
        std::vector<std::vector<double>> anchors;
        std::vector<FiniteSequence> seqs;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t q = 0; q < shape.degrees[i]; ++q, ++slot) {
                anchors.push_back(
                    srng.uniform_vector(shape.dims[i], -opts.amplitude, opts.amplitude));
                seqs.push_back(random_sequence(srng, shape.dims[i], len, 2.0, opts.amplitude));
            }
        report.pi_check = std::max(report.pi_check, multilinear_ratio(anchors, seqs));
        polarization_bound(anchors, seqs);
        ++report.check_samples;
    }

    report.left_ok = report.pi_poly <= report.pi_check * (1.0 + 1e-9);
    return report;
}

}  // namespace mpoly
