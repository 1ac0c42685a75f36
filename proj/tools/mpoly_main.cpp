// command line front end: instance generation, verification suites, norm and
// summing estimation, report aggregation.  Exit codes: 0 success, 1 a check
// failed, 2 configuration or I/O error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpoly/mpoly.hpp"

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    int threads = 1;
};

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    for (const std::string& tok : split(text, ',')) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            throw mpoly::Error(std::string(what) + ": '" + tok + "' is not a positive integer");
        }
        if (pos != tok.size() || v == 0)
            throw mpoly::Error(std::string(what) + ": '" + tok + "' is not a positive integer");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<double> parse_exponent_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& tok : split(text, ',')) {
        if (tok == "inf") {
            out.push_back(mpoly::kInf);
            continue;
        }
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw mpoly::Error("exponent '" + tok + "' is not a number or 'inf'");
        }
        if (pos != tok.size()) throw mpoly::Error("exponent '" + tok + "' is not a number or 'inf'");
        out.push_back(v);
    }
    return out;
}

mpoly::ClassTriple parse_classes(const std::string& text, std::size_t blocks) {
    const std::size_t arrow = text.find("->");
    if (arrow == std::string::npos || text.find("->", arrow + 1) != std::string::npos)
        throw mpoly::Error("--classes expects '<in>,...,<in>-><out>'");
    mpoly::ClassTriple triple;
    for (const std::string& tok : split(text.substr(0, arrow), ','))
        triple.input_kinds.push_back(mpoly::parse_class_kind(tok));
    triple.output_kind = mpoly::parse_class_kind(text.substr(arrow + 2));
    if (triple.input_kinds.size() != blocks)
        throw mpoly::Error("--classes lists " + std::to_string(triple.input_kinds.size()) +
                           " input classes for " + std::to_string(blocks) + " blocks");
    return triple;
}

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        mpoly::write_file_atomic(g.out, text);
}

int run_gen(const GlobalOpts& g, const std::string& degrees, const std::string& dims,
            std::size_t codomain) {
    if (g.format != "json") throw mpoly::Error("gen supports only --format json");
    mpoly::BlockShape shape;
    shape.degrees = parse_size_list(degrees, "--degrees");
    shape.dims = parse_size_list(dims, "--dims");
    shape.codomain_dim = codomain;
    if (shape.dims.size() != shape.degrees.size())
        throw mpoly::Error("--degrees and --dims must list the same number of blocks");
    shape.validate();
    mpoly::Rng rng(g.seed);
    const mpoly::MultilinearMap t = mpoly::random_multilinear(shape, rng);
    emit(g, mpoly::dump_json(mpoly::tensor_to_json(t)));
    return 0;
}

int run_verify(const GlobalOpts& g, const std::string& suite, int trials, double tol) {
    mpoly::VerifyConfig cfg;
    cfg.trials = trials;
    cfg.tol = tol;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    std::vector<std::string> names;
    if (suite == "all")
        names = mpoly::suite_names();
    else
        names.push_back(suite);

    std::vector<mpoly::SuiteResult> results;
    for (const std::string& name : names) results.push_back(mpoly::run_suite(name, cfg));

    std::string text;
    bool all_pass = true;
    for (const mpoly::SuiteResult& r : results)
        for (const mpoly::CheckResult& c : r.checks) {
            char line[256];
            std::snprintf(line, sizeof(line), "[%s] %s/%s worst=%.3e\n", c.pass ? "pass" : "FAIL",
                          r.suite.c_str(), c.name.c_str(), c.worst);
            text += line;
            all_pass = all_pass && c.pass;
        }
    text += all_pass ? "all checks passed\n" : "some checks FAILED\n";

    if (g.format == "csv") {
        std::string csv = "suite,check,pass,worst\n";
        for (const mpoly::SuiteResult& r : results)
            for (const mpoly::CheckResult& c : r.checks)
                csv += r.suite + "," + c.name + "," + (c.pass ? "1" : "0") + "," +
                       format_g17(c.worst) + "\n";
        emit(g, csv);
    } else if (!g.out.empty() || g.format == "json") {
        mpoly::Json j;
        if (results.size() == 1) {
            j = mpoly::suite_to_json(results[0]);
        } else {
            j["report_type"] = "verify";
            j["suite"] = "all";
            j["pass"] = all_pass;
            mpoly::Json suites = mpoly::Json::array();
            for (const mpoly::SuiteResult& r : results) suites.push_back(mpoly::suite_to_json(r));
            j["suites"] = suites;
        }
        if (g.out.empty()) {
            std::fwrite(text.data(), 1, text.size(), stdout);
            emit(g, mpoly::dump_json(j));
        } else {
            std::fwrite(text.data(), 1, text.size(), stdout);
            mpoly::write_file_atomic(g.out, mpoly::dump_json(j));
        }
    }
    return all_pass ? 0 : 1;
}

std::string report_csv_of_metrics(const std::vector<std::pair<std::string, double>>& rows) {
    std::string csv = "metric,value\n";
    for (const auto& [k, v] : rows) csv += k + "," + format_g17(v) + "\n";
    return csv;
}

int run_norm(const GlobalOpts& g, const std::string& in, const std::string& p_list, double q,
             int restarts, bool chain, double grid, double slack) {
    const mpoly::Multipolynomial poly = mpoly::load_poly(in);
    const std::size_t m = poly.rep.shape.block_count();
    mpoly::NormSpec spec;
    spec.domain_p = parse_exponent_list(p_list);
    if (spec.domain_p.size() == 1 && m > 1) spec.domain_p.assign(m, spec.domain_p[0]);
    if (spec.domain_p.size() != m)
        throw mpoly::Error("--p lists " + std::to_string(spec.domain_p.size()) +
                           " exponents for " + std::to_string(m) + " blocks");
    spec.codomain_q = q;

    if (chain) {
        const mpoly::ChainReport r =
            mpoly::norm_chain_report(poly, spec, restarts, g.seed, slack, g.threads);
        if (g.format == "csv")
            emit(g, report_csv_of_metrics({{"poly_lower", r.poly_norm.lower},
                                           {"check_lower", r.check_norm.lower},
                                           {"constant", r.constant},
                                           {"left_ok", r.left_ok ? 1.0 : 0.0},
                                           {"right_ok", r.right_ok ? 1.0 : 0.0}}));
        else
            emit(g, mpoly::dump_json(mpoly::chain_report_to_json(r)));
        return r.left_ok && r.right_ok ? 0 : 1;
    }
    if (grid > 0.0) {
        const mpoly::NormBracket b = mpoly::grid_bracket_multilinear(poly.rep, spec, grid);
        if (g.format == "csv")
            emit(g, report_csv_of_metrics({{"lower", b.lower},
                                           {"upper", b.upper},
                                           {"grid_points", static_cast<double>(b.grid_points)},
                                           {"exact", b.exact ? 1.0 : 0.0}}));
        else
            emit(g, mpoly::dump_json(mpoly::bracket_to_json(b)));
        return 0;
    }
    const mpoly::NormReport r =
        mpoly::multilinear_norm_lower(poly.rep, spec, restarts, g.seed, g.threads);
    if (g.format == "csv")
        emit(g, report_csv_of_metrics({{"lower", r.lower},
                                       {"upper", r.upper},
                                       {"restarts_used", static_cast<double>(r.restarts_used)},
                                       {"converged", r.converged ? 1.0 : 0.0}}));
    else
        emit(g, mpoly::dump_json(mpoly::norm_report_to_json(r)));
    return 0;
}

int run_summing(const GlobalOpts& g, const std::string& in, const std::string& classes, int trials,
                const std::string& anchors, int max_len, bool chain, const std::string& instance) {
    const mpoly::Multipolynomial poly = mpoly::load_poly(in);
    const mpoly::ClassTriple triple = parse_classes(classes, poly.rep.shape.block_count());
    mpoly::SummingOptions opts;
    opts.max_len = static_cast<std::size_t>(max_len);
    opts.threads = g.threads;
    mpoly::AnchorMode mode;
    if (anchors == "origin")
        mode = mpoly::AnchorMode::Origin;
    else if (anchors == "everywhere")
        mode = mpoly::AnchorMode::Everywhere;
    else
        throw mpoly::Error("--anchors must be 'origin' or 'everywhere'");

    if (!instance.empty()) {
        const mpoly::SummingInstance inst =
            mpoly::summing_instance_from_json(mpoly::parse_json(mpoly::read_file(instance), instance));
        std::vector<std::string> flags;
        mpoly::SummingReport r;
        r.ratio = mpoly::instance_ratio(poly, triple, inst, opts, &flags);
        r.c_lower = r.ratio;
        r.best_instance = inst;
        r.trials = 1;
        r.estimate_flags = flags;
        r.trial_ratios = {r.ratio};
        if (g.format == "csv")
            emit(g, std::string("trial,ratio\n0,") + format_g17(r.ratio) + "\n");
        else
            emit(g, mpoly::dump_json(mpoly::summing_report_to_json(r)));
        return 0;
    }
    if (chain) {
        const mpoly::PiChainReport r =
            mpoly::pi_chain_report(poly, triple, trials, g.seed, opts);
        if (g.format == "csv")
            emit(g, report_csv_of_metrics({{"pi_poly", r.pi_poly},
                                           {"pi_check", r.pi_check},
                                           {"constant", r.constant},
                                           {"left_ok", r.left_ok ? 1.0 : 0.0},
                                           {"polarization_ok", r.polarization_ok ? 1.0 : 0.0}}));
        else
            emit(g, mpoly::dump_json(mpoly::pi_chain_to_json(r)));
        return r.left_ok && r.polarization_ok ? 0 : 1;
    }
    const mpoly::SummingReport r = mpoly::pi_lower_estimate(poly, triple, trials, g.seed, mode, opts);
    if (g.format == "csv") {
        std::string csv = "trial,ratio\n";
        for (std::size_t i = 0; i < r.trial_ratios.size(); ++i)
            csv += std::to_string(i) + "," + format_g17(r.trial_ratios[i]) + "\n";
        emit(g, csv);
    } else {
        emit(g, mpoly::dump_json(mpoly::summing_report_to_json(r)));
    }
    return 0;
}

int run_report(const GlobalOpts& g, const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir) || !fs::is_directory(dir))
        throw mpoly::Error("report: '" + dir + "' is not a directory");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    struct Row {
        std::string file, report_type, metric;
        double value;
    };
    std::vector<Row> rows;
    for (const fs::path& path : paths) {
        mpoly::Json j = mpoly::Json::parse(mpoly::read_file(path.string()), nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("report_type")) continue;
        const std::string type = j["report_type"].get<std::string>();
        std::string metric;
        double value = 0.0;
        if (type == "norm" && j.contains("lower")) {
            metric = "lower";
            value = j["lower"].get<double>();
        } else if (type == "norm_chain" && j.contains("slack")) {
            metric = "slack";
            value = j["slack"].get<double>();
        } else if (type == "norm_bracket" && j.contains("upper")) {
            metric = "upper";
            value = j["upper"].get<double>();
        } else if (type == "summing" && j.contains("c_lower")) {
            metric = "c_lower";
            value = j["c_lower"].get<double>();
        } else if (type == "summing_chain" && j.contains("pi_check")) {
            metric = "pi_check";
            value = j["pi_check"].get<double>();
        } else if (type == "verify" && j.contains("pass")) {
            metric = "pass";
            value = j["pass"].get<bool>() ? 1.0 : 0.0;
        } else {
            continue;
        }
        rows.push_back({path.filename().string(), type, metric, value});
    }

    if (g.format == "csv") {
        std::string csv = "file,report_type,metric,value\n";
        for (const Row& r : rows)
            csv += r.file + "," + r.report_type + "," + r.metric + "," + format_g17(r.value) + "\n";
        emit(g, csv);
    } else {
        mpoly::Json j;
        j["report_type"] = "aggregate";
        mpoly::Json out = mpoly::Json::array();
        for (const Row& r : rows)
            out.push_back({{"file", r.file},
                           {"report_type", r.report_type},
                           {"metric", r.metric},
                           {"value", r.value}});
        j["reports"] = out;
        emit(g, mpoly::dump_json(j));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite multipolynomial laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed (default 0)");
    app.add_option("--out", g.out, "output file (stdout when absent)");
    app.add_option("--format", g.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen", "generate a random tensor file");
    std::string gen_degrees, gen_dims;
    std::size_t gen_codomain = 1;
    gen->add_option("--degrees", gen_degrees, "per-block degrees, e.g. 2,2")->required();
    gen->add_option("--dims", gen_dims, "per-block dimensions, e.g. 2,2")->required();
    gen->add_option("--codomain", gen_codomain, "codomain dimension (default 1)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string verify_suite;
    int verify_trials = 100;
    double verify_tol = -1.0;
    verify->add_option("--suite", verify_suite, "polarization|symmetry|norm-chain|summing|seqclass|all")
        ->required();
    verify->add_option("--trials", verify_trials, "trials per check (default 100)");
    verify->add_option("--tol", verify_tol, "override per-check tolerances");

    auto* norm = app.add_subcommand("norm", "norm estimation for a tensor or polynomial file");
    std::string norm_in, norm_p = "2";
    double norm_q = 2.0, norm_grid = 0.0, norm_slack = 0.02;
    int norm_restarts = 32;
    bool norm_chain = false;
    norm->add_option("--in", norm_in, "input tensor/polynomial file")->required();
    norm->add_option("--p", norm_p, "per-block domain exponents, e.g. 2,2 or inf");
    norm->add_option("--q", norm_q, "codomain exponent (default 2)");
    norm->add_option("--restarts", norm_restarts, "ascent restarts (default 32)");
    norm->add_flag("--chain", norm_chain, "emit the polynomial/representative chain report");
    norm->add_option("--grid", norm_grid, "grid step in radians; emits a bracket");
    norm->add_option("--slack", norm_slack, "chain slack allowance (default 0.02)");

    auto* summing = app.add_subcommand("summing", "summing-constant estimation");
    std::string summing_in, summing_classes, summing_anchors = "origin", summing_instance;
    int summing_trials = 200, summing_max_len = 8;
    bool summing_chain = false;
    summing->add_option("--in", summing_in, "input tensor/polynomial file")->required();
    summing->add_option("--classes", summing_classes, "e.g. lp:2,lp:2->lp:1")->required();
    summing->add_option("--trials", summing_trials, "random instances (default 200)");
    summing->add_option("--anchors", summing_anchors, "origin or everywhere");
    summing->add_option("--max-len", summing_max_len, "max sequence length per instance");
    summing->add_flag("--chain", summing_chain, "emit the summing chain report");
    summing->add_option("--instance", summing_instance, "evaluate one saved instance file");

    auto* report = app.add_subcommand("report", "aggregate report files in a directory");
    std::string report_dir = ".";
    report->add_option("--dir", report_dir, "run directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen(g, gen_degrees, gen_dims, gen_codomain);
        if (verify->parsed()) return run_verify(g, verify_suite, verify_trials, verify_tol);
        if (norm->parsed())
            return run_norm(g, norm_in, norm_p, norm_q, norm_restarts, norm_chain, norm_grid,
                            norm_slack);
        if (summing->parsed())
            return run_summing(g, summing_in, summing_classes, summing_trials, summing_anchors,
                               summing_max_len, summing_chain, summing_instance);
        if (report->parsed()) return run_report(g, report_dir);
    } catch (const mpoly::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
