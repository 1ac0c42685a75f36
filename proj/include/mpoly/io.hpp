#pragma once

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpoly/errors.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/norms.hpp"
#include "mpoly/polynomial.hpp"
#include "mpoly/seqclass.hpp"
#include "mpoly/summing.hpp"
#include "mpoly/verify.hpp"

namespace mpoly {

// nlohmann's default object keeps keys sorted, which makes every dump
// deterministic; all emitters below rely on that.
using Json = nlohmann::json;

inline Json encode_exponent(double p) {
    if (p == kInf) return Json("inf");
    return Json(p);
}

inline double decode_exponent(const Json& j, const std::string& what) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw IoError(what + ": unknown exponent string '" + j.get<std::string>() + "'");
    }
    if (!j.is_number()) throw IoError(what + ": expected a number or \"inf\"");
    return j.get<double>();
}

// ---- tensor and polynomial files ----

inline Json tensor_to_json(const MultilinearMap& t) {
    Json j;
    j["version"] = 1;
    j["scalar"] = "f64";
    j["m"] = t.shape.block_count();
    j["degrees"] = t.shape.degrees;
    j["dims"] = t.shape.dims;
    j["codomain_dim"] = t.shape.codomain_dim;
    j["coeffs"] = t.coeffs;
    return j;
}

inline MultilinearMap tensor_from_json(const Json& j, std::size_t coeff_cap = kDefaultCoeffCap) {
    if (!j.is_object()) throw IoError("tensor file: expected a JSON object");
    for (const char* field : {"version", "scalar", "m", "degrees", "dims", "codomain_dim", "coeffs"})
        if (!j.contains(field)) throw IoError(std::string("tensor file: missing field '") + field + "'");
    if (j["version"] != 1) throw IoError("tensor file: unsupported version");
    if (j["scalar"] != "f64") throw IoError("tensor file: unsupported scalar type");
    BlockShape shape;
    try {
        shape.degrees = j["degrees"].get<std::vector<std::size_t>>();
        shape.dims = j["dims"].get<std::vector<std::size_t>>();
        shape.codomain_dim = j["codomain_dim"].get<std::size_t>();
    } catch (const Json::exception& e) {
        throw IoError(std::string("tensor file: malformed shape: ") + e.what());
    }
    if (!j["m"].is_number_unsigned() || j["m"].get<std::size_t>() != shape.degrees.size())
        throw IoError("tensor file: field 'm' disagrees with 'degrees'");
    std::vector<double> coeffs;
    try {
        coeffs = j["coeffs"].get<std::vector<double>>();
    } catch (const Json::exception& e) {
        throw IoError(std::string("tensor file: malformed coefficients: ") + e.what());
    }
    return make_multilinear(std::move(shape), std::move(coeffs), coeff_cap);
}

inline Json poly_to_json(const Multipolynomial& p) {
    Json j = tensor_to_json(p.rep);
    j["canonical"] = p.canonical;
    return j;
}

// Accepts plain tensor files too: the tensor is then wrapped via hat().  A
// stored canonical flag is verified, not trusted.
inline Multipolynomial poly_from_json(const Json& j, std::size_t coeff_cap = kDefaultCoeffCap) {
    MultilinearMap rep = tensor_from_json(j, coeff_cap);
    if (!j.contains("canonical")) return hat(std::move(rep));
    if (!j["canonical"].is_boolean()) throw IoError("polynomial file: 'canonical' must be a boolean");
    const bool claimed = j["canonical"].get<bool>();
    if (claimed && !is_block_symmetric(rep))
        throw IoError("polynomial file: canonical flag set but the representative is not block-symmetric");
    return Multipolynomial{std::move(rep), claimed};
}

// ---- sequence files ----

inline Json sequence_to_json(const FiniteSequence& s) {
    Json j;
    j["dim"] = s.dim;
    j["space_p"] = encode_exponent(s.space_p);
    j["entries"] = s.entries;
    return j;
}

inline FiniteSequence sequence_from_json(const Json& j) {
    if (!j.is_object()) throw IoError("sequence file: expected a JSON object");
    for (const char* field : {"dim", "space_p", "entries"})
        if (!j.contains(field)) throw IoError(std::string("sequence file: missing field '") + field + "'");
    FiniteSequence s;
    try {
        s.dim = j["dim"].get<std::size_t>();
        s.space_p = decode_exponent(j["space_p"], "sequence file");
        s.entries = j["entries"].get<std::vector<std::vector<double>>>();
    } catch (const Json::exception& e) {
        throw IoError(std::string("sequence file: malformed: ") + e.what());
    }
    validate_sequence(s);
    return s;
}

// ---- report emitters ----

inline Json norm_report_to_json(const NormReport& r) {
    Json j;
    j["report_type"] = "norm";
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["argmax"] = r.argmax;
    j["restarts_used"] = r.restarts_used;
    j["converged"] = r.converged;
    return j;
}

inline Json chain_report_to_json(const ChainReport& r) {
    Json j;
    j["report_type"] = "norm_chain";
    j["poly_norm"] = norm_report_to_json(r.poly_norm);
    j["poly_norm"].erase("report_type");
    j["check_norm"] = norm_report_to_json(r.check_norm);
    j["check_norm"].erase("report_type");
    j["constant"] = r.constant;
    j["slack"] = r.slack;
    j["left_ok"] = r.left_ok;
    j["right_ok"] = r.right_ok;
    return j;
}

inline Json bracket_to_json(const NormBracket& b) {
    Json j;
    j["report_type"] = "norm_bracket";
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["grid_points"] = b.grid_points;
    j["exact"] = b.exact;
    return j;
}

inline Json summing_instance_to_json(const SummingInstance& inst) {
    Json j;
    j["anchor"] = inst.anchor;
    Json seqs = Json::array();
    for (const FiniteSequence& s : inst.sequences) seqs.push_back(sequence_to_json(s));
    j["sequences"] = seqs;
    return j;
}

inline SummingInstance summing_instance_from_json(const Json& j) {
    if (!j.is_object()) throw IoError("instance file: expected a JSON object");
    for (const char* field : {"anchor", "sequences"})
        if (!j.contains(field)) throw IoError(std::string("instance file: missing field '") + field + "'");
    SummingInstance inst;
    if (!j["anchor"].is_array()) throw IoError("instance file: 'anchor' must be an array of vectors");
    for (const Json& a : j["anchor"]) {
        if (!a.is_array()) throw IoError("instance file: each anchor must be an array of numbers");
        std::vector<double> v;
        for (const Json& x : a) {
            if (!x.is_number()) throw IoError("instance file: anchor entries must be numbers");
            v.push_back(x.get<double>());
        }
        inst.anchor.push_back(std::move(v));
    }
    if (!j["sequences"].is_array()) throw IoError("instance file: 'sequences' must be an array");
    for (const Json& s : j["sequences"]) inst.sequences.push_back(sequence_from_json(s));
    return inst;
}

inline Json summing_report_to_json(const SummingReport& r) {
    Json j;
    j["report_type"] = "summing";
    j["ratio"] = r.ratio;
    j["c_lower"] = r.c_lower;
    j["best_instance"] = summing_instance_to_json(r.best_instance);
    j["trials"] = r.trials;
    j["estimate_flags"] = r.estimate_flags;
    j["trial_ratios"] = r.trial_ratios;
    return j;
}

inline Json pi_chain_to_json(const PiChainReport& r) {
    Json j;
    j["report_type"] = "summing_chain";
    j["pi_poly"] = r.pi_poly;
    j["pi_check"] = r.pi_check;
    j["constant"] = r.constant;
    j["left_ok"] = r.left_ok;
    j["polarization_ok"] = r.polarization_ok;
    j["worst_polarization_excess"] = r.worst_polarization_excess;
    j["poly_samples"] = r.poly_samples;
    j["check_samples"] = r.check_samples;
    j["estimate_flags"] = r.estimate_flags;
    return j;
}

// ---- files ----

inline Json suite_to_json(const SuiteResult& suite) {
    Json checks = Json::array();
    for (const CheckResult& c : suite.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}});
    return {{"report_type", "verify"},
            {"suite", suite.suite},
            {"pass", suite.pass()},
            {"checks", checks}};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("error while reading '" + path + "'");
    return buf.str();
}

// Write-then-rename so a failed run never leaves a partial file behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out.good()) throw IoError("error while writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + std::strerror(errno));
    }
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError(what + ": not valid JSON");
    return j;
}

inline MultilinearMap load_tensor(const std::string& path, std::size_t cap = kDefaultCoeffCap) {
    return tensor_from_json(parse_json(read_file(path), path), cap);
}

inline Multipolynomial load_poly(const std::string& path, std::size_t cap = kDefaultCoeffCap) {
    return poly_from_json(parse_json(read_file(path), path), cap);
}

inline FiniteSequence load_sequence(const std::string& path) {
    return sequence_from_json(parse_json(read_file(path), path));
}

inline void save_json(const std::string& path, const Json& j) {
    write_file_atomic(path, dump_json(j));
}

}  // namespace mpoly
