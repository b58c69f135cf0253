#include "qconvex/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qconvex {
namespace {

using nlohmann::json;

json parse_or_throw(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("malformed JSON");
    return j;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected a JSON array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError("expected a JSON array of numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a JSON matrix");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InputError("ragged JSON matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

PolySpec parse_spec_json(const std::string& text) {
    json j = parse_or_throw(text);
    if (!j.is_object() || !j.contains("kind")) throw InputError("spec JSON needs a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "homogeneous") {
        if (!j.contains("n") || !j.contains("p") || !j.contains("entries"))
            throw InputError("homogeneous spec needs n, p, entries");
        const int n = j["n"].get<int>();
        const int p = j["p"].get<int>();
        std::vector<SparseEntry> entries;
        for (const auto& e : j["entries"]) {
            SparseEntry entry;
            for (const auto& v : e.at("row")) entry.row.push_back(v.get<int>());
            for (const auto& v : e.at("col")) entry.col.push_back(v.get<int>());
            entry.val = e.at("val").get<double>();
            entries.push_back(std::move(entry));
        }
        return HomogeneousSpec::load(n, p, std::move(entries));
    }
    if (kind == "inhomogeneous") {
        if (!j.contains("n") || !j.contains("terms"))
            throw InputError("inhomogeneous spec needs n and terms");
        const int n = j["n"].get<int>();
        std::vector<InhomoTerm> terms;
        for (const auto& t : j["terms"]) {
            InhomoTerm term;
            term.coeff = t.value("coeff", 1.0);
            if (t.contains("c") && !t["c"].is_null()) term.c = vec_from_json(t["c"]);
            if (t.contains("B"))
                for (const auto& b : t["B"]) term.bs.push_back(mat_from_json(b));
            terms.push_back(std::move(term));
        }
        return InhomogeneousSpec::load(n, std::move(terms));
    }
    throw InputError("unknown spec kind: " + kind);
}

PolySpec load_spec_file(const std::string& path) { return parse_spec_json(read_file(path)); }

PointSet parse_points_json(const std::string& text) {
    json j = parse_or_throw(text);
    if (!j.is_object() || !j.contains("points")) throw InputError("points JSON needs points");
    std::vector<Vec> pts;
    for (const auto& p : j["points"]) pts.push_back(vec_from_json(p));
    return make_point_set(std::move(pts));
}

PointSet load_points_file(const std::string& path) {
    return parse_points_json(read_file(path));
}

std::string cost_to_json(const Cost& cost) {
    json j = {{"oracle_queries", cost.oracle_queries},
              {"primitive_ops", cost.primitive_ops},
              {"qsvt_degree_total", cost.qsvt_degree_total},
              {"ancillas_peak", cost.ancillas_peak}};
    return j.dump();
}

std::string verdict_to_json(const ConvexityVerdict& verdict) {
    json per_point = json::array();
    for (const auto& [idx, lambda] : verdict.per_point)
        per_point.push_back({{"point", idx}, {"lambda_min_est", lambda}});
    json j = {{"verdict", to_string(verdict.verdict)},
              {"lambda_min_est", verdict.lambda_min_est},
              {"raw_max_est", verdict.raw_max_est},
              {"unscaled_max", verdict.unscaled_max},
              {"shift_bound", verdict.shift_bound},
              {"tolerance", verdict.tolerance},
              {"per_point", per_point},
              {"cost", json::parse(cost_to_json(verdict.cost))}};
    return j.dump(2);
}

std::string big_operator_to_json(const BigOperator& op) {
    json entries = json::array();
    for (const auto& e : op.entries)
        entries.push_back({{"row", e.row}, {"col", e.col}, {"val", e.val}});
    json j = {{"n", op.n}, {"p", op.p}, {"nnz", op.nnz()}, {"entries", entries}};
    return j.dump();
}

std::string encoding_summary_json(const EncodedOperator& enc) {
    json j = {{"dim", enc.dim()},
              {"alpha", enc.alpha},
              {"eps", enc.eps},
              {"ancillas", enc.ancillas},
              {"cost", json::parse(cost_to_json(enc.cost))}};
    return j.dump();
}

std::string trace_to_json_lines(const NewtonTrace& trace) {
    std::ostringstream os;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& rec = trace.steps[i];
        json x = json::array();
        for (Eigen::Index k = 0; k < rec.x.size(); ++k) x.push_back(rec.x[k]);
        json cx = json::array();
        if (i < trace.classical.size())
            for (Eigen::Index k = 0; k < trace.classical[i].size(); ++k)
                cx.push_back(trace.classical[i][k]);
        json line = {{"step", rec.step},          {"x", x},
                     {"classical_x", cx},         {"grad_norm", rec.grad_norm},
                     {"f", rec.f_value},          {"kappa", rec.kappa},
                     {"gamma_scale", rec.gamma_scale}};
        os << line.dump() << "\n";
    }
    json tail = {{"converged", trace.converged},
                 {"diverged", trace.diverged},
                 {"reason", trace.divergence_reason},
                 {"cost", json::parse(cost_to_json(trace.cost))}};
    os << tail.dump() << "\n";
    return os.str();
}

}  // namespace qconvex
