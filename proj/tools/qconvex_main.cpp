// Command-line surface: convexity verdicts, Newton runs, approximation tables,
// and the pipeline-vs-classical cost comparison.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qconvex/bench.hpp"
#include "qconvex/io.hpp"

namespace {

using namespace qconvex;
using nlohmann::json;

constexpr int kExitConvex = 0;
constexpr int kExitNotConvex = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInput = 64;
constexpr int kExitCap = 65;
constexpr int kExitFailure = 70;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << std::endl;
        return;
    }
    // Write atomically: stage then rename.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw InputError("cannot write output file: " + path);
        out << text;
    }
    std::rename(tmp.c_str(), path.c_str());
}

PointSet resolve_points(const std::string& points_path, int sample_count,
                        std::uint64_t seed, const std::string& sample_mode, int n) {
    if (!points_path.empty()) return load_points_file(points_path);
    if (sample_count <= 0)
        throw InputError("either --points or --sample must be provided");
    SampleMode mode = SampleMode::UniformBall;
    if (sample_mode == "sphere") mode = SampleMode::OnSphere;
    else if (sample_mode != "ball") throw InputError("sample mode must be ball|sphere");
    return sample_points(n, sample_count, seed, mode);
}

int cmd_test_convexity(const std::string& spec_path, const std::string& points_path,
                       int sample_count, std::uint64_t seed, const std::string& sample_mode,
                       double delta, double eps, const std::string& mode,
                       const std::string& out_path, std::int64_t cap) {
    PolySpec spec = load_spec_file(spec_path);
    PointSet points = resolve_points(points_path, sample_count, seed, sample_mode, spec_n(spec));
    PipelineOptions opts;
    opts.eps = eps;
    opts.dense_cap = cap;
    const VerdictMode vmode = mode == "per-point" ? VerdictMode::PerPoint : VerdictMode::Multi;
    auto verdict = convexity_verdict(spec, points, delta, vmode, opts);
    write_output(out_path, verdict_to_json(verdict));
    switch (verdict.verdict) {
        case Verdict::Convex: return kExitConvex;
        case Verdict::NotConvex: return kExitNotConvex;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitFailure;
}

int cmd_newton(const std::string& spec_path, const std::string& x0_json, double eta,
               int steps, double grad_tol, const std::string& out_path, double eps) {
    PolySpec spec = load_spec_file(spec_path);
    json j = json::parse(x0_json, nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw InputError("--x0 must be a JSON array");
    Vec x0(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) x0[i] = j[i].get<double>();
    NewtonConfig cfg;
    cfg.eta = eta;
    cfg.max_steps = steps;
    cfg.grad_tol = grad_tol;
    cfg.pipeline.eps = eps;
    auto trace = newton_run(spec, x0, cfg);
    write_output(out_path, trace_to_json_lines(trace));
    if (trace.diverged) {
        std::cerr << "newton: diverged: " << trace.divergence_reason << "\n";
        return kExitFailure;
    }
    return 0;
}

int cmd_approx_table(const std::vector<double>& deltas, const std::vector<double>& epss,
                     const std::string& out_path) {
    std::ostringstream os;
    os << "target,c,delta,eps,degree,measured_error\n";
    for (const char* target : {"pos_power", "neg_power"}) {
        for (double c : {0.5, 1.0}) {
            if (std::string(target) == "pos_power" && c > 1.0) continue;
            for (double d : deltas)
                for (double e : epss) {
                    try {
                        auto poly = std::string(target) == "pos_power"
                                        ? approx_positive_power(c, d, e)
                                        : approx_negative_power(c, d, e);
                        os << target << "," << c << "," << d << "," << e << ","
                           << poly.degree << "," << poly.sup_error << "\n";
                    } catch (const ApproximationError& ex) {
                        os << target << "," << c << "," << d << "," << e << ",-1,FAILED\n";
                    }
                }
        }
    }
    write_output(out_path, os.str());
    return 0;
}

int cmd_bench(const std::vector<int>& n_grid, const std::vector<int>& count_grid, int p,
              double delta, double eps, std::uint64_t seed, const std::string& out_path) {
    const auto bench = run_bench(n_grid, count_grid, p, delta, eps, seed);
    json report;
    for (const auto& row : bench.n_rows)
        report["n_scaling"]["rows"].push_back({{"n", row.n},
                                               {"pipeline_cost", row.pipeline_cost},
                                               {"classical_flops", row.classical}});
    report["n_scaling"]["pipeline_exponent"] = bench.pipeline_exponent;
    report["n_scaling"]["classical_exponent"] = bench.classical_exponent;
    for (const auto& row : bench.count_rows)
        report["N_scaling"]["rows"].push_back(
            {{"N", row.count}, {"pipeline_cost", row.pipeline_cost}});
    report["N_scaling"]["linear_r_squared"] = bench.count_linear_r2;
    report["N_scaling"]["slope"] = bench.count_slope;
    report["params"] = {{"p", p}, {"delta", delta}, {"eps", eps}, {"seed", seed}};
    write_output(out_path, report.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale simulator for block-encoded Hessian convexity testing"};
    app.require_subcommand(1);

    std::string spec_path, points_path, out_path, mode = "multi", sample_mode = "ball";
    std::string x0_json = "[]";
    int sample_count = 0, steps = 10, p = 2;
    std::uint64_t seed = 1;
    double delta = 0.01, eps = 1e-6, eta = 0.5, grad_tol = 1e-9;
    std::int64_t cap = 65536;
    std::vector<double> deltas = {0.2, 0.1, 0.05};
    std::vector<double> epss = {1e-2, 1e-3};
    std::vector<int> n_grid = {2, 4, 8, 16};
    std::vector<int> count_grid = {2, 4, 8};

    auto* conv = app.add_subcommand("test-convexity", "Convexity verdict over sample points");
    conv->add_option("--spec", spec_path, "spec JSON path")->required();
    conv->add_option("--points", points_path, "points JSON path");
    conv->add_option("--sample", sample_count, "sample N points instead of --points");
    conv->add_option("--seed", seed, "sampler seed");
    conv->add_option("--sample-mode", sample_mode, "ball|sphere");
    conv->add_option("--delta", delta, "eigenvalue accuracy");
    conv->add_option("--eps", eps, "encoding accuracy");
    conv->add_option("--mode", mode, "multi|per-point");
    conv->add_option("--out", out_path, "verdict JSON output path");
    conv->add_option("--cap", cap, "dense dimension cap");

    auto* newt = app.add_subcommand("newton", "Improved Newton iteration");
    newt->add_option("--spec", spec_path, "spec JSON path")->required();
    newt->add_option("--x0", x0_json, "start point as JSON array")->required();
    newt->add_option("--eta", eta, "step size");
    newt->add_option("--steps", steps, "max steps");
    newt->add_option("--grad-tol", grad_tol, "gradient stop tolerance");
    newt->add_option("--eps", eps, "encoding accuracy");
    newt->add_option("--out", out_path, "trace JSON-lines output path");

    auto* approx = app.add_subcommand("approx-table", "Polynomial approximant table");
    approx->add_option("--deltas", deltas, "domain floors");
    approx->add_option("--epss", epss, "target accuracies");
    approx->add_option("--out", out_path, "CSV output path");

    auto* bench = app.add_subcommand("bench", "Cost-counter scaling report");
    bench->add_option("--n-grid", n_grid, "variable counts");
    bench->add_option("--N-grid", count_grid, "sample point counts");
    bench->add_option("--p", p, "half degree");
    bench->add_option("--delta", delta, "eigenvalue accuracy");
    bench->add_option("--eps", eps, "encoding accuracy");
    bench->add_option("--seed", seed, "sampler seed");
    bench->add_option("--out", out_path, "report JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (conv->parsed())
            return cmd_test_convexity(spec_path, points_path, sample_count, seed, sample_mode,
                                      delta, eps, mode, out_path, cap);
        if (newt->parsed())
            return cmd_newton(spec_path, x0_json, eta, steps, grad_tol, out_path, eps);
        if (approx->parsed()) return cmd_approx_table(deltas, epss, out_path);
        if (bench->parsed())
            return cmd_bench(n_grid, count_grid, p, delta, eps, seed, out_path);
    } catch (const DimensionCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
