#pragma once

#include "qconvex/spectral_test.hpp"

namespace qconvex {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;  // degenerate-variance inputs count as a perfect fit
};

FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Total pipeline cost counters (oracle queries + primitives + degrees) for a
/// deterministic 2-sparse fixture run end to end: encoding construction plus
/// the power-method schedule on the shifted operator.
double pipeline_cost_total(int n, int p, int count, double delta, double eps,
                           std::uint64_t seed);

/// Classical dense-oracle FLOP estimate: N (p n^p + p^2 n^p).
double classical_flops(int n, int p, int count);

struct BenchRow {
    int n = 0;
    int count = 0;
    double pipeline_cost = 0.0;
    double classical = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> n_rows;
    std::vector<BenchRow> count_rows;
    double pipeline_exponent = 0.0;   // log-log slope in n
    double classical_exponent = 0.0;  // log-log slope in n
    double count_linear_r2 = 1.0;     // linear fit in N
    double count_slope = 0.0;
};

BenchReport run_bench(const std::vector<int>& n_grid, const std::vector<int>& count_grid,
                      int p, double delta, double eps, std::uint64_t seed);

}  // namespace qconvex
