#include "doctest.h"
#include "fixtures.hpp"
#include "qconvex/spectral_test.hpp"

using namespace qconvex;
using namespace qconvex::testfix;

TEST_CASE("power_method_max on known spectra") {
    EncodedOperator a;
    a.block = Vec((Vec(2) << 0.9, 0.1).finished()).asDiagonal();
    CHECK(power_method_max(a, 0.01, 7) == doctest::Approx(0.9).epsilon(0.012));

    // Scaled projector.
    Vec v(3);
    v << 2.0, -1.0, 0.5;
    v.normalize();
    EncodedOperator proj;
    proj.block = 0.7 * v * v.transpose();
    CHECK(power_method_max(proj, 0.01, 3) == doctest::Approx(0.7).epsilon(0.015));
}

TEST_CASE("power method agrees with the dense eigensolver on random PSD fixtures") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 63);
        Mat m = random_symmetric_contraction(dim, rng, 1.0);
        Eigen::SelfAdjointEigenSolver<Mat> eig(m);
        // PSD with spectrum in (0, 1): squash into [0.05, 0.95].
        Vec vals = eig.eigenvalues();
        const double lo = vals.minCoeff(), hi = vals.maxCoeff();
        for (Eigen::Index i = 0; i < vals.size(); ++i)
            vals[i] = 0.05 + 0.9 * (vals[i] - lo) / std::max(hi - lo, 1e-12);
        EncodedOperator a;
        a.block = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
        const double est = power_method_max(a, 1e-2, 1000 + trial);
        CHECK(std::abs(est - vals.maxCoeff()) <= 1e-2);
    }
}

TEST_CASE("power method charges the full iteration schedule") {
    EncodedOperator a;
    a.block = 0.5 * Mat::Identity(8, 8);
    a.cost.primitive_ops = 10;
    Cost cost;
    power_method_max(a, 0.01, 1, &cost);
    const double schedule = std::ceil(100.0 * (std::log(100.0) + 0.5 * std::log(8.0)));
    CHECK(cost.primitive_ops == doctest::Approx(10.0 * schedule + schedule));
}

TEST_CASE("min_eigenvalue_magnitude") {
    EncodedOperator a;
    a.block = Vec((Vec(2) << 6.0 / 8.0, 2.0 / 8.0).finished()).asDiagonal();
    CHECK(min_eigenvalue_magnitude(a, 1e-3) == doctest::Approx(0.25).epsilon(0.02));

    auto id = encode_identity(3);
    CHECK(min_eigenvalue_magnitude(id, 1e-3) == doctest::Approx(1.0).epsilon(0.01));

    std::mt19937_64 rng(5);
    Mat m = random_symmetric_contraction(8, rng, 0.12);
    EncodedOperator b;
    b.block = m;
    Eigen::SelfAdjointEigenSolver<Mat> eig(m);
    double truth = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 8; ++i) truth = std::min(truth, std::abs(eig.eigenvalues()[i]));
    CHECK(std::abs(min_eigenvalue_magnitude(b, 1e-4, 5) - truth) <= 2e-3);
}

TEST_CASE("direct-sum spectrum is the union of block spectra") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const int blocks = 2 + static_cast<int>(rng() % 3);
        const int bdim = 2 + static_cast<int>(rng() % 4);
        Mat sum = Mat::Zero(blocks * bdim, blocks * bdim);
        std::vector<double> expected;
        for (int b = 0; b < blocks; ++b) {
            Mat m = random_symmetric_contraction(bdim, rng, 0.5);
            sum.block(b * bdim, b * bdim, bdim, bdim) = m;
            Eigen::SelfAdjointEigenSolver<Mat> eig(m);
            for (Eigen::Index i = 0; i < bdim; ++i) expected.push_back(eig.eigenvalues()[i]);
        }
        Eigen::SelfAdjointEigenSolver<Mat> eig(sum);
        std::sort(expected.begin(), expected.end());
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
            CHECK(eig.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-10));
    }
}

TEST_CASE("shift_operator: spectrum arithmetic on the quartic fixture") {
    // H = diag(6,2) at (1,0): the validated bound is the measured norm 6, so
    // the shifted support spectrum is {(1-6/6)/2, (1-2/6)/2} with max 1/3.
    PolySpec quart = spec_quartic_radial();
    Vec e1(2);
    e1 << 1.0, 0.0;
    PipelineOptions opts;
    opts.eps = 1e-9;
    auto mp = single_point_hessian(quart, e1, opts);
    CHECK(mp.shift_bound == doctest::Approx(6.0).epsilon(1e-5));
    ScaleLedger ledger;
    auto shifted = shift_operator(mp, &ledger, opts);
    const double q = ledger.factors.front().second;
    const double raw = power_method_max(shifted, q * 1e-3, 17);
    const double unscaled = raw / (2.0 * q);
    CHECK(unscaled == doctest::Approx(1.0 / 3.0).epsilon(2e-3));
}

TEST_CASE("convexity_verdict on the figure functions") {
    PipelineOptions opts;
    opts.eps = 1e-6;

    // f = x^2 over {+-0.9, +-0.3}: convex.
    PolySpec sq = spec_x_squared();
    auto points_a = make_point_set({Vec::Constant(1, 0.9), Vec::Constant(1, -0.9),
                                    Vec::Constant(1, 0.3), Vec::Constant(1, -0.3)});
    auto va = convexity_verdict(sq, points_a, 0.01, VerdictMode::Multi, opts);
    CHECK(va.verdict == Verdict::Convex);
    CHECK(va.lambda_min_est > 0.0);

    // f = -x^2 + 3x over {0.1..0.9}: not convex.
    PolySpec concave = spec_concave_fig1b();
    std::vector<Vec> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(Vec::Constant(1, i / 10.0));
    auto vb = convexity_verdict(concave, make_point_set(grid), 0.01, VerdictMode::Multi, opts);
    CHECK(vb.verdict == Verdict::NotConvex);
    CHECK(vb.lambda_min_est < 0.0);

    // f = x^3 - 2x: convex on (0,1], not convex once a negative point is added.
    PolySpec cubic = spec_cubic_fig1c();
    std::vector<Vec> pos;
    for (double v : {0.2, 0.4, 0.6, 0.9}) pos.push_back(Vec::Constant(1, v));
    auto vc = convexity_verdict(cubic, make_point_set(pos), 0.01, VerdictMode::Multi, opts);
    CHECK(vc.verdict == Verdict::Convex);

    std::vector<Vec> mixed = pos;
    mixed.push_back(Vec::Constant(1, -0.5));
    auto vd = convexity_verdict(cubic, make_point_set(mixed), 0.01, VerdictMode::Multi, opts);
    CHECK(vd.verdict == Verdict::NotConvex);

    // f = x^2 + xy + y^2 over ball samples: convex.
    PolySpec fig2 = spec_fig2();
    auto ball = sample_points(2, 8, 3, SampleMode::UniformBall);
    auto ve = convexity_verdict(fig2, ball, 0.01, VerdictMode::Multi, opts);
    CHECK(ve.verdict == Verdict::Convex);
}

TEST_CASE("per-point mode reports each sample") {
    PipelineOptions opts;
    opts.eps = 1e-6;
    PolySpec cubic = spec_cubic_fig1c();
    std::vector<Vec> pts = {Vec::Constant(1, 0.5), Vec::Constant(1, -0.5)};
    auto v = convexity_verdict(cubic, make_point_set(pts), 0.01, VerdictMode::PerPoint, opts);
    REQUIRE(v.per_point.size() == 2);
    // H = 6x: +3 at 0.5, -3 at -0.5.
    CHECK(v.per_point[0].second > 0.0);
    CHECK(v.per_point[1].second < 0.0);
    CHECK(v.verdict == Verdict::NotConvex);
}

TEST_CASE("threshold soundness on random PSD and indefinite fixtures") {
    std::mt19937_64 rng(79);
    PipelineOptions opts;
    opts.eps = 1e-6;
    for (int trial = 0; trial < 5; ++trial) {
        // PSD quadratic: A = Q Q^T scaled, p = 1.
        const int n = 2 + static_cast<int>(rng() % 3);
        Mat q = random_symmetric_contraction(n, rng, 0.5);
        Mat psd = q * q.transpose() + 0.05 * Mat::Identity(n, n);
        std::vector<SparseEntry> entries;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (psd(i, j) != 0.0) entries.push_back(SparseEntry{{i}, {j}, psd(i, j)});
        PolySpec spec = HomogeneousSpec::load(n, 1, entries);
        std::vector<Vec> pts;
        for (int i = 0; i < 3; ++i) pts.push_back(random_point(n, rng, 0.9));
        auto verdict = convexity_verdict(spec, make_point_set(pts), 0.01, VerdictMode::Multi, opts);
        CHECK(verdict.verdict != Verdict::NotConvex);
    }
    for (int trial = 0; trial < 5; ++trial) {
        // Indefinite quadratic with a clearly negative eigenvalue.
        const int n = 2 + static_cast<int>(rng() % 3);
        Mat q = random_symmetric_contraction(n, rng, 0.4);
        q(0, 0) -= 1.0;
        q(1, 1) += 0.8;
        std::vector<SparseEntry> entries;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (q(i, j) != 0.0) entries.push_back(SparseEntry{{i}, {j}, q(i, j)});
        PolySpec spec = HomogeneousSpec::load(n, 1, entries);
        std::vector<Vec> pts;
        for (int i = 0; i < 3; ++i) pts.push_back(random_point(n, rng, 0.9));
        auto verdict = convexity_verdict(spec, make_point_set(pts), 0.01, VerdictMode::Multi, opts);
        CHECK(verdict.verdict == Verdict::NotConvex);
    }
}

TEST_CASE("monotone accuracy: halving delta never flips NotConvex to Convex") {
    PipelineOptions opts;
    opts.eps = 1e-6;
    PolySpec concave = spec_concave_fig1b();
    std::vector<Vec> grid;
    for (int i = 1; i <= 5; ++i) grid.push_back(Vec::Constant(1, i / 6.0));
    auto points = make_point_set(grid);
    Verdict prev = Verdict::NotConvex;
    for (double delta : {0.04, 0.02, 0.01, 0.005}) {
        auto v = convexity_verdict(concave, points, delta, VerdictMode::Multi, opts);
        if (prev == Verdict::NotConvex) CHECK(v.verdict == Verdict::NotConvex);
        prev = v.verdict;
    }
}

TEST_CASE("purely linear specs are convex with zero Hessian") {
    InhomoTerm lin;
    lin.c = (Vec(2) << 1.0, 1.0).finished();
    PolySpec spec = InhomogeneousSpec::load(2, {lin});
    auto points = make_point_set({(Vec(2) << 0.5, 0.0).finished()});
    auto v = convexity_verdict(spec, points, 0.01, VerdictMode::Multi);
    CHECK(v.verdict == Verdict::Convex);
    CHECK(v.lambda_min_est == 0.0);
}

TEST_CASE("verdict consistency fields") {
    PipelineOptions opts;
    opts.eps = 1e-6;
    PolySpec sq = spec_x_squared();
    auto points = make_point_set({Vec::Constant(1, 0.7)});
    auto v = convexity_verdict(sq, points, 0.01, VerdictMode::Multi, opts);
    CHECK(v.raw_max_est >= 0.0);
    CHECK(v.raw_max_est <= 1.0);
    CHECK(v.tolerance > 0.0);
    CHECK(v.cost.primitive_ops > 0.0);
    if (v.verdict == Verdict::Convex) CHECK(v.lambda_min_est >= -v.tolerance);
}
