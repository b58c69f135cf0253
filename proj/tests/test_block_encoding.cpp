#include "doctest.h"
#include "fixtures.hpp"
#include "qconvex/block_encoding.hpp"

using namespace qconvex;
using namespace qconvex::testfix;

TEST_CASE("encode_identity") {
    CHECK(encode_identity(1).block(0, 0) == doctest::Approx(1.0));
    auto id4 = encode_identity(4);
    CHECK((id4.block - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(id4.alpha == 1.0);
    CHECK(id4.eps == 0.0);
}

TEST_CASE("encode_sparse: identity, M_D, and norm checks") {
    auto quart = spec_quartic_radial();  // A = I_4, s = 1
    auto enc = encode_sparse(as_operator(quart), 1e-8);
    CHECK(enc.alpha == doctest::Approx(1.0));
    CHECK((enc.block - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

    // M_D = 2 I_4 has row sparsity 1 but norm 2: at its raw sparsity the block
    // is infeasible, at the calculus budget s*p = 2 it encodes I_4 exactly.
    auto md = build_MD(quart);
    CHECK_THROWS_AS(encode_sparse(md, 1e-8), EncodingError);
    auto mdp = encode_sparse(md, 1e-8, 2.0);
    CHECK(mdp.alpha == doctest::Approx(2.0));
    CHECK((mdp.block - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

    auto spec = random_homogeneous(3, 2, 2, 5);
    auto e2 = encode_sparse(as_operator(spec), 1e-8);
    CHECK(spectral_norm_estimate(e2.block) <= 1.0 + 1e-9);
    CHECK(e2.alpha == doctest::Approx(double(as_operator(spec).row_sparsity())));
}

TEST_CASE("encode_density: product state, copied registers, Bell state") {
    // |0> (x) x for unit x: rho = x x^T.
    Vec x(2);
    x << 0.6, 0.8;
    Vec state = Vec::Zero(4);
    state.segment(0, 2) = x;
    auto enc = encode_density(state, 2);
    CHECK((enc.block - x * x.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(enc.alpha == 1.0);
    CHECK(enc.eps == 0.0);

    // Copied-register state (1/C) sum_j |j>|j> (x) x_j traced over the first
    // register gives (1/C^2) blocks of x_j x_j^T.
    std::vector<Vec> pts = {(Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 0.5).finished()};
    const double c2 = 1.25;
    Vec copied = Vec::Zero(2 * 2 * 2);
    for (int j = 0; j < 2; ++j)
        copied.segment(j * 4 + j * 2, 2) = pts[j] / std::sqrt(c2);
    auto multi = encode_density(copied, 2);
    Mat expect = Mat::Zero(4, 4);
    expect.block(0, 0, 2, 2) = pts[0] * pts[0].transpose() / c2;
    expect.block(2, 2, 2, 2) = pts[1] * pts[1].transpose() / c2;
    CHECK((multi.block - expect).cwiseAbs().maxCoeff() < 1e-14);

    // Bell-like state on 2x2 traces to I/2.
    Vec bell = Vec::Zero(4);
    bell[0] = 1.0 / std::sqrt(2.0);
    bell[3] = 1.0 / std::sqrt(2.0);
    auto rho = encode_density(bell, 2);
    CHECK((rho.block - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    Vec unnormalized = Vec::Constant(4, 1.0);
    CHECK_THROWS_AS(encode_density(unnormalized, 2), InputError);
}

TEST_CASE("product composes blocks, alphas, eps, costs") {
    auto a = encode_identity(2);
    auto b = encode_identity(2);
    a.alpha = 2.0;
    auto prod = product(a, b);
    CHECK((prod.block - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(prod.alpha == doctest::Approx(2.0));

    // Outer products: (x x^T)(c c^T) = (x^T c) x c^T.
    Vec x(2), c(2);
    x << 0.6, 0.8;
    c << 1.0, 0.0;
    EncodedOperator ex, ec;
    ex.block = x * x.transpose();
    ec.block = c * c.transpose();
    auto xc = product(ex, ec);
    CHECK((xc.block - 0.6 * x * c.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    // Direct sums multiply blockwise.
    Mat a1 = 0.3 * Mat::Identity(2, 2), a2 = 0.5 * Mat::Identity(2, 2);
    EncodedOperator da, db;
    da.block = Mat::Zero(4, 4);
    da.block.block(0, 0, 2, 2) = a1;
    da.block.block(2, 2, 2, 2) = a2;
    db.block = da.block;
    auto dd = product(da, db);
    CHECK(dd.block(0, 0) == doctest::Approx(0.09));
    CHECK(dd.block(2, 2) == doctest::Approx(0.25));

    CHECK_THROWS_AS(product(encode_identity(2), encode_identity(3)), InputError);

    // Cost additivity: one extra primitive per product.
    auto pa = encode_identity(2), pb = encode_identity(2);
    auto pc = product(pa, pb);
    CHECK(pc.cost.primitive_ops ==
          doctest::Approx(pa.cost.primitive_ops + pb.cost.primitive_ops + 1));
}

TEST_CASE("tensor") {
    Vec x(2);
    x << 0.6, 0.8;
    EncodedOperator ex;
    ex.block = x * x.transpose();
    auto two = tensor(ex, ex);
    CHECK((two.block - kron(ex.block, ex.block)).cwiseAbs().maxCoeff() < 1e-14);
    auto with_id = tensor(ex, encode_identity(3));
    CHECK((with_id.block - kron(ex.block, Mat::Identity(3, 3))).cwiseAbs().maxCoeff() < 1e-14);
    auto ids = tensor(encode_identity(2), encode_identity(2));
    CHECK((ids.block - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lcu_sum: cancellation, Hessian assembly shape, alpha policing") {
    EncodedOperator a, b;
    a.block = 0.4 * Mat::Identity(2, 2);
    b.block = 0.4 * Mat::Identity(2, 2);
    auto zero = lcu_sum({a, b}, {1, -1});
    CHECK(zero.block.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.alpha == doctest::Approx(2.0));

    // The (M_H + M_D)/(2 alpha_mid) assembly of the single-point construction:
    // encode both at their budgets, equalize alphas, then sum.
    auto quart = spec_quartic_radial();
    auto mh_op = build_MH(quart);
    const double budget_h = std::max(4.0, mh_op.max_abs_row_sum());  // 2 s p (p-1) floor
    const double alpha_mid = std::max(budget_h, 4.0);                // >= s p^2
    auto mh = encode_sparse(mh_op, 0.0, budget_h);
    auto md = encode_sparse(build_MD(quart), 0.0, 2.0);  // s p
    auto mh_eq = rescale_alpha(mh, alpha_mid);
    auto md_eq = rescale_alpha(md, alpha_mid);
    auto sum = lcu_sum({mh_eq, md_eq}, {1, 1});
    const Mat expect =
        (mh_op.to_dense() + build_MD(quart).to_dense()) / (2.0 * alpha_mid);
    CHECK((sum.block - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sum.alpha == doctest::Approx(2.0 * alpha_mid));

    CHECK_THROWS_AS(lcu_sum({mh_eq, md}, {1, 1}), InputError);
    auto three = lcu_sum({a, b, a}, {1, 1, 1});
    CHECK(three.alpha == doctest::Approx(3.0));
}

TEST_CASE("scale shrinks the represented operator") {
    auto id = encode_identity(3);
    auto same = scale(id, 1.0);
    CHECK((same.block - id.block).cwiseAbs().maxCoeff() == 0.0);
    auto half = scale(id, 0.5);
    CHECK(half.block(0, 0) == doctest::Approx(0.5));
    CHECK(half.alpha == doctest::Approx(id.alpha));
    CHECK_THROWS_AS(scale(id, 1.5), InputError);
    CHECK_THROWS_AS(scale(id, 0.0), InputError);
}

TEST_CASE("transpose") {
    Vec x(2), c(2);
    x << 0.6, 0.8;
    c << 1.0, 0.0;
    EncodedOperator xc;
    xc.block = x * c.transpose();
    auto cx = transpose(xc);
    CHECK((cx.block - c * x.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cx.block(0, 0) == doctest::Approx(0.6));
    CHECK(cx.block(0, 1) == doctest::Approx(0.8));
    auto sym = encode_identity(2);
    CHECK((transpose(sym).block - sym.block).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("amplify: removes known factors, rejects infeasible gains") {
    std::vector<Vec> pts = {(Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 0.5).finished()};
    EncodedOperator enc;
    enc.block = Mat::Zero(4, 4);
    enc.block.block(0, 0, 2, 2) = pts[0] * pts[0].transpose() / 1.25;
    enc.block.block(2, 2, 2, 2) = pts[1] * pts[1].transpose() / 1.25;
    auto up = amplify(enc, 1.25);
    CHECK((up.block.block(0, 0, 2, 2) - pts[0] * pts[0].transpose()).cwiseAbs().maxCoeff() <
          1e-14);

    auto same = amplify(enc, 1.0);
    CHECK((same.block - enc.block).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(amplify(up, 1.5), AmplificationError);
}

TEST_CASE("representation soundness of composites") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        EncodedOperator a, b;
        a.block = random_symmetric_contraction(3, rng, 0.3);
        b.block = random_symmetric_contraction(3, rng, 0.3);
        a.alpha = 1.5;
        b.alpha = 2.0;
        const Mat ta = a.alpha * a.block, tb = b.alpha * b.block;
        CHECK(((product(a, b).alpha * product(a, b).block) - ta * tb).cwiseAbs().maxCoeff() <
              1e-12);
        auto tt = tensor(a, b);
        CHECK((tt.alpha * tt.block - kron(ta, tb)).cwiseAbs().maxCoeff() < 1e-12);
        auto re = rescale_alpha(a, 4.0);
        CHECK((re.alpha * re.block - ta).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("error propagation is an upper bound under perturbation") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> mag(1e-6, 1e-3);
    for (int trial = 0; trial < 20; ++trial) {
        EncodedOperator a, b;
        a.block = random_symmetric_contraction(3, rng, 0.3);
        b.block = random_symmetric_contraction(3, rng, 0.3);
        a.alpha = 1.3;
        b.alpha = 1.7;
        const double delta = mag(rng);
        Mat noise = random_symmetric_contraction(3, rng, 1.0);
        noise *= delta / spectral_norm_estimate(noise);
        EncodedOperator b_noisy = b;
        b_noisy.block += noise;
        b_noisy.eps = b.alpha * delta;  // ||alpha block~ - T|| = alpha delta

        auto exact = product(a, b);
        auto noisy = product(a, b_noisy);
        const double true_err =
            spectral_norm_estimate(noisy.alpha * noisy.block - exact.alpha * exact.block);
        CHECK(true_err <= noisy.eps + 1e-12);

        auto texact = tensor(a, b);
        auto tnoisy = tensor(a, b_noisy);
        const double terr =
            spectral_norm_estimate(tnoisy.alpha * tnoisy.block - texact.alpha * texact.block);
        CHECK(terr <= tnoisy.eps + 1e-12);
    }
}

TEST_CASE("eps is monotone under composition") {
    EncodedOperator a, b;
    a.block = 0.2 * Mat::Identity(2, 2);
    b.block = 0.3 * Mat::Identity(2, 2);
    a.eps = 1e-5;
    b.eps = 2e-5;
    CHECK(product(a, b).eps >= std::max(a.eps, b.eps) - 1e-18);
    CHECK(lcu_sum({rescale_alpha(a, 1.0), rescale_alpha(b, 1.0)}, {1, 1}).eps ==
          doctest::Approx(2e-5));
}
