#include "qconvex/poly_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

namespace qconvex {
namespace {

std::int64_t linear_index(const std::vector<int>& multi, int n) {
    std::int64_t idx = 0;
    for (int v : multi) idx = idx * n + v;
    return idx;
}

void check_multi_index(const std::vector<int>& multi, int n, int p) {
    if (static_cast<int>(multi.size()) != p)
        throw InputError("multi-index length does not match p");
    for (int v : multi)
        if (v < 0 || v >= n) throw InputError("multi-index component out of range");
}

// Operator norm of the symmetric COO operator by power iteration on A^2.
double coo_spectral_norm(const std::vector<SparseEntry>& entries, int n, int p,
                         double tol = 1e-8) {
    const std::int64_t dim = ipow(n, p);
    std::vector<std::int64_t> rows(entries.size()), cols(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
        rows[e] = linear_index(entries[e].row, n);
        cols[e] = linear_index(entries[e].col, n);
    }
    auto apply = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
        for (std::size_t e = 0; e < entries.size(); ++e)
            w[rows[e]] += entries[e].val * v[cols[e]];
        return w;
    };
    Eigen::VectorXd v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v[i] = 1.0 + 0.31 * std::sin(double(i + 1));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd w = apply(apply(v));
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = std::sqrt(nw);
        w /= nw;
        if (it > 8 && std::abs(next - lambda) <= tol * std::max(1.0, next)) return next;
        lambda = next;
        v = w;
    }
    return lambda;
}

// Product over slots of x_{r_t} * x_{c_t} with zero bookkeeping so that
// "product excluding slot(s)" queries stay O(1).
struct SlotProducts {
    std::vector<double> g;  // g_t = x_{r_t} * x_{c_t}
    double nonzero_product = 1.0;
    int zero_count = 0;

    void build(const SparseEntry& e, const Vec& x) {
        const int p = static_cast<int>(e.row.size());
        g.resize(p);
        nonzero_product = 1.0;
        zero_count = 0;
        for (int t = 0; t < p; ++t) {
            g[t] = x[e.row[t]] * x[e.col[t]];
            if (g[t] == 0.0)
                ++zero_count;
            else
                nonzero_product *= g[t];
        }
    }
    double full() const { return zero_count == 0 ? nonzero_product : 0.0; }
    double excluding(int t) const {
        if (g[t] == 0.0) return zero_count == 1 ? nonzero_product : 0.0;
        return zero_count == 0 ? nonzero_product / g[t] : 0.0;
    }
    double excluding(int t, int u) const {
        const int zeros_in_pair = (g[t] == 0.0 ? 1 : 0) + (g[u] == 0.0 ? 1 : 0);
        if (zero_count > zeros_in_pair) return 0.0;
        double prod = nonzero_product;
        if (g[t] != 0.0) prod /= g[t];
        if (g[u] != 0.0) prod /= g[u];
        return prod;
    }
};

}  // namespace

HomogeneousSpec HomogeneousSpec::load(int n, int p, std::vector<SparseEntry> entries) {
    if (n < 1) throw InputError("n must be >= 1");
    if (p < 1) throw InputError("p must be >= 1");
    for (const auto& e : entries) {
        check_multi_index(e.row, n, p);
        check_multi_index(e.col, n, p);
    }

    // Symmetrize A <- (A + A^T)/2, merging duplicates.
    std::map<std::pair<std::int64_t, std::int64_t>, SparseEntry> merged;
    auto add = [&](const std::vector<int>& r, const std::vector<int>& c, double v) {
        if (v == 0.0) return;
        auto key = std::make_pair(linear_index(r, n), linear_index(c, n));
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, SparseEntry{r, c, v});
        else
            it->second.val += v;
    };
    for (const auto& e : entries) {
        add(e.row, e.col, e.val / 2.0);
        add(e.col, e.row, e.val / 2.0);
    }

    HomogeneousSpec spec;
    spec.n_ = n;
    spec.p_ = p;
    spec.entries_.reserve(merged.size());
    std::map<std::int64_t, int> row_counts;
    for (auto& [key, e] : merged) {
        if (e.val == 0.0) continue;
        ++row_counts[key.first];
        spec.entries_.push_back(std::move(e));
    }
    spec.sparsity_ = 0;
    for (const auto& [row, cnt] : row_counts) spec.sparsity_ = std::max(spec.sparsity_, cnt);
    spec.sparsity_ = std::max(spec.sparsity_, 1);

    const double norm = coo_spectral_norm(spec.entries_, n, p);
    if (norm > 1.0) {
        for (auto& e : spec.entries_) e.val /= norm;
        spec.norm_scale_ = norm;
    }
    return spec;
}

InhomogeneousSpec InhomogeneousSpec::load(int n, std::vector<InhomoTerm> terms) {
    if (n < 1) throw InputError("n must be >= 1");
    InhomogeneousSpec spec;
    spec.n_ = n;
    for (auto& term : terms) {
        if (term.c) {
            if (term.c->size() != n) throw InputError("c dimension does not match n");
            const double cn = term.c->norm();
            if (cn == 0.0) throw InputError("c must be nonzero when present");
            term.coeff *= cn;
            *term.c /= cn;
        }
        for (auto& b : term.bs) {
            if (b.rows() != n || b.cols() != n) throw InputError("B dimension does not match n");
            if ((b - b.transpose()).cwiseAbs().maxCoeff() >
                1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
                throw InputError("B matrices must be symmetric");
            Mat sym = (b + b.transpose()) / 2.0;
            const double bn = spectral_norm_estimate(sym);
            if (bn > 1.0) {
                sym /= bn;
                term.coeff *= bn;
            }
            b = sym;
        }
        if (!term.c && term.bs.empty())
            throw InputError("constant terms are not representable; drop them "
                             "(convexity is invariant under constant shifts)");
        spec.terms_.push_back(std::move(term));
    }
    return spec;
}

int spec_n(const PolySpec& spec) {
    return std::visit([](const auto& s) { return s.n(); }, spec);
}

PointSet make_point_set(std::vector<Vec> points) {
    if (points.empty()) throw InputError("point set must contain at least one point");
    PointSet ps;
    ps.c_squared = 0.0;
    ps.x_min = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
        const double sq = x.squaredNorm();
        if (sq > 1.0 + 1e-12) throw InputError("points must satisfy |x| <= 1");
        if (sq < kPointNormFloor)
            throw InputError("point norm below floor; zero-norm points are rejected");
        ps.c_squared += sq;
        ps.x_min = std::min(ps.x_min, sq);
    }
    ps.c_norm = std::sqrt(ps.c_squared);
    ps.points = std::move(points);
    return ps;
}

PointSet sample_points(int n, int count, std::uint64_t seed, SampleMode mode,
                       const std::vector<Vec>* explicit_points) {
    if (count < 1) throw InputError("point count must be >= 1");
    if (mode == SampleMode::Explicit) {
        if (!explicit_points) throw InputError("explicit mode requires points");
        return make_point_set(*explicit_points);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> pts;
    pts.reserve(count);
    while (static_cast<int>(pts.size()) < count) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = gauss(rng);
        const double dn = x.norm();
        if (dn == 0.0) continue;
        x /= dn;
        if (mode == SampleMode::UniformBall) x *= std::pow(unif(rng), 1.0 / n);
        if (x.squaredNorm() < kPointNormFloor) continue;
        pts.push_back(std::move(x));
    }
    return make_point_set(std::move(pts));
}

double eval_homogeneous(const HomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    double acc = 0.0;
    SlotProducts sp;
    for (const auto& e : spec.entries()) {
        sp.build(e, x);
        acc += e.val * sp.full();
    }
    return 0.5 * acc * spec.norm_scale();
}

double term_h_value(const InhomoTerm& term, const Vec& x) {
    double prod = 1.0;
    for (const auto& b : term.bs) prod *= x.dot(b * x);
    return prod;
}

Vec term_h_gradient(const InhomoTerm& term, const Vec& x) {
    const int m = term.half_degree();
    Vec grad = Vec::Zero(x.size());
    for (int k = 0; k < m; ++k) {
        double rest = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != k) rest *= x.dot(term.bs[l] * x);
        grad += rest * 2.0 * (term.bs[k] * x);
    }
    return grad;
}

Mat term_h_hessian(const InhomoTerm& term, const Vec& x) {
    const int m = term.half_degree();
    const int n = static_cast<int>(x.size());
    Mat hess = Mat::Zero(n, n);
    std::vector<double> g(m);
    std::vector<Vec> bx(m);
    for (int k = 0; k < m; ++k) {
        bx[k] = term.bs[k] * x;
        g[k] = x.dot(bx[k]);
    }
    for (int k = 0; k < m; ++k) {
        double rest_k = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != k) rest_k *= g[l];
        hess += rest_k * 2.0 * term.bs[k];
        for (int l = 0; l < m; ++l) {
            if (l == k) continue;
            double rest_kl = 1.0;
            for (int q = 0; q < m; ++q)
                if (q != k && q != l) rest_kl *= g[q];
            hess += rest_kl * 4.0 * (bx[k] * bx[l].transpose());
        }
    }
    return (hess + hess.transpose()) / 2.0;
}

double eval_inhomogeneous(const InhomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    double acc = 0.0;
    for (const auto& term : spec.terms()) {
        const double linear = term.c ? term.c->dot(x) : 1.0;
        acc += term.coeff * linear * term_h_value(term, x);
    }
    return acc;
}

double eval(const PolySpec& spec, const Vec& x) {
    return std::visit(
        [&](const auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, HomogeneousSpec>)
                return eval_homogeneous(s, x);
            else
                return eval_inhomogeneous(s, x);
        },
        spec);
}

Vec gradient_analytic(const HomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    // D(x) x with the gradient operator contracted straight from the COO entries.
    const int p = spec.p();
    Vec grad = Vec::Zero(spec.n());
    SlotProducts sp;
    for (const auto& e : spec.entries()) {
        sp.build(e, x);
        for (int m = 0; m < p; ++m)
            grad[e.row[m]] += e.val * sp.excluding(m) * x[e.col[m]];
    }
    return grad * spec.norm_scale();
}

Vec gradient_analytic(const InhomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    Vec grad = Vec::Zero(spec.n());
    for (const auto& term : spec.terms()) {
        const Vec gh = term_h_gradient(term, x);
        if (term.c) {
            const double beta = term.c->dot(x);
            grad += term.coeff * (beta * gh + term_h_value(term, x) * (*term.c));
        } else {
            grad += term.coeff * gh;
        }
    }
    return grad;
}

Vec gradient_analytic(const PolySpec& spec, const Vec& x) {
    return std::visit([&](const auto& s) { return gradient_analytic(s, x); }, spec);
}

Mat hessian_analytic(const HomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    const int p = spec.p();
    const int n = spec.n();
    Mat hess = Mat::Zero(n, n);
    SlotProducts sp;
    for (const auto& e : spec.entries()) {
        sp.build(e, x);
        // D part: slot-diagonal contributions.
        for (int m = 0; m < p; ++m)
            hess(e.row[m], e.col[m]) += e.val * sp.excluding(m);
        // Second-derivative slot pairs. Two families survive the symmetric
        // folding: mixed row/col and row/row. They coincide only when A
        // factors into symmetric matrices, so both are kept explicitly.
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < p; ++k) {
                if (j == k) continue;
                const double rest = e.val * sp.excluding(j, k);
                hess(e.row[j], e.col[k]) += rest * x[e.row[k]] * x[e.col[j]];
                hess(e.row[j], e.row[k]) += rest * x[e.col[j]] * x[e.col[k]];
            }
    }
    hess *= spec.norm_scale();
    return (hess + hess.transpose()) / 2.0;
}

Mat hessian_analytic(const InhomogeneousSpec& spec, const Vec& x) {
    if (x.size() != spec.n()) throw InputError("x dimension does not match spec");
    const int n = spec.n();
    Mat hess = Mat::Zero(n, n);
    for (const auto& term : spec.terms()) {
        const Mat hh = term_h_hessian(term, x);
        if (term.c) {
            const double beta = term.c->dot(x);
            const Vec gh = term_h_gradient(term, x);
            hess += term.coeff *
                    (beta * hh + gh * term.c->transpose() + (*term.c) * gh.transpose());
        } else {
            hess += term.coeff * hh;
        }
    }
    return (hess + hess.transpose()) / 2.0;
}

Mat hessian_analytic(const PolySpec& spec, const Vec& x) {
    return std::visit([&](const auto& s) { return hessian_analytic(s, x); }, spec);
}

FiniteDifferenceResult finite_difference_oracle(const PolySpec& spec, const Vec& x, double h) {
    if (h <= 0.0) throw InputError("finite difference step must be positive");
    const int n = spec_n(spec);
    auto f = [&](const Vec& y) { return eval(spec, y); };
    FiniteDifferenceResult out;
    out.gradient = Vec::Zero(n);
    out.hessian = Mat::Zero(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = f(xp), fm = f(xm);
        out.gradient[i] = (fp - fm) / (2.0 * h);
        out.hessian(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            const double v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
            out.hessian(i, j) = v;
            out.hessian(j, i) = v;
        }
    return out;
}

HomogeneousSpec homogeneous_lift(const InhomoTerm& term, int n) {
    const int m = term.half_degree();
    if (m < 1) throw InputError("homogeneous_lift requires at least one B factor");
    // A = 2 * B_1 (x) ... (x) B_m as COO; load() renormalizes.
    std::vector<SparseEntry> entries;
    std::vector<int> row(m, 0), col(m, 0);
    const std::int64_t dim = ipow(n, m);
    for (std::int64_t r = 0; r < dim; ++r) {
        std::int64_t rr = r;
        for (int t = m - 1; t >= 0; --t) {
            row[t] = static_cast<int>(rr % n);
            rr /= n;
        }
        for (std::int64_t c = 0; c < dim; ++c) {
            std::int64_t cc = c;
            for (int t = m - 1; t >= 0; --t) {
                col[t] = static_cast<int>(cc % n);
                cc /= n;
            }
            double v = 2.0;
            for (int t = 0; t < m; ++t) v *= term.bs[t](row[t], col[t]);
            if (v != 0.0) entries.push_back(SparseEntry{row, col, v});
        }
    }
    return HomogeneousSpec::load(n, m, std::move(entries));
}

}  // namespace qconvex
