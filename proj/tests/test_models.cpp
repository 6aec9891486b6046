#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "clm/models.hpp"

using namespace clm;

namespace {

std::vector<double> random_grid(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> g(size);
    for (double& v : g) v = uni(rng);
    return g;
}

std::vector<double> band_limited(const PeriodicBox& box, std::uint64_t seed) {
    FourierField f = fourier_analyze(random_grid(box.size(), seed), box);
    truncate_two_thirds(f);
    return fourier_synthesize(f);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

int kronecker(int i, int j, int l) {
    if (i == j || j == l || i == l) return 0;
    const bool even = (i == 1 && j == 2 && l == 3) || (i == 2 && j == 3 && l == 1) ||
                      (i == 3 && j == 1 && l == 2);
    return even ? 1 : -1;
}

}  // namespace

// --- scalar zero-order models ------------------------------------------------

TEST_CASE("rectangle Model-1 rhs on the fundamental mode is the exact trig identity") {
    const int n = 31;
    const auto w = sample_rectangle(n, [](double x, double y) { return std::sin(x) * std::sin(y); });
    const auto exact = sample_rectangle(n, [](double x, double y) {
        return 0.5 * clm::sq(std::sin(x) * std::sin(y));
    });
    CHECK(max_abs_diff(rhs_zero_order_2d({1, 1}, w, n), exact) < 1e-13);
}

TEST_CASE("ellipse Model-1 rhs on constants is the closed-form constant") {
    const EllipseDomain dom{2.0, 0.0, 1.0};
    const MaskedGrid g = build_masked_grid(dom, 32);
    const double c0 = 1.75;
    const auto rhs = rhs_zero_order_2d({1, 1}, g, BoundedField(g.interior_count(), c0));
    for (double v : rhs) CHECK(std::abs(v - (2.0 / 3.0) * c0 * c0) < 1e-12);
}

TEST_CASE("ellipse Model-1' rhs vanishes on constants when b = 0") {
    const MaskedGrid g = build_masked_grid({1.0, 0.0, 1.0}, 32);
    const auto rhs = rhs_zero_order_2d({1, 2}, g, BoundedField(g.interior_count(), 2.0));
    for (double v : rhs) CHECK(v == 0.0);
}

TEST_CASE("torus Model-1 rhs is quadratic in the state") {
    PeriodicBox box{2, 2 * pi, 32};
    const auto w = band_limited(box, 17);
    std::vector<double> w2(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w2[i] = 2.0 * w[i];
    const auto r1 = rhs_zero_order_2d({1, 1}, w, box);
    const auto r2 = rhs_zero_order_2d({1, 1}, w2, box);
    double dev = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dev = std::max(dev, std::abs(r2[i] - 4.0 * r1[i]));
    CHECK(dev < 1e-12);
}

// --- the symmetric 2x2 system ---------------------------------------------------

TEST_CASE("system rhs on disk constants uses Z11 1 = 1/2") {
    const MaskedGrid g = build_masked_grid({1.0, 0.0, 1.0}, 32);
    const double c1 = 1.5, c2 = -0.7;
    VectorField w;
    w.comps = {std::vector<double>(g.interior_count(), c1),
               std::vector<double>(g.interior_count(), c2)};
    const VectorField r = rhs_system32(w, g);
    const double diag = c1 + 0.5 * c1;  // w1 + Z11 w1
    const double off = 0.5 * c1;
    for (double v : r.comps[0]) CHECK(std::abs(v - (diag * c1 + off * c2)) < 1e-12);
    for (double v : r.comps[1]) CHECK(std::abs(v - (off * c1 + diag * c2)) < 1e-12);
}

TEST_CASE("system rhs of zero is zero") {
    const MaskedGrid g = build_masked_grid({1.0, 0.0, 1.0}, 32);
    VectorField w;
    w.comps.assign(2, std::vector<double>(g.interior_count(), 0.0));
    const VectorField r = rhs_system32(w, g);
    for (const auto& c : r.comps)
        for (double v : c) CHECK(v == 0.0);
}

TEST_CASE("system rhs equals the independently assembled symmetric matrix product") {
    const int n = 24;
    VectorField w;
    w.comps = {random_grid(static_cast<std::size_t>(n) * n, 71),
               random_grid(static_cast<std::size_t>(n) * n, 72)};
    const VectorField r = rhs_system32(w, n);
    const auto z11w1 = sine_synthesize(apply_Z_sine({1, 1}, sine_analyze(w.comps[0], n)));
    for (std::size_t u = 0; u < w.comps[0].size(); ++u) {
        const double m11 = w.comps[0][u] + z11w1[u];
        const double m12 = 0.5 * w.comps[0][u];  // = m21: the matrix is symmetric
        CHECK(r.comps[0][u] == Catch::Approx(m11 * w.comps[0][u] + m12 * w.comps[1][u]).margin(1e-12));
        CHECK(r.comps[1][u] == Catch::Approx(m12 * w.comps[0][u] + m11 * w.comps[1][u]).margin(1e-12));
    }
}

TEST_CASE("system rhs rejects wrong component counts") {
    const MaskedGrid g = build_masked_grid({1.0, 0.0, 1.0}, 32);
    VectorField w;
    w.comps.assign(3, std::vector<double>(g.interior_count(), 0.0));
    CHECK_THROWS_AS(rhs_system32(w, g), std::invalid_argument);
}

// --- 2D Biot-Savart ---------------------------------------------------------------

TEST_CASE("Biot-Savart on cos(x1) + cos(x2) gives (-sin x2, sin x1)") {
    PeriodicBox box{2, 2 * pi, 32};
    const auto w = sample_grid(box, [](const std::array<double, 3>& x) {
        return std::cos(x[0]) + std::cos(x[1]);
    });
    const VectorField u = biot_savart_2d(w, box);
    const auto u1 = sample_grid(box, [](const std::array<double, 3>& x) { return -std::sin(x[1]); });
    const auto u2 = sample_grid(box, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    CHECK(max_abs_diff(u.comps[0], u1) < 1e-13);
    CHECK(max_abs_diff(u.comps[1], u2) < 1e-13);
}

TEST_CASE("Biot-Savart velocity is divergence-free and recovers the vorticity") {
    PeriodicBox box{2, 2 * pi, 48};
    FourierField wh = fourier_analyze(random_grid(box.size(), 31), box);
    wh.c[0] = 0.0;
    truncate_two_thirds(wh);
    const auto w = fourier_synthesize(wh);
    const VectorField u = biot_savart_2d(w, box);
    const FourierField u1 = fourier_analyze(u.comps[0], box);
    const FourierField u2 = fourier_analyze(u.comps[1], box);
    FourierField div(box), curl(box);
    const FourierField d1 = derivative_periodic(u1, 1), d2 = derivative_periodic(u2, 2);
    const FourierField c2 = derivative_periodic(u2, 1), c1 = derivative_periodic(u1, 2);
    for (std::size_t i = 0; i < div.c.size(); ++i) {
        div.c[i] = d1.c[i] + d2.c[i];
        curl.c[i] = c2.c[i] - c1.c[i];
    }
    CHECK(sup_norm(fourier_synthesize(div)) < 1e-12);
    CHECK(max_abs_diff(fourier_synthesize(curl), w) < 1e-12);
}

TEST_CASE("Biot-Savart of zero is zero, and a mean violates the gauge") {
    PeriodicBox box{2, 2 * pi, 16};
    const VectorField u = biot_savart_2d(std::vector<double>(box.size(), 0.0), box);
    CHECK(sup_norm(u.comps[0]) == 0.0);
    CHECK(sup_norm(u.comps[1]) == 0.0);
    CHECK_THROWS_AS(biot_savart_2d(std::vector<double>(box.size(), 0.5), box),
                    std::invalid_argument);
}

// --- perturbed scalar models --------------------------------------------------------

TEST_CASE("perturbed rhs of zero is zero for every flag combination") {
    PeriodicBox box{2, 2 * pi, 16};
    const std::vector<double> zero(box.size(), 0.0);
    for (bool conv : {false, true})
        for (bool diff : {false, true})
            CHECK(sup_norm(rhs_perturbed({conv, diff}, zero, box)) == 0.0);
}

TEST_CASE("perturbed rhs with both flags off equals the plain zero-order rhs") {
    PeriodicBox box{2, 2 * pi, 32};
    const auto w = band_limited(box, 12);
    const auto a = rhs_perturbed({false, false}, w, box);
    const auto b = rhs_zero_order_2d({1, 1}, w, box);
    CHECK(max_abs_diff(a, b) == 0.0);
}

TEST_CASE("convection term cancels exactly on the symmetric datum") {
    PeriodicBox box{2, 2 * pi, 32};
    const auto w = sample_grid(box, [](const std::array<double, 3>& x) {
        return std::cos(x[0]) + std::cos(x[1]);
    });
    // u . grad w = sin(x2) sin(x1) - sin(x1) sin(x2) = 0
    CHECK(sup_norm(convection_term_2d(w, box)) < 1e-13);
}

TEST_CASE("perturbed rhs splits into linear and quadratic parts") {
    PeriodicBox box{2, 2 * pi, 32};
    const auto w = band_limited(box, 13);
    const auto r1 = rhs_perturbed({true, true}, w, box);
    std::vector<double> w2(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w2[i] = 2.0 * w[i];
    const auto r2 = rhs_perturbed({true, true}, w2, box);
    // r(l w) = l L w + l^2 Q w: recover L and Q from two evaluations and
    // predict a third
    std::vector<double> Q(w.size()), L(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        Q[i] = 0.5 * (r2[i] - 2.0 * r1[i]);
        L[i] = r1[i] - Q[i];
    }
    std::vector<double> w3(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w3[i] = 3.0 * w[i];
    const auto r3 = rhs_perturbed({true, true}, w3, box);
    double dev = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        dev = std::max(dev, std::abs(r3[i] - (3.0 * L[i] + 9.0 * Q[i])));
    CHECK(dev < 1e-10);
}

// --- 3D reconstruction and grad u ------------------------------------------------------

TEST_CASE("grad u matches the directly differentiated generating velocity") {
    PeriodicBox box{3, 2 * pi, 16};
    // u0 = (sin x3, sin x1, sin x2), w = curl u0 = (cos x2, cos x3, cos x1)
    VectorField w;
    w.comps = {sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[1]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[2]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); })};
    const GradU g = grad_u_3d(w, box);
    auto zero = std::vector<double>(box.size(), 0.0);
    // nonzero entries of grad u0: d3 u1 = cos x3, d1 u2 = cos x1, d2 u3 = cos x2
    const auto d3u1 = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[2]); });
    const auto d1u2 = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); });
    const auto d2u3 = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[1]); });
    CHECK(max_abs_diff(g.at(3, 1), d3u1) < 1e-12);
    CHECK(max_abs_diff(g.at(1, 2), d1u2) < 1e-12);
    CHECK(max_abs_diff(g.at(2, 3), d2u3) < 1e-12);
    for (const auto [m, i] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}, {1, 3}, {3, 3}})
        CHECK(max_abs_diff(g.at(m, i), zero) < 1e-12);
}

TEST_CASE("grad u reproduces the generalized-Kronecker index form entry by entry") {
    PeriodicBox box{3, 2 * pi, 16};
    VectorField w;
    w.comps.resize(3);
    for (int c = 0; c < 3; ++c) w.comps[c] = band_limited(box, 800 + c);
    const GradU g = grad_u_3d(w, box);
    std::array<FourierField, 3> wh{fourier_analyze(w.comps[0], box),
                                   fourier_analyze(w.comps[1], box),
                                   fourier_analyze(w.comps[2], box)};
    for (int m = 1; m <= 3; ++m)
        for (int i = 1; i <= 3; ++i) {
            // (grad u)_{mi} = -sum_{j,l} delta^i_{jl} Z_{jm} w_l, the sign fixed
            // by the curl u = w orientation of the reconstruction
            std::vector<double> ref(box.size(), 0.0);
            for (int j = 1; j <= 3; ++j)
                for (int l = 1; l <= 3; ++l) {
                    const int s = kronecker(i, j, l);
                    if (s == 0) continue;
                    const auto t = fourier_synthesize(apply_Z_periodic({j, m}, wh[l - 1]));
                    for (std::size_t u = 0; u < ref.size(); ++u) ref[u] -= s * t[u];
                }
            CHECK(max_abs_diff(g.at(m, i), ref) < 1e-12);
        }
}

TEST_CASE("grad u is trace-free and zero on zero data") {
    PeriodicBox box{3, 2 * pi, 16};
    VectorField w;
    w.comps.resize(3);
    for (int c = 0; c < 3; ++c) w.comps[c] = band_limited(box, 900 + c);
    const GradU g = grad_u_3d(w, box);
    double trace = 0.0;
    for (std::size_t u = 0; u < box.size(); ++u)
        trace = std::max(trace, std::abs(g.at(1, 1)[u] + g.at(2, 2)[u] + g.at(3, 3)[u]));
    CHECK(trace < 1e-12);

    VectorField zero;
    zero.comps.assign(3, std::vector<double>(box.size(), 0.0));
    const GradU gz = grad_u_3d(zero, box);
    for (int m = 1; m <= 3; ++m)
        for (int i = 1; i <= 3; ++i) CHECK(sup_norm(gz.at(m, i)) == 0.0);
}

TEST_CASE("3D zero-order rhs matches the hand-assembled product and scales quadratically") {
    PeriodicBox box{3, 2 * pi, 16};
    VectorField w;
    w.comps = {sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[1]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[2]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); })};
    const VectorField r = rhs_zero_order_3d(w, box);
    const GradU g = grad_u_3d(w, box);
    for (int m = 1; m <= 3; ++m) {
        std::vector<double> hand(box.size(), 0.0);
        for (int i = 1; i <= 3; ++i)
            for (std::size_t u = 0; u < hand.size(); ++u)
                hand[u] += g.at(m, i)[u] * w.comps[i - 1][u];
        CHECK(max_abs_diff(r.comps[m - 1], hand) < 1e-10);
    }

    VectorField w2 = w;
    for (auto& c : w2.comps)
        for (double& v : c) v *= 2.0;
    const VectorField r2 = rhs_zero_order_3d(w2, box);
    for (int m = 0; m < 3; ++m) {
        double dev = 0.0;
        for (std::size_t u = 0; u < box.size(); ++u)
            dev = std::max(dev, std::abs(r2.comps[m][u] - 4.0 * r.comps[m][u]));
        CHECK(dev < 1e-12);
    }
}

TEST_CASE("3D reconstruction residuals: div-free, gradient, and zero inputs") {
    PeriodicBox box{3, 2 * pi, 16};
    VectorField w;
    w.comps = {sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[1]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[2]); }),
               sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); })};
    const ReconstructionResult ok = velocity_from_vorticity_3d(w, box);
    CHECK(ok.div_u_norm < 1e-12);
    CHECK(ok.curl_mismatch < 1e-10);

    VectorField grad;  // w = grad(cos x1) is annihilated by the curl
    grad.comps = {sample_grid(box, [](const std::array<double, 3>& x) { return -std::sin(x[0]); }),
                  std::vector<double>(box.size(), 0.0), std::vector<double>(box.size(), 0.0)};
    const ReconstructionResult bad = velocity_from_vorticity_3d(grad, box);
    CHECK(bad.curl_mismatch > 0.1);
    for (const auto& c : bad.u.comps) CHECK(sup_norm(c) < 1e-13);

    VectorField zero;
    zero.comps.assign(3, std::vector<double>(box.size(), 0.0));
    const ReconstructionResult z = velocity_from_vorticity_3d(zero, box);
    CHECK(z.div_u_norm == 0.0);
    CHECK(z.curl_mismatch == 0.0);
}

// --- skew symmetry ----------------------------------------------------------------------

TEST_CASE("skew-symmetry residual on the ball with c = (1,2,3)") {
    EllipsoidForm ball;
    ball.a = {{{1.0 / 3, 0, 0}, {0, 1.0 / 3, 0}, {0, 0, 1.0 / 3}}};
    const auto r = skew_symmetry_residual(ball, {1.0, 2.0, 3.0});
    for (double v : r) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("skew-symmetry residual vanishes for random admissible forms") {
    std::mt19937_64 rng(2718281828);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        double g[3][3];
        for (auto& row : g)
            for (double& v : row) v = uni(rng);
        EllipsoidForm A;
        double tr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = (i == j) ? 1e-3 : 0.0;
                for (int k = 0; k < 3; ++k) s += g[k][i] * g[k][j];
                A.a[i][j] = s;
            }
        for (int i = 0; i < 3; ++i) tr += A.a[i][i];
        for (auto& row : A.a)
            for (double& v : row) v /= tr;
        const auto r = skew_symmetry_residual(A, {uni(rng), uni(rng), uni(rng)});
        for (double v : r) CHECK(std::abs(v) < 1e-14);
    }
}

TEST_CASE("skew-symmetry residual of the zero vector is exactly zero") {
    EllipsoidForm ball;
    ball.a = {{{0.5, 0, 0}, {0, 0.3, 0}, {0, 0, 0.2}}};
    const auto r = skew_symmetry_residual(ball, {0.0, 0.0, 0.0});
    for (double v : r) CHECK(v == 0.0);
}

// --- the 1D ancestor ----------------------------------------------------------------------

TEST_CASE("CLM rhs on the basic modes") {
    PeriodicBox box{1, 2 * pi, 64};
    const auto s = sample_grid(box, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    const auto c = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); });
    const auto rs = rhs_clm(s, box);
    const auto rc = rhs_clm(c, box);
    const auto target_s = sample_grid(box, [](const std::array<double, 3>& x) {
        return -0.5 * std::sin(2.0 * x[0]);  // H(sin) sin = -cos sin
    });
    const auto target_c = sample_grid(box, [](const std::array<double, 3>& x) {
        return 0.5 * std::sin(2.0 * x[0]);  // H(cos) cos = sin cos
    });
    CHECK(max_abs_diff(rs, target_s) < 1e-13);
    CHECK(max_abs_diff(rc, target_c) < 1e-13);
    CHECK(sup_norm(rhs_clm(std::vector<double>(box.size(), 0.0), box)) == 0.0);
}
