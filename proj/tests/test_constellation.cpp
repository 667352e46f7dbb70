#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "mdsmod/constellation.hpp"

using namespace mdsmod;
using std::numbers::pi;
using Catch::Matchers::WithinAbs;

namespace {

double mean_energy(const std::vector<std::complex<double>>& pts) {
    double e = 0.0;
    for (const auto& z : pts) e += std::norm(z);
    return e / static_cast<double>(pts.size());
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    return a < 0 ? a + 2.0 * pi : a;
}

}  // namespace

TEST_CASE("apm radii and phase sets match the two-ring example", "[constellation]") {
    auto c = build_apm(2, 2, 1, /*ring_rotation=*/false);
    REQUIRE(c.ring_radii.size() == 2);
    CHECK_THAT(c.ring_radii[0], WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));
    CHECK_THAT(c.ring_radii[1], WithinAbs(std::sqrt(4.0 / 3.0), 1e-15));
    // phase set 1 = {0}, phase set 2 = {pi}, no ring rotation
    CHECK_THAT(std::arg(c.point(1, 1, 0)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::arg(c.point(1, 2, 0)), WithinAbs(pi, 1e-15));
    CHECK_THAT(std::abs(c.point(2, 2, 0) - std::polar(std::sqrt(4.0 / 3.0), pi)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("outer rings rotate by pi/(PM) when enabled", "[constellation]") {
    auto c = build_apm(4, 2, 2, true);
    for (int p = 1; p <= 2; ++p)
        for (int m = 0; m < 2; ++m) {
            const double delta = wrap_angle(std::arg(c.point(2, p, m)) - std::arg(c.point(1, p, m)));
            CHECK_THAT(delta, WithinAbs(pi / 4.0, 1e-12));
        }
    // hand-evaluated point: k=2, p=1, m=0 -> sqrt(4/5) e^{j pi/4}
    CHECK_THAT(std::abs(c.point(2, 1, 0) - std::polar(std::sqrt(0.8), pi / 4.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("single ring with four phases degenerates to QPSK", "[constellation]") {
    auto c = build_apm(1, 1, 4, true);
    CHECK_THAT(c.ring_radii[0], WithinAbs(1.0, 1e-15));
    auto pts = c.all_points();
    REQUIRE(pts.size() == 4);
    for (int m = 0; m < 4; ++m)
        CHECK_THAT(std::abs(pts[static_cast<std::size_t>(m)] - std::polar(1.0, pi * m / 2.0)),
                   WithinAbs(0.0, 1e-15));
    CHECK_THAT(brute_force_med(pts).value, WithinAbs(std::numbers::sqrt2, 1e-12));
}

TEST_CASE("apm constructor and point lookup validate their inputs", "[constellation]") {
    CHECK_THROWS_AS(build_apm(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_apm(1, -2, 1), std::invalid_argument);
    auto c = build_apm(2, 2, 2);
    CHECK_THROWS_AS(c.point(0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(c.point(1, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(c.point(1, 1, 2), std::invalid_argument);
}

TEST_CASE("apm points have unit mean energy and are distinct", "[constellation]") {
    for (int K : {1, 2, 3, 4})
        for (int P : {1, 2, 3, 4})
            for (int M : {1, 2, 4, 8})
                for (bool rot : {false, true}) {
                    auto pts = build_apm(K, P, M, rot).all_points();
                    CHECK_THAT(mean_energy(pts), WithinAbs(1.0, 1e-12));
                    if (pts.size() > 1) {
                        auto med = brute_force_med(pts);
                        CHECK(med.value > 1e-9);
                    }
                }
}

TEST_CASE("analytic apm candidates match spec examples", "[constellation]") {
    auto qpsk = analytic_med_apm(build_apm(1, 1, 4));
    REQUIRE(qpsk.d1.has_value());
    CHECK_THAT(*qpsk.d1, WithinAbs(2.0 * std::sin(pi / 4.0), 1e-15));
    CHECK_THAT(*qpsk.d1, WithinAbs(std::numbers::sqrt2, 1e-15));
    CHECK_FALSE(qpsk.d2.has_value());
    CHECK_FALSE(qpsk.d3.has_value());

    auto two_ring = analytic_med_apm(build_apm(2, 2, 1));
    REQUIRE(two_ring.d2.has_value());
    CHECK_THAT(*two_ring.d2, WithinAbs(std::sqrt((6.0 - 4.0 * std::numbers::sqrt2 * std::cos(pi / 2.0)) / 3.0), 1e-15));
    CHECK_THAT(*two_ring.d2, WithinAbs(std::numbers::sqrt2, 1e-12));
    // cross-check against brute force over the 4 constellation points
    auto brute = brute_force_med(build_apm(2, 2, 1).all_points());
    CHECK_THAT(brute.value, WithinAbs(*two_ring.d2, 1e-12));

    auto four_ring = analytic_med_apm(build_apm(4, 2, 2));
    REQUIRE(four_ring.d3.has_value());
    CHECK_THAT(*four_ring.d3, WithinAbs(std::sqrt(0.4) * (2.0 - std::numbers::sqrt2), 1e-15));
    CHECK_THAT(*four_ring.d3, WithinAbs(0.3705, 5e-5));

    CHECK_THROWS_AS(analytic_med_apm(build_apm(2, 2, 1, false)), std::invalid_argument);
}

TEST_CASE("brute-force constellation MED equals an applicable candidate", "[constellation]") {
    for (int K : {1, 2, 3, 4})
        for (int P : {1, 2, 3, 4})
            for (int M : {1, 2, 4, 8}) {
                if (K * P * M == 1) continue;
                auto c = build_apm(K, P, M, true);
                auto rep = analytic_med_apm(c);
                auto brute = brute_force_med(c.all_points());
                double lo = std::numeric_limits<double>::infinity();
                bool matches_candidate = false;
                for (const auto& d : {rep.d1, rep.d2, rep.d3}) {
                    if (!d) continue;
                    lo = std::min(lo, *d);
                    if (std::abs(*d - brute.value) <= 1e-9) matches_candidate = true;
                }
                INFO("K=" << K << " P=" << P << " M=" << M);
                CHECK(brute.value >= lo - 1e-12);
                CHECK(matches_candidate);
            }
}

TEST_CASE("iqm interleaved sets reproduce composite PAM geometry", "[constellation]") {
    auto c = build_iqm(2, 2, 2);
    const double d = std::sqrt(6.0 / 15.0);
    // composite alphabet is the union of sets: {-1.5d, -0.5d, 0.5d, 1.5d}
    std::vector<double> all;
    for (const auto& s : c.in_sets) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    REQUIRE(all.size() == 4);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) CHECK_THAT(all[i + 1] - all[i], WithinAbs(d, 1e-12));
    double e = 0.0;
    for (double x : all) e += x * x;
    CHECK_THAT(e / 4.0, WithinAbs(0.5, 1e-12));
    // set 1 holds composite positions {0, 2}; sets are mirror images in energy
    CHECK_THAT(c.in_sets[0][0], WithinAbs(-1.5 * d, 1e-12));
    CHECK_THAT(c.in_sets[0][1], WithinAbs(0.5 * d, 1e-12));
    double e1 = c.in_sets[0][0] * c.in_sets[0][0] + c.in_sets[0][1] * c.in_sets[0][1];
    double e2 = c.in_sets[1][0] * c.in_sets[1][0] + c.in_sets[1][1] * c.in_sets[1][1];
    CHECK_THAT(e1, WithinAbs(e2, 1e-12));

    auto bpsk_like = build_iqm(1, 1, 2);
    CHECK_THAT(bpsk_like.in_sets[0][0], WithinAbs(-1.0 / std::numbers::sqrt2, 1e-12));
    CHECK_THAT(bpsk_like.in_sets[0][1], WithinAbs(1.0 / std::numbers::sqrt2, 1e-12));

    CHECK_THROWS_AS(build_iqm(0, 1, 1), std::invalid_argument);
}

TEST_CASE("custom iqm levels reproduce the hand-built component table", "[constellation]") {
    auto c = custom_iqm({{std::numbers::sqrt2 / 2.0}, {-std::numbers::sqrt2 / 2.0}},
                        {{0.5}, {-std::sqrt(3.0) / 2.0}});
    CHECK(c.R == 2);
    CHECK(c.T == 2);
    CHECK(c.M == 1);
    auto z = c.point(2, 0, 1, 0);
    CHECK_THAT(z.real(), WithinAbs(-std::numbers::sqrt2 / 2.0, 1e-15));
    CHECK_THAT(z.imag(), WithinAbs(0.5, 1e-15));
    // component energy averages E_T/2 across sets for both components
    double ei = 0.0, eq = 0.0;
    for (const auto& s : c.in_sets) ei += s[0] * s[0];
    for (const auto& s : c.quad_sets) eq += s[0] * s[0];
    CHECK_THAT(ei / 2.0, WithinAbs(0.5, 1e-12));
    CHECK_THAT(eq / 2.0, WithinAbs(0.5, 1e-12));
}

TEST_CASE("iqm analytic MEDs match their formulas and the built sets", "[constellation]") {
    auto rep22 = analytic_med_iqm(build_iqm(2, 2, 2));
    REQUIRE(rep22.d1.has_value());
    CHECK_THAT(*rep22.d1, WithinAbs(std::sqrt(6.0 / 3.75), 1e-15));
    CHECK_THAT(*rep22.d1, WithinAbs(1.2649, 1e-4));
    REQUIRE(rep22.d_min.has_value());
    CHECK_THAT(*rep22.d_min, WithinAbs(2.0 * std::sqrt(3.0 / 15.0), 1e-15));
    CHECK_THAT(*rep22.d_min, WithinAbs(0.8944, 1e-4));

    auto rep12 = analytic_med_iqm(build_iqm(1, 1, 2));
    REQUIRE(rep12.d_min.has_value());
    CHECK_THAT(*rep12.d_min, WithinAbs(2.0, 1e-12));

    // built-set spacings: within-set spacing is exactly d1, composite spacing
    // is d_min / sqrt(2), for square R = T = xi
    for (int xi : {2, 4})
        for (int M : {2, 4, 8}) {
            auto c = build_iqm(xi, xi, M);
            auto rep = analytic_med_iqm(c);
            const double within = c.in_sets[0][1] - c.in_sets[0][0];
            std::vector<double> all;
            for (const auto& s : c.in_sets) all.insert(all.end(), s.begin(), s.end());
            std::sort(all.begin(), all.end());
            const double composite = all[1] - all[0];
            REQUIRE(rep.d1.has_value());
            CHECK_THAT(within, WithinAbs(*rep.d1, 1e-12));
            CHECK_THAT(std::numbers::sqrt2 * composite, WithinAbs(*rep.d_min, 1e-12));
            // within-set spacing / composite spacing == R exactly
            CHECK_THAT(within / composite, WithinAbs(static_cast<double>(xi), 1e-12));
        }
}

TEST_CASE("disjointness of phase sets and PAM sets", "[constellation]") {
    auto apm = build_apm(2, 4, 4, true);
    for (int p = 1; p <= 4; ++p)
        for (int q = p + 1; q <= 4; ++q)
            for (int m1 = 0; m1 < 4; ++m1)
                for (int m2 = 0; m2 < 4; ++m2) {
                    double a1 = wrap_angle(std::arg(apm.point(1, p, m1)));
                    double a2 = wrap_angle(std::arg(apm.point(1, q, m2)));
                    CHECK(std::abs(a1 - a2) > 1e-9);
                }
    auto iqm = build_iqm(4, 3, 2);
    for (int r = 0; r < 4; ++r)
        for (int s = r + 1; s < 4; ++s)
            for (double x : iqm.in_sets[static_cast<std::size_t>(r)])
                for (double y : iqm.in_sets[static_cast<std::size_t>(s)])
                    CHECK(std::abs(x - y) > 1e-9);
}

TEST_CASE("brute_force_med validates input and finds the argmin pair", "[constellation]") {
    std::vector<std::complex<double>> one{{0.0, 0.0}};
    CHECK_THROWS_AS(brute_force_med(one), std::invalid_argument);
    std::vector<std::complex<double>> pts{{0.0, 0.0}, {3.0, 0.0}, {3.1, 0.0}};
    auto med = brute_force_med(pts);
    CHECK_THAT(med.value, WithinAbs(0.1, 1e-12));
    CHECK(med.first == 1);
    CHECK(med.second == 2);

    std::vector<std::vector<std::complex<double>>> cws{{{0.0, 0.0}, {0.0, 0.0}},
                                                       {{1.0, 0.0}, {1.0, 0.0}},
                                                       {{0.0, 0.0}, {5.0, 0.0}}};
    auto cmed = brute_force_med_codebook(cws);
    CHECK_THAT(cmed.value, WithinAbs(std::numbers::sqrt2, 1e-12));
    CHECK(cmed.first == 0);
    CHECK(cmed.second == 1);
}

TEST_CASE("d4 versus square-QAM MED crossover sits at M=16", "[constellation]") {
    // APM(N, M, M, M) high-SNR MED d4 against the MED of a unit-energy
    // M^2-point QAM, sqrt(6/(M^2-1)). Direct evaluation places the first
    // loss at M = 16.
    auto d4 = [](int M) {
        return 2.0 * std::numbers::sqrt2 / std::sqrt(M + 1.0) * std::sin(pi / M);
    };
    auto qam = [](int M) { return std::sqrt(6.0 / (static_cast<double>(M) * M - 1.0)); };
    int first_loss = 0;
    for (int M = 2; M <= 1024; M *= 2) {
        if (d4(M) < qam(M)) {
            first_loss = M;
            break;
        }
    }
    CHECK(first_loss == 16);
    CHECK(d4(8) > qam(8));
}
