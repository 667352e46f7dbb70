#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "mdsmod/channel.hpp"
#include "mdsmod/detect.hpp"

using namespace mdsmod;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ml recovers every codeword through a noiseless channel", "[detect]") {
    for (const auto& cfg : {apm_config(2, 2, 2), apm_config(3, 2, 2, 2), iqm_config(3, 2, 2, 2),
                            plain_config(16)}) {
        INFO(cfg.name());
        auto cb = build_codebook(cfg);
        rng::GaussianSource src(99);
        auto h = sample_realization(src, cfg.subcarriers_per_group());
        for (std::uint64_t d = 0; d < cb.size(); ++d) {
            std::vector<std::complex<double>> y(h.size());
            for (std::size_t i = 0; i < h.size(); ++i) y[i] = cb.symbol(d)[i] * h[i];
            auto res = ml_detect(y, h, cb);
            CHECK(res.bits == d);
            CHECK(res.metric_evaluations == cb.size());
            CHECK_THAT(res.best_metric, WithinAbs(0.0, 1e-18));
        }
    }
}

TEST_CASE("ml returns the global metric minimizer on noisy input", "[detect]") {
    for (const auto& cfg : {apm_config(2, 2, 2), iqm_config(2, 4, 4)}) {
        auto cb = build_codebook(cfg);
        rng::GaussianSource src(7);
        for (int trial = 0; trial < 200; ++trial) {
            auto h = sample_realization(src, cfg.subcarriers_per_group());
            auto y = sample_noise(src, cfg.subcarriers_per_group(), 1.0);  // arbitrary received
            auto res = ml_detect(y, h, cb);
            for (std::uint64_t d = 0; d < cb.size(); ++d) {
                double m = 0.0;
                for (std::size_t i = 0; i < h.size(); ++i)
                    m += std::norm(y[i] - cb.symbol(d)[i] * h[i]);
                CHECK(res.best_metric <= m + 1e-12);
            }
        }
    }
}

TEST_CASE("lcml agrees with ml through a noiseless channel", "[detect]") {
    for (const auto& cfg : {apm_config(3, 2, 2, 2), iqm_config(3, 2, 2, 2)}) {
        INFO(cfg.name());
        auto cb = build_codebook(cfg);
        auto ctx = make_lcml_context(cfg);
        rng::GaussianSource src(11);
        auto h = sample_realization(src, 3);
        for (std::uint64_t d = 0; d < cb.size(); ++d) {
            std::vector<std::complex<double>> y(3);
            for (std::size_t i = 0; i < 3; ++i) y[i] = cb.symbol(d)[i] * h[i];
            auto res = lcml_detect(y, h, ctx);
            CHECK(res.bits == d);
        }
    }
}

TEST_CASE("lcml output always satisfies the MDS closure", "[detect]") {
    auto cfg = apm_config(4, 2, 4, 2);
    auto ctx = make_lcml_context(cfg);
    rng::GaussianSource src(13);
    for (int trial = 0; trial < 500; ++trial) {
        auto h = sample_realization(src, 4);
        auto y = sample_noise(src, 4, 1.0);
        auto res = lcml_detect(y, h, ctx);  // validates tuples internally
        const auto& prov = std::get<ApmProvenance>(res.prov);
        long long sa = 0, sp = 0;
        for (int v : prov.amplitude) sa += v;
        for (int v : prov.phase_set) sp += v;
        CHECK(sa % 2 == 0);
        CHECK(sp % 4 == 0);
    }
    auto icfg = iqm_config(4, 2, 2, 2);
    auto ictx = make_lcml_context(icfg);
    for (int trial = 0; trial < 500; ++trial) {
        auto h = sample_realization(src, 4);
        auto y = sample_noise(src, 4, 1.0);
        auto res = lcml_detect(y, h, ictx);
        const auto& prov = std::get<IqmProvenance>(res.prov);
        long long sr = 0, st = 0;
        for (int v : prov.in_set) sr += v;
        for (int v : prov.quad_set) st += v;
        CHECK(sr % 2 == 0);
        CHECK(st % 2 == 0);
    }
}

TEST_CASE("metric evaluation counters match the closed forms", "[detect]") {
    // APM LC-ML: KPM(N-1) + M
    {
        auto cfg = apm_config(4, 2, 8, 2);
        auto ctx = make_lcml_context(cfg);
        rng::GaussianSource src(3);
        auto h = sample_realization(src, 4);
        auto y = sample_noise(src, 4, 1.0);
        auto res = lcml_detect(y, h, ctx);
        CHECK(res.metric_evaluations == 98);
        CHECK_THAT(metric_count(cfg, Detector::LcMl).per_group, WithinAbs(98.0, 0.0));
    }
    // IQM LC-ML: RTM^2(N-1) + M^2
    {
        auto cfg = iqm_config(4, 2, 2, 4);
        auto ctx = make_lcml_context(cfg);
        rng::GaussianSource src(4);
        auto h = sample_realization(src, 4);
        auto y = sample_noise(src, 4, 1.0);
        auto res = lcml_detect(y, h, ctx);
        CHECK(res.metric_evaluations == 208);
        CHECK_THAT(metric_count(cfg, Detector::LcMl).per_subcarrier, WithinAbs(52.0, 0.0));
    }
    CHECK_THAT(metric_count(iqm_config(8, 2, 4, 4), Detector::LcMl).per_group, WithinAbs(912.0, 0.0));
    CHECK_THAT(metric_count(iqm_config(8, 2, 4, 4), Detector::LcMl).per_subcarrier, WithinAbs(114.0, 0.0));
    CHECK_THAT(metric_count(iqm_config(16, 4, 4, 4), Detector::LcMl).per_subcarrier, WithinAbs(241.0, 0.0));

    // ML: 2^f per group
    auto mlc = metric_count(apm_config(4, 2, 2, 4), Detector::Ml);
    CHECK_THAT(mlc.per_group, WithinAbs(16384.0, 0.0));  // (KP)^(N-1) M^N
    auto mli = metric_count(iqm_config(4, 2, 2, 4), Detector::Ml);
    CHECK_THAT(mli.per_subcarrier, WithinRel(1.05e6, 0.005));

    // LC-ML dominance whenever the codebook outgrows the per-subcarrier scan
    for (const auto& cfg : {apm_config(4, 2, 8, 2), iqm_config(4, 2, 2, 4), apm_config(3, 3, 3)}) {
        auto ml = metric_count(cfg, Detector::Ml);
        auto lc = metric_count(cfg, Detector::LcMl);
        if (ml.per_group > lc.per_group) CHECK(lc.per_subcarrier < ml.per_subcarrier);
    }
}

TEST_CASE("lcml matches ml on nearly all high-snr frames", "[detect]") {
    auto cfg = apm_config(2, 2, 2);
    auto cb = build_codebook(cfg);
    auto ctx = make_lcml_context(cfg);
    const double n0 = NoiseParams{40.0}.n0();
    rng::GaussianSource src(2024);
    int agree = 0;
    const int frames = 10'000;
    for (int fidx = 0; fidx < frames; ++fidx) {
        const std::uint64_t tx = src.bits() & 3u;
        auto h = sample_realization(src, 2);
        auto w = sample_noise(src, 2, n0);
        std::vector<std::complex<double>> y(2);
        for (std::size_t i = 0; i < 2; ++i) y[i] = cb.symbol(tx)[i] * h[i] + w[i];
        auto a = ml_detect(y, h, cb);
        auto b = lcml_detect(y, h, ctx);
        if (a.bits == b.bits) ++agree;
    }
    CHECK(agree >= frames * 99 / 100);
}

TEST_CASE("plain scheme detectors coincide", "[detect]") {
    auto cfg = plain_config(16);
    auto cb = build_codebook(cfg);
    auto ctx = make_lcml_context(cfg);
    rng::GaussianSource src(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto h = sample_realization(src, 1);
        auto y = sample_noise(src, 1, 1.0);
        CHECK(ml_detect(y, h, cb).bits == lcml_detect(y, h, ctx).bits);
    }
}

TEST_CASE("detectors validate input lengths", "[detect]") {
    auto cfg = apm_config(2, 2, 2);
    auto cb = build_codebook(cfg);
    std::vector<std::complex<double>> y(3), h(2);
    CHECK_THROWS_AS(ml_detect(y, h, cb), std::invalid_argument);
    auto ctx = make_lcml_context(cfg);
    CHECK_THROWS_AS(lcml_detect(y, h, ctx), std::invalid_argument);
}
