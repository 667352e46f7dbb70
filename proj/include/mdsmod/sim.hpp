#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <thread>
#include <vector>

#include "mdsmod/channel.hpp"
#include "mdsmod/detect.hpp"
#include "mdsmod/modem.hpp"

// Monte-Carlo BER engine. Frames are laid out in fixed 4096-frame slices,
// each slice running its own substream seeded from (seed, point, slice), and
// the stop rule is evaluated at deterministic round boundaries. The set of
// simulated frames therefore depends only on (config, seed, stop rule), never
// on the worker count, and the error counters reduce commutatively, so any
// thread count produces identical output.

namespace mdsmod {

struct StopRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_frames = 10'000'000;
};

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frames = 0;
    double ber = 0.0;
    std::uint64_t seed = 0;
    Detector detector = Detector::Ml;
};

namespace detail {

constexpr std::uint64_t kSliceFrames = 4096;
constexpr std::uint64_t kFirstRound = 4096;
constexpr std::uint64_t kMaxRound = std::uint64_t{1} << 20;

struct FrameWorkspace {
    std::vector<std::complex<double>> h, w, y;
    MlScratch ml;
    LcmlScratch lcml;
};

// Bit errors over the frames [first, first+count) of one slice stream.
inline std::uint64_t run_frames(const Codebook& cb, const LcmlContext* lcml, Detector det,
                                double n0, int groups, rng::GaussianSource& src,
                                FrameWorkspace& ws, std::uint64_t count) {
    const std::size_t n = static_cast<std::size_t>(cb.n);
    const int f = cb.layout.f;
    const std::uint64_t mask = f >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << f) - 1;
    ws.h.resize(n);
    ws.w.resize(n);
    ws.y.resize(n);
    ws.ml.point_cost.resize(n * cb.alphabet.size());
    std::complex<double>* h = ws.h.data();
    std::complex<double>* w = ws.w.data();
    std::complex<double>* y = ws.y.data();
    double* cost = ws.ml.point_cost.data();
    const std::complex<double>* flat = cb.flat.data();
    const double hsd = std::sqrt(0.5);
    const double wsd = std::sqrt(0.5 * n0);
    std::uint64_t errors = 0;
    std::uint64_t evals = 0;
    double metric = 0.0;
    for (std::uint64_t fr = 0; fr < count; ++fr) {
        for (int g = 0; g < groups; ++g) {
            const std::uint64_t tx = src.bits() & mask;
            const std::complex<double>* s = flat + tx * n;
            for (std::size_t i = 0; i < n; ++i) {
                h[i] = {hsd * src.normal(), hsd * src.normal()};
                w[i] = {wsd * src.normal(), wsd * src.normal()};
                y[i] = s[i] * h[i] + w[i];
            }
            const std::uint64_t rx =
                det == Detector::Ml
                    ? detail::ml_core(y, h, n, cb, cost, metric)
                    : lcml_detect_bits(ws.y, ws.h, *lcml, ws.lcml, evals, metric);
            errors += static_cast<std::uint64_t>(std::popcount(tx ^ rx));
        }
    }
    return errors;
}

}  // namespace detail

inline std::vector<BerPoint> run_ber_sweep(const SchemeConfig& cfg,
                                           const std::vector<double>& snr_db, Detector det,
                                           StopRule stop, std::uint64_t seed, int threads = 1) {
    validate(cfg);
    if (snr_db.empty()) throw std::invalid_argument("run_ber_sweep: empty SNR list");
    if (stop.min_bit_errors < 1)
        throw std::invalid_argument("run_ber_sweep: min_bit_errors must be >= 1");
    if (stop.max_frames < 1) throw std::invalid_argument("run_ber_sweep: max_frames must be >= 1");
    const Codebook cb = build_codebook(cfg);
    if (cb.layout.f < 1) throw std::invalid_argument("run_ber_sweep: config carries no bits");
    LcmlContext lcml;
    if (det == Detector::LcMl) lcml = make_lcml_context(cfg);
    const int workers = std::max(1, threads);

    std::vector<BerPoint> points;
    points.reserve(snr_db.size());
    for (std::size_t pi = 0; pi < snr_db.size(); ++pi) {
        const double n0 = NoiseParams{snr_db[pi]}.n0();
        std::uint64_t frames = 0, errors = 0;
        std::uint64_t round = detail::kFirstRound;
        while (frames < stop.max_frames && errors < stop.min_bit_errors) {
            const std::uint64_t this_round = std::min(round, stop.max_frames - frames);
            const std::uint64_t slices =
                (this_round + detail::kSliceFrames - 1) / detail::kSliceFrames;
            std::atomic<std::uint64_t> next{0};
            std::atomic<std::uint64_t> round_errors{0};
            auto work = [&]() {
                detail::FrameWorkspace ws;
                std::uint64_t local = 0;
                for (;;) {
                    const std::uint64_t s = next.fetch_add(1);
                    if (s >= slices) break;
                    const std::uint64_t begin = frames + s * detail::kSliceFrames;
                    const std::uint64_t len =
                        std::min(detail::kSliceFrames, frames + this_round - begin);
                    rng::GaussianSource src(
                        rng::derive_seed({seed, pi, begin / detail::kSliceFrames}));
                    local += detail::run_frames(cb, &lcml, det, n0, cfg.groups, src, ws, len);
                }
                round_errors.fetch_add(local);
            };
            const int team = static_cast<int>(
                std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), slices));
            if (team <= 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                pool.reserve(static_cast<std::size_t>(team - 1));
                for (int t = 0; t + 1 < team; ++t) pool.emplace_back(work);
                work();
                for (auto& th : pool) th.join();
            }
            frames += this_round;
            errors += round_errors.load();
            round = std::min(round * 2, detail::kMaxRound);
        }
        BerPoint pt;
        pt.snr_db = snr_db[pi];
        pt.frames = frames;
        pt.bits_sent = frames * static_cast<std::uint64_t>(cb.layout.f) *
                       static_cast<std::uint64_t>(cfg.groups);
        pt.bit_errors = errors;
        pt.ber = pt.bits_sent ? static_cast<double>(errors) / static_cast<double>(pt.bits_sent) : 0.0;
        pt.seed = seed;
        pt.detector = det;
        points.push_back(pt);
    }
    return points;
}

}  // namespace mdsmod
