// Command-line front end: builds experiment configs from flags (or a flat
// JSON config file), runs the simulation/analysis engines, and writes frozen
// CSV schemas. See README.md for the schemas and preset catalogue.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mdsmod/analysis.hpp"
#include "mdsmod/constellation.hpp"
#include "mdsmod/detect.hpp"
#include "mdsmod/mds_code.hpp"
#include "mdsmod/modem.hpp"
#include "mdsmod/sim.hpp"

namespace {

using namespace mdsmod;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_snr(double v) { return fmt("%g", v); }
std::string fmt_sci(double v) { return fmt("%.10e", v); }
std::string fmt_fix(double v) { return fmt("%.10f", v); }

// Flat JSON config support ({"scheme": "apm", "n": 2, ...}): the file's
// values are injected as trailing flags for every key the command line did
// not set, so explicit flags always win.
std::vector<std::string> apply_json_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::FileError("--config expects a file path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw CLI::FileError("cannot open config file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_object()) throw CLI::FileError("config file must hold a flat JSON object");
    auto given = [&args](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (given(flag)) continue;
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else if (value.is_boolean())
            text = value.get<bool>() ? "true" : "false";
        else if (value.is_number())
            text = value.dump();
        else
            throw CLI::FileError("config key '" + key + "' has an unsupported type");
        args.push_back(flag);
        args.push_back(text);
    }
    return args;
}

struct SchemeFlags {
    std::string scheme;
    int n = 0, k = 0, p = 0, r = 0, t = 0, m = 1;
    std::string family = "qam";
    std::string rotation = "on";
    int groups = 1;
};

void add_scheme_flags(CLI::App* cmd, SchemeFlags& sf) {
    cmd->add_option("--scheme", sf.scheme, "Scheme: apm, iqm, or ofdm")
        ->required()
        ->check(CLI::IsMember({"apm", "iqm", "ofdm"}));
    cmd->add_option("--n", sf.n, "Subcarriers per group (apm/iqm)");
    cmd->add_option("--k", sf.k, "Amplitude levels K (apm)");
    cmd->add_option("--p", sf.p, "Disjoint phase sets P (apm)");
    cmd->add_option("--r", sf.r, "In-phase PAM sets R (iqm)");
    cmd->add_option("--t", sf.t, "Quadrature PAM sets T (iqm)");
    cmd->add_option("--m", sf.m, "Per-set modulation order M (all schemes)");
    cmd->add_option("--family", sf.family, "ofdm constellation family: psk or qam")
        ->check(CLI::IsMember({"psk", "qam"}));
    cmd->add_option("--rotation", sf.rotation, "apm ring rotation: on or off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--groups", sf.groups, "Subcarrier groups per OFDM frame")->check(CLI::PositiveNumber);
}

SchemeConfig config_from_flags(const SchemeFlags& sf) {
    if (sf.scheme == "apm") {
        if (sf.n == 0 || sf.k == 0 || sf.p == 0)
            throw CLI::ValidationError("--scheme apm requires --n, --k, --p");
        return apm_config(sf.n, sf.k, sf.p, sf.m, sf.rotation == "on", sf.groups);
    }
    if (sf.scheme == "iqm") {
        if (sf.n == 0 || sf.r == 0 || sf.t == 0)
            throw CLI::ValidationError("--scheme iqm requires --n, --r, --t");
        return iqm_config(sf.n, sf.r, sf.t, sf.m, sf.groups);
    }
    if (sf.m < 2) throw CLI::ValidationError("--scheme ofdm requires --m >= 2");
    return plain_config(sf.m, sf.family == "psk" ? ModFamily::Psk : ModFamily::Qam, sf.groups);
}

// "start:step:stop" (inclusive) or a single value.
std::vector<double> parse_snr(const std::string& text) {
    double start = 0, step = 0, stop = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &stop) == 3) {
        if (step <= 0) throw CLI::ValidationError("--snr step must be positive");
        if (stop < start) throw CLI::ValidationError("--snr stop must be >= start");
        std::vector<double> out;
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
        return out;
    }
    try {
        return {std::stod(text)};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--snr expects start:step:stop or a single value");
    }
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit OutputTarget(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);  // LF endings everywhere
        if (!file) throw CLI::FileError("cannot open output file " + path);
        os = &file;
    }
};

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& pts) {
    os << "snr_db,ber,bit_errors,bits_sent,frames,detector,seed\n";
    for (const auto& pt : pts)
        os << fmt_snr(pt.snr_db) << ',' << fmt_sci(pt.ber) << ',' << pt.bit_errors << ','
           << pt.bits_sent << ',' << pt.frames << ',' << detector_name(pt.detector) << ','
           << pt.seed << '\n';
}

void write_bound_csv(std::ostream& os, const std::vector<double>& snrs,
                     const std::vector<double>& bounds) {
    os << "snr_db,ber_upper_bound\n";
    for (std::size_t i = 0; i < snrs.size(); ++i)
        os << fmt_snr(snrs[i]) << ',' << fmt_sci(bounds[i]) << '\n';
}

void write_rate_csv(std::ostream& os, const std::vector<RatePoint>& pts) {
    os << "snr_db,rate_bps,samples,stderr\n";
    for (const auto& pt : pts)
        os << fmt_snr(pt.snr_db) << ',' << fmt_fix(pt.rate_bps) << ',' << pt.samples << ','
           << fmt("%.6e", pt.stderr_bps) << '\n';
}

void write_med_csv(std::ostream& os, const SchemeConfig& cfg) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt_fix(*v) : std::string("n/a"); };
    os << "quantity,value\n";
    std::vector<std::complex<double>> points;
    if (const auto* a = std::get_if<ApmParams>(&cfg.scheme)) {
        auto c = build_apm(a->k, a->p, a->m, a->ring_rotation);
        points = c.all_points();
        if (a->ring_rotation) {
            auto rep = analytic_med_apm(c);
            os << "d1," << opt(rep.d1) << '\n';
            os << "d2," << opt(rep.d2) << '\n';
            os << "d3," << opt(rep.d3) << '\n';
            os << "d4," << opt(rep.d4) << '\n';
            os << "d_min," << opt(rep.d_min) << '\n';
        }
    } else if (const auto* i = std::get_if<IqmParams>(&cfg.scheme)) {
        auto c = build_iqm(i->r, i->t, i->m);
        points = c.all_points();
        auto rep = analytic_med_iqm(c);
        os << "d_min," << opt(rep.d_min) << '\n';
        os << "d1," << opt(rep.d1) << '\n';
    } else {
        points = plain_points(std::get<PlainParams>(cfg.scheme));
    }
    if (points.size() >= 2)
        os << "constellation_med," << fmt_fix(brute_force_med(points).value) << '\n';
    const BitLayout l = bit_layout(cfg);
    if (l.f >= 1 && l.f <= 12) {
        auto cb = build_codebook(cfg);
        os << "codebook_med," << fmt_fix(brute_force_med_codebook(cb.rows()).value) << '\n';
    } else {
        os << "codebook_med,n/a\n";
    }
}

void write_complexity_csv(std::ostream& os, const SchemeConfig& cfg) {
    os << "detector,per_group,per_subcarrier\n";
    auto ml = metric_count(cfg, Detector::Ml);
    os << "ml," << fmt("%.10g", ml.per_group) << ',' << fmt("%.10g", ml.per_subcarrier) << '\n';
    if (!cfg.is_plain()) {
        auto lc = metric_count(cfg, Detector::LcMl);
        os << "lcml," << fmt("%.10g", lc.per_group) << ',' << fmt("%.10g", lc.per_subcarrier)
           << '\n';
    }
}

std::string vec_int(const MdsTuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

std::string vec_fix(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_fix(v[i]);
    return s + ")";
}

void write_table(std::ostream& os, int which) {
    if (which == 1) {
        // amplitude/phase vectors for K = P = 2, N = 3, no ring rotation
        auto c = build_apm(2, 2, 1, false);
        auto code = enumerate_codewords({2, 3});
        os << "prefix,tuple,amplitude_vector,phase_vector\n";
        for (const auto& t : code) {
            std::vector<double> amps, phases;
            for (int v : t) {
                amps.push_back(c.ring_radii[static_cast<std::size_t>(v - 1)]);
                phases.push_back(std::arg(c.point(1, v, 0)));
            }
            MdsTuple prefix(t.begin(), t.end() - 1);
            os << '"' << vec_int(prefix) << "\",\"" << vec_int(t) << "\",\"" << vec_fix(amps)
               << "\",\"" << vec_fix(phases) << "\"\n";
        }
        return;
    }
    if (which == 2) {
        // bit-to-index map for K = 3, N = 3
        const MdsParams params{3, 3};
        const int f1 = index_bits(params);
        os << "bits,decimal,alphas,prefix,tuple\n";
        for (std::uint64_t d = 0; d < (std::uint64_t{1} << f1); ++d) {
            BitVec bits = bits_from_value(d, f1);
            MdsTuple tuple = bits_to_tuple(bits, params);
            std::string bitstr;
            for (auto b : bits) bitstr += static_cast<char>('0' + b);
            MdsTuple prefix(tuple.begin(), tuple.end() - 1);
            MdsTuple alphas = prefix;
            for (auto& v : alphas) --v;
            os << bitstr << ',' << d << ",\"" << vec_int(alphas) << "\",\"" << vec_int(prefix)
               << "\",\"" << vec_int(tuple) << "\"\n";
        }
        return;
    }
    if (which == 3) {
        // in-phase/quadrature components for R = T = 2, N = 3
        auto c = custom_iqm({{std::numbers::sqrt2 / 2.0}, {-std::numbers::sqrt2 / 2.0}},
                            {{0.5}, {-std::sqrt(3.0) / 2.0}});
        auto code = enumerate_codewords({2, 3});
        os << "prefix,tuple,inphase_components,quadrature_components\n";
        for (const auto& t : code) {
            std::vector<double> in, quad;
            for (int v : t) {
                in.push_back(c.in_sets[static_cast<std::size_t>(v - 1)][0]);
                quad.push_back(c.quad_sets[static_cast<std::size_t>(v - 1)][0]);
            }
            MdsTuple prefix(t.begin(), t.end() - 1);
            os << '"' << vec_int(prefix) << "\",\"" << vec_int(t) << "\",\"" << vec_fix(in)
               << "\",\"" << vec_fix(quad) << "\"\n";
        }
        return;
    }
    throw CLI::ValidationError("--which must be 1, 2, or 3");
}

std::vector<double> gammas_from_snrs(const std::vector<double>& snrs) {
    std::vector<double> g(snrs.size());
    for (std::size_t i = 0; i < snrs.size(); ++i) g[i] = NoiseParams{snrs[i]}.gamma();
    return g;
}

// ---- figure presets ------------------------------------------------------

struct PresetEntry {
    SchemeConfig config;
    Detector detector = Detector::Ml;
    enum class Kind { Ber, Bound, Rate } kind = Kind::Ber;
    std::string label;
};

struct Preset {
    std::string snr;
    std::uint64_t max_frames = 10'000'000;
    std::uint64_t samples = 10'000;
    std::vector<PresetEntry> entries;
};

Preset lookup_preset(const std::string& name) {
    using K = PresetEntry::Kind;
    Preset pr;
    if (name == "fig4") {
        pr.snr = "0:5:40";
        pr.max_frames = 50'000'000;
        pr.entries = {{apm_config(2, 2, 2), Detector::Ml, K::Ber, "apm-2-2-2_ml"},
                      {iqm_config(2, 2, 2), Detector::Ml, K::Ber, "iqm-2-2-2_ml"},
                      {plain_config(2, ModFamily::Psk), Detector::Ml, K::Ber, "ofdm-bpsk_ml"}};
    } else if (name == "fig5") {
        pr.snr = "0:5:40";
        pr.max_frames = 300'000;
        pr.entries = {{iqm_config(4, 4, 4), Detector::Ml, K::Ber, "iqm-4-4-4_ml"},
                      {apm_config(4, 2, 8), Detector::Ml, K::Ber, "apm-4-2-8_ml"},
                      {apm_config(4, 2, 4, 2), Detector::Ml, K::Ber, "apm-4-2-4-2_ml"},
                      {plain_config(8), Detector::Ml, K::Ber, "ofdm-8qam_ml"}};
    } else if (name == "fig6") {
        pr.snr = "0:5:40";
        pr.max_frames = 10'000'000;
        pr.entries = {{apm_config(4, 2, 8, 2), Detector::LcMl, K::Ber, "apm-4-2-8-2_lcml"},
                      {iqm_config(4, 8, 6), Detector::LcMl, K::Ber, "iqm-4-8-6_lcml"},
                      {plain_config(16), Detector::Ml, K::Ber, "ofdm-16qam_ml"}};
    } else if (name == "fig8") {
        pr.snr = "0:5:40";
        pr.max_frames = 300'000;
        for (const auto& cfg : {apm_config(2, 4, 4), apm_config(4, 2, 4, 2),
                                iqm_config(4, 2, 2, 2), iqm_config(2, 2, 2)}) {
            std::string base;
            for (char ch : cfg.name()) {
                if (ch == '(' || ch == ',') base += '-';
                else if (ch != ')') base += ch;
            }
            pr.entries.push_back({cfg, Detector::Ml, K::Ber, base + "_ml"});
            pr.entries.push_back({cfg, Detector::LcMl, K::Ber, base + "_lcml"});
            pr.entries.push_back({cfg, Detector::Ml, K::Bound, base + "_bound"});
        }
    } else if (name == "fig9a") {
        // matched 4 bps stand-ins within the rate estimator's f <= 12 budget
        pr.snr = "0:2:30";
        pr.samples = 10'000;
        pr.entries = {{apm_config(2, 8, 8, 2), Detector::Ml, K::Rate, "apm-2-8-8-2_rate"},
                      {iqm_config(2, 4, 4, 2), Detector::Ml, K::Rate, "iqm-2-4-4-2_rate"},
                      {plain_config(16), Detector::Ml, K::Rate, "ofdm-16qam_rate"}};
    } else if (name == "fig9b") {
        // matched 5 bps stand-ins
        pr.snr = "0:2:30";
        pr.samples = 2'000;
        pr.entries = {{apm_config(2, 8, 8, 4), Detector::Ml, K::Rate, "apm-2-8-8-4_rate"},
                      {iqm_config(2, 8, 8, 2), Detector::Ml, K::Rate, "iqm-2-8-8-2_rate"},
                      {plain_config(32), Detector::Ml, K::Rate, "ofdm-32qam_rate"}};
    } else {
        throw CLI::ValidationError("unknown preset " + name +
                                   " (expected fig4, fig5, fig6, fig8, fig9a, fig9b)");
    }
    return pr;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDS-coded modulation link simulator"};
    app.require_subcommand(1);

    std::string config_path_doc;
    auto add_config_file = [&config_path_doc](CLI::App* cmd) {
        // handled by apply_json_config before parsing; registered for --help
        cmd->add_option("--config", config_path_doc,
                        "flat JSON config file mirroring the long flags (flags override)");
    };

    // shared option storage
    SchemeFlags sf_ber, sf_bound, sf_rate, sf_med, sf_cplx;
    std::string snr_ber = "0:5:40", snr_bound = "0:5:40", snr_rate = "0:2:30";
    std::uint64_t seed_ber = 1, seed_rate = 1, seed_preset = 1;
    std::string det_ber = "ml";
    std::uint64_t min_errors = 200, max_frames = 10'000'000, samples = 10'000;
    int threads_ber = default_threads(), threads_bound = default_threads(),
        threads_rate = default_threads(), threads_preset = default_threads();
    std::string out_ber, out_bound, out_rate, out_med, out_cplx, out_tables, outdir = ".";
    int which_table = 1;
    std::string preset_name;

    CLI::App* ber = app.add_subcommand("ber", "Monte-Carlo BER sweep over a Rayleigh channel");
    add_scheme_flags(ber, sf_ber);
    ber->add_option("--snr", snr_ber, "SNR sweep start:step:stop in dB (inclusive)");
    ber->add_option("--detector", det_ber, "ml or lcml")->check(CLI::IsMember({"ml", "lcml"}));
    ber->add_option("--seed", seed_ber, "master RNG seed")->envname("MDSMOD_SEED");
    ber->add_option("--min-errors", min_errors, "stop a point after this many bit errors");
    ber->add_option("--max-frames", max_frames, "hard frame cap per point");
    ber->add_option("--threads", threads_ber, "worker threads (any count gives identical output)");
    ber->add_option("--out", out_ber, "output CSV path (default: stdout)");
    add_config_file(ber);

    CLI::App* bound = app.add_subcommand("bound", "Union bound on BER");
    add_scheme_flags(bound, sf_bound);
    bound->add_option("--snr", snr_bound, "SNR sweep start:step:stop in dB");
    bound->add_option("--threads", threads_bound, "worker threads");
    bound->add_option("--out", out_bound, "output CSV path");
    add_config_file(bound);

    CLI::App* rate = app.add_subcommand("rate", "Monte-Carlo achievable rate");
    add_scheme_flags(rate, sf_rate);
    rate->add_option("--snr", snr_rate, "SNR sweep start:step:stop in dB");
    rate->add_option("--samples", samples, "Monte-Carlo channel/noise samples per point");
    rate->add_option("--seed", seed_rate, "master RNG seed")->envname("MDSMOD_SEED");
    rate->add_option("--threads", threads_rate, "worker threads");
    rate->add_option("--out", out_rate, "output CSV path");
    add_config_file(rate);

    CLI::App* med = app.add_subcommand("med", "Analytic and brute-force minimum distances");
    add_scheme_flags(med, sf_med);
    med->add_option("--out", out_med, "output CSV path");
    add_config_file(med);

    CLI::App* cplx = app.add_subcommand("complexity", "Detector metric counts per group/subcarrier");
    add_scheme_flags(cplx, sf_cplx);
    cplx->add_option("--out", out_cplx, "output CSV path");
    add_config_file(cplx);

    CLI::App* tables = app.add_subcommand("tables", "Reference mapping tables");
    tables->add_option("--which", which_table, "table number: 1, 2, or 3")->required();
    tables->add_option("--out", out_tables, "output CSV path");
    add_config_file(tables);

    CLI::App* preset = app.add_subcommand("preset", "Run a named figure-reproduction preset");
    preset->add_option("--name", preset_name, "fig4, fig5, fig6, fig8, fig9a, or fig9b")->required();
    preset->add_option("--outdir", outdir, "directory for the emitted CSV files");
    preset->add_option("--seed", seed_preset, "master RNG seed")->envname("MDSMOD_SEED");
    preset->add_option("--threads", threads_preset, "worker threads");
    add_config_file(preset);

    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        args = apply_json_config(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config file error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*ber) {
            auto cfg = config_from_flags(sf_ber);
            auto pts = run_ber_sweep(cfg, parse_snr(snr_ber),
                                     det_ber == "ml" ? Detector::Ml : Detector::LcMl,
                                     {min_errors, max_frames}, seed_ber, threads_ber);
            OutputTarget out(out_ber);
            write_ber_csv(*out.os, pts);
        } else if (*bound) {
            auto cfg = config_from_flags(sf_bound);
            auto snrs = parse_snr(snr_bound);
            auto bounds =
                union_bound_ber_gamma(build_codebook(cfg), gammas_from_snrs(snrs), threads_bound);
            OutputTarget out(out_bound);
            write_bound_csv(*out.os, snrs, bounds);
        } else if (*rate) {
            auto cfg = config_from_flags(sf_rate);
            auto pts = achievable_rate_sweep(build_codebook(cfg), parse_snr(snr_rate), samples,
                                             seed_rate, threads_rate);
            OutputTarget out(out_rate);
            write_rate_csv(*out.os, pts);
        } else if (*med) {
            auto cfg = config_from_flags(sf_med);
            validate(cfg);
            OutputTarget out(out_med);
            write_med_csv(*out.os, cfg);
        } else if (*cplx) {
            auto cfg = config_from_flags(sf_cplx);
            validate(cfg);
            OutputTarget out(out_cplx);
            write_complexity_csv(*out.os, cfg);
        } else if (*tables) {
            OutputTarget out(out_tables);
            write_table(*out.os, which_table);
        } else if (*preset) {
            auto pr = lookup_preset(preset_name);
            for (const auto& entry : pr.entries) {
                const std::string path = outdir + "/" + preset_name + "_" + entry.label + ".csv";
                OutputTarget out(path);
                auto snrs = parse_snr(pr.snr);
                if (entry.kind == PresetEntry::Kind::Ber) {
                    auto pts = run_ber_sweep(entry.config, snrs, entry.detector,
                                             {200, pr.max_frames}, seed_preset, threads_preset);
                    write_ber_csv(*out.os, pts);
                } else if (entry.kind == PresetEntry::Kind::Bound) {
                    auto bounds = union_bound_ber_gamma(build_codebook(entry.config),
                                                        gammas_from_snrs(snrs), threads_preset);
                    write_bound_csv(*out.os, snrs, bounds);
                } else {
                    auto pts = achievable_rate_sweep(build_codebook(entry.config), snrs,
                                                     pr.samples, seed_preset, threads_preset);
                    write_rate_csv(*out.os, pts);
                }
                std::cout << path << '\n';
            }
        }
    } catch (const unsupported_config_error& e) {
        std::cerr << "unsupported configuration: " << e.what() << '\n';
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
