// Command-line front end: achievable rates, reliability cdfs, constellation
// tables, decoding simulation, sweeps, and the statistical validation suite.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "grandrate/bicm.hpp"
#include "grandrate/experiments.hpp"
#include "grandrate/grand.hpp"
#include "grandrate/parallel.hpp"
#include "grandrate/rates.hpp"

namespace {

using nlohmann::json;
using namespace grandrate;

constexpr double kLn2 = 0.6931471805599453;
constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

struct ChannelArgs {
    std::string channel = "bpsk-awgn";
    double snr_db = 3.0;
    double p = 0.11;
    std::string scheme = "qpsk";
    std::string labeling = "gray";
    std::string fading = "awgn";
    int level = 0; // 0 = sum over levels (bicm only)
};

void add_channel_options(CLI::App* cmd, ChannelArgs& args) {
    cmd->add_option("--channel", args.channel, "bpsk-awgn | bpsk-rayleigh | bsc | bicm")
        ->check(CLI::IsMember({"bpsk-awgn", "bpsk-rayleigh", "bsc", "bicm"}));
    cmd->add_option("--snr", args.snr_db, "SNR in dB");
    cmd->add_option("--p", args.p, "BSC crossover probability");
    cmd->add_option("--scheme", args.scheme, "bicm constellation: qpsk | 8psk | 16qam");
    cmd->add_option("--labeling", args.labeling, "bicm labeling: gray | sp");
    cmd->add_option("--fading", args.fading, "bicm fading: awgn | rayleigh");
    cmd->add_option("--level", args.level, "bicm label position 1..m (0 = all levels)");
}

BitChannel build_channel(const ChannelArgs& args) {
    if (args.channel == "bpsk-awgn") return bpsk_awgn_channel(args.snr_db);
    if (args.channel == "bpsk-rayleigh") return bpsk_rayleigh_channel(args.snr_db);
    if (args.channel == "bsc") return bsc_channel(args.p);
    if (args.channel == "bicm") {
        const Constellation c =
            make_constellation(scheme_from_string(args.scheme), labeling_from_string(args.labeling));
        const FadingModel f{args.fading == "rayleigh" ? Fading::RayleighCsi : Fading::Awgn,
                            args.snr_db};
        const int level = args.level == 0 ? 1 : args.level;
        return bicm_bit_channel(c, level, f);
    }
    throw CLI::ValidationError("--channel", "unknown channel kind: " + args.channel);
}

std::string channel_tag(const ChannelArgs& args) {
    if (args.channel == "bsc") return "bsc(p=" + std::to_string(args.p) + ")";
    std::ostringstream os;
    os << args.channel;
    if (args.channel == "bicm") {
        os << "(" << args.scheme << "," << args.labeling << "," << args.fading << ")";
    }
    os << "@" << args.snr_db << "dB";
    return os.str();
}

void emit(const json& j, const std::string& output) {
    const std::string text = j.dump(2) + "\n";
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        write_text_atomic(output, text);
    }
}

double present(double nats, bool bits) { return bits ? nats / kLn2 : nats; }

// exit codes: 0 success, 1 validation failure, 2 runtime numerical flag
int run_rate(const ChannelArgs& ch_args, std::size_t samples, std::uint64_t seed, bool bits,
             const std::string& output) {
    RateConfig cfg;
    cfg.samples = samples;
    cfg.psi_samples = samples;
    cfg.seed = seed;

    json out;
    out["command"] = "rate";
    out["channel"] = channel_tag(ch_args);
    out["seed"] = seed;
    out["samples"] = samples;
    out["units"] = bits ? "bits" : "nats";
    out["config_hash"] = [&] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a(channel_tag(ch_args) + ";" + std::to_string(samples) + ";" +
                                std::to_string(seed))));
        return std::string(buf);
    }();

    bool edge = false;
    if (ch_args.channel == "bicm" && ch_args.level == 0) {
        const Constellation c = make_constellation(scheme_from_string(ch_args.scheme),
                                                   labeling_from_string(ch_args.labeling));
        const FadingModel f{ch_args.fading == "rayleigh" ? Fading::RayleighCsi : Fading::Awgn,
                            ch_args.snr_db};
        const BicmRateResult orb = bicm_rate(c, f, RateMetric::Orbgrand, cfg);
        const BicmRateResult sg = bicm_rate(c, f, RateMetric::Sgrand, cfg);
        const BicmRateResult mi = bicm_rate(c, f, RateMetric::Mi, cfg);
        json rep;
        rep["i_orbgrand"] = present(orb.total, bits);
        rep["i_sgrand"] = present(sg.total, bits);
        rep["i_mi"] = present(mi.total, bits);
        rep["mc_std_error"] =
            present(std::max({orb.std_error, sg.std_error, mi.std_error}), bits);
        json levels = json::array();
        for (std::size_t i = 0; i < orb.per_level.size(); ++i) {
            levels.push_back({{"level", i + 1},
                              {"i_orbgrand", present(orb.per_level[i], bits)},
                              {"i_sgrand", present(sg.per_level[i], bits)},
                              {"i_mi", present(mi.per_level[i], bits)}});
        }
        rep["per_level"] = levels;
        edge = orb.any_bracket_edge || sg.any_bracket_edge;
        rep["bracket_edge"] = edge;
        out["report"] = rep;
    } else {
        const BitChannel ch = build_channel(ch_args);
        const RateReport rep = rate_report(ch, cfg);
        json r;
        r["i_orbgrand"] = present(rep.i_orbgrand, bits);
        r["i_mi"] = present(rep.i_mi, bits);
        r["i_sgrand"] = present(rep.i_sgrand, bits);
        r["theta_star_orb"] = rep.theta_star_orb;
        r["theta_star_sgrand"] = rep.theta_star_sgrand;
        r["mc_std_error"] = present(rep.mc_std_error, bits);
        r["integration_abs_err"] = present(rep.integration_abs_err, bits);
        r["error_budget"] = present(error_budget(rep), bits);
        r["bracket_edge_orb"] = rep.bracket_edge_orb;
        r["bracket_edge_sgrand"] = rep.bracket_edge_sgrand;
        edge = rep.bracket_edge_orb || rep.bracket_edge_sgrand;
        out["report"] = r;
    }
    emit(out, output);
    return edge ? 2 : 0;
}

int run_psi(const ChannelArgs& ch_args, std::size_t samples, std::uint64_t seed, double t_max,
            int points, const std::string& output) {
    const BitChannel ch = build_channel(ch_args);
    const ReliabilityCdf psi = ch.has_analytic_psi() ? ch.analytic_psi() : psi_cdf(ch, samples, seed);
    json out;
    out["command"] = "psi";
    out["channel"] = channel_tag(ch_args);
    out["form"] = psi.is_empirical() ? "empirical" : "analytic";
    out["seed"] = seed;
    json ts = json::array(), vals = json::array();
    for (int i = 0; i < points; ++i) {
        const double t = t_max * i / (points - 1);
        ts.push_back(t);
        vals.push_back(psi(t));
    }
    out["t"] = ts;
    out["psi"] = vals;
    emit(out, output);
    return 0;
}

int run_decode(const ChannelArgs& ch_args, int n, int k, std::uint64_t code_seed,
               const std::string& weighting, std::uint64_t max_queries, std::uint64_t seed,
               const std::string& output) {
    const LinearCode code = LinearCode::random_systematic(n, k, code_seed);
    const BitChannel ch = build_channel(ch_args);
    const QueryPlan plan{weighting_from_string(weighting), max_queries};

    Rng rng = make_rng(seed, 0);
    LinearCode::Word info;
    for (int i = 0; i < k; ++i) {
        if (rng() & 1ull) info.set(i);
    }
    const LinearCode::Word sent = code.encode(info);
    std::vector<double> llrs(n);
    for (int i = 0; i < n; ++i) llrs[i] = ch.sample_llr(sent.test(i) ? +1 : -1, rng);
    const DecodeOutcome res = grand_decode(llrs, code, plan);

    json out;
    out["command"] = "decode";
    out["channel"] = channel_tag(ch_args);
    out["n"] = n;
    out["k"] = k;
    out["weighting"] = weighting;
    out["max_queries"] = max_queries;
    out["seed"] = seed;
    out["decoded"] = res.decoded;
    out["queries_used"] = res.queries_used;
    if (res.decoded) {
        bool match = true;
        std::string word;
        for (int i = 0; i < n; ++i) {
            word += res.codeword[i] ? '1' : '0';
            match = match && ((res.codeword[i] != 0) == sent.test(i));
        }
        out["codeword"] = word;
        out["matches_transmitted"] = match;
        out["metric_value"] = res.metric_value;
    }
    emit(out, output);
    return 0;
}

int run_bler(const ChannelArgs& ch_args, int n, int k, std::uint64_t code_seed,
             const std::string& weighting, std::uint64_t max_queries, std::size_t trials,
             std::uint64_t seed, const std::string& output) {
    const LinearCode code = LinearCode::random_systematic(n, k, code_seed);
    const BitChannel ch = build_channel(ch_args);
    const QueryPlan plan{weighting_from_string(weighting), max_queries};

    // outcome per trial: 0 ok, 1 wrong codeword, 2 abandoned
    std::vector<std::uint8_t> outcome(trials);
    std::vector<double> queries(trials);
    parallel_for(trials, default_worker_count(), [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        LinearCode::Word info;
        for (int i = 0; i < k; ++i) {
            if (rng() & 1ull) info.set(i);
        }
        const LinearCode::Word sent = code.encode(info);
        std::vector<double> llrs(n);
        for (int i = 0; i < n; ++i) llrs[i] = ch.sample_llr(sent.test(i) ? +1 : -1, rng);
        const DecodeOutcome res = grand_decode(llrs, code, plan);
        queries[t] = static_cast<double>(res.queries_used);
        if (!res.decoded) {
            outcome[t] = 2;
        } else {
            outcome[t] = 0;
            for (int i = 0; i < n; ++i) {
                if ((res.codeword[i] != 0) != sent.test(i)) {
                    outcome[t] = 1;
                    break;
                }
            }
        }
    });
    std::size_t wrong = 0, abandoned = 0;
    double total_queries = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        wrong += outcome[t] == 1;
        abandoned += outcome[t] == 2;
        total_queries += queries[t];
    }
    const double nt = static_cast<double>(trials);
    const double bler = static_cast<double>(wrong + abandoned) / nt;

    json out;
    out["command"] = "bler";
    out["channel"] = channel_tag(ch_args);
    out["n"] = n;
    out["k"] = k;
    out["rate_nats"] = static_cast<double>(k) / n * kLn2;
    out["weighting"] = weighting;
    out["max_queries"] = max_queries;
    out["trials"] = trials;
    out["seed"] = seed;
    out["bler"] = bler;
    out["bler_std_error"] = std::sqrt(std::max(0.0, bler * (1.0 - bler)) / nt);
    out["wrong_rate"] = static_cast<double>(wrong) / nt;
    out["abandon_rate"] = static_cast<double>(abandoned) / nt;
    out["avg_queries"] = total_queries / nt;
    emit(out, output);
    return 0;
}

int run_constellation_dump(const std::string& scheme, const std::string& labeling,
                           const std::string& output) {
    const Constellation c =
        make_constellation(scheme_from_string(scheme), labeling_from_string(labeling));
    json out;
    out["command"] = "constellation-dump";
    out["scheme"] = c.scheme_name;
    out["labeling"] = c.labeling_name;
    out["bits_per_symbol"] = c.m;
    // entries sorted by label value: label -> point
    std::vector<std::size_t> order(c.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&c](std::size_t a, std::size_t b) { return c.labels[a] < c.labels[b]; });
    json entries = json::array();
    for (std::size_t i : order) {
        std::string bits;
        for (int b = c.m - 1; b >= 0; --b) bits += ((c.labels[i] >> b) & 1u) ? '1' : '0';
        entries.push_back({{"label", bits},
                           {"label_value", c.labels[i]},
                           {"re", c.points[i].real()},
                           {"im", c.points[i].imag()}});
    }
    out["entries"] = entries;
    emit(out, output);
    return 0;
}

int run_validate(std::uint64_t seed, std::size_t samples) {
    const ValidationReport report = validate_all(seed, samples);
    for (const auto& e : report.entries) {
        std::printf("%s %-32s value=%.6g threshold=%.6g %s\n", e.pass ? "PASS" : "FAIL",
                    e.name.c_str(), e.value, e.threshold, e.details.c_str());
    }
    std::printf("%s: %zu/%zu checks passed\n", report.all_pass() ? "OK" : "FAILED",
                static_cast<std::size_t>(
                    std::count_if(report.entries.begin(), report.entries.end(),
                                  [](const ValidationEntry& e) { return e.pass; })),
                report.entries.size());
    return report.all_pass() ? 0 : 2;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& output_override,
                  bool gnuplot) {
    std::ifstream f(spec_path);
    if (!f) {
        std::cerr << "cannot read sweep spec: " << spec_path << "\n";
        return 1;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    SweepSpec spec = SweepSpec::from_json_text(ss.str());
    if (!output_override.empty()) spec.output_path = output_override;
    if (gnuplot) spec.gnuplot = true;
    const auto rows = run_sweep(spec);
    if (spec.output_path.empty()) {
        std::cout << rows_to_csv(rows);
    } else {
        std::cerr << rows.size() << " rows -> " << spec.output_path << "\n";
    }
    bool edge = false;
    for (const auto& r : rows) edge = edge || r.metric.find("bracket_edge") != std::string::npos;
    return edge ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Achievable rates and decoding simulation for the GRAND family over "
                 "general binary-input bit channels"};
    app.require_subcommand(1);

    ChannelArgs ch_args;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    std::string units = "nats";
    std::string output;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--samples", samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "master RNG seed");
        cmd->add_option("--output,-o", output, "write JSON/CSV here instead of stdout");
    };

    auto* rate = app.add_subcommand("rate", "achievable rates of one bit channel");
    add_channel_options(rate, ch_args);
    add_common(rate);
    rate->add_option("--units", units, "nats | bits")->check(CLI::IsMember({"nats", "bits"}));

    double t_max = 25.0;
    int psi_points = 101;
    auto* psi = app.add_subcommand("psi", "reliability cdf of |LLR|");
    add_channel_options(psi, ch_args);
    add_common(psi);
    psi->add_option("--t-max", t_max, "largest t to tabulate")->check(CLI::PositiveNumber);
    psi->add_option("--points", psi_points, "number of grid points")->check(CLI::Range(2, 100000));

    int code_n = 128, code_k = 105;
    std::uint64_t code_seed = 1, max_queries = 1'000'000;
    std::string weighting = "orbgrand";
    std::size_t trials = 10'000;

    auto* decode = app.add_subcommand("decode", "single GRAND decode of a noisy codeword");
    add_channel_options(decode, ch_args);
    add_common(decode);
    decode->add_option("--n", code_n, "block length")->check(CLI::Range(2, 128));
    decode->add_option("--k", code_k, "code dimension")->check(CLI::Range(1, 127));
    decode->add_option("--code-seed", code_seed, "seed of the random systematic code");
    decode->add_option("--weighting", weighting, "grand | orbgrand | sgrand")
        ->check(CLI::IsMember({"grand", "orbgrand", "sgrand"}));
    decode->add_option("--max-queries", max_queries, "query budget Q")->check(CLI::PositiveNumber);

    auto* bler = app.add_subcommand("bler", "block error rate of GRAND decoding");
    add_channel_options(bler, ch_args);
    add_common(bler);
    bler->add_option("--n", code_n, "block length")->check(CLI::Range(2, 128));
    bler->add_option("--k", code_k, "code dimension")->check(CLI::Range(1, 127));
    bler->add_option("--code-seed", code_seed, "seed of the random systematic code");
    bler->add_option("--weighting", weighting, "grand | orbgrand | sgrand")
        ->check(CLI::IsMember({"grand", "orbgrand", "sgrand"}));
    bler->add_option("--max-queries", max_queries, "query budget Q")->check(CLI::PositiveNumber);
    bler->add_option("--trials", trials, "number of decoding trials")->check(CLI::PositiveNumber);

    std::string sweep_spec_path;
    bool gnuplot = false;
    auto* sweep = app.add_subcommand("sweep", "run a sweep described by a JSON spec file");
    sweep->add_option("--spec", sweep_spec_path, "path to the sweep spec JSON")->required();
    sweep->add_option("--output,-o", output, "override the spec's CSV output path");
    sweep->add_flag("--gnuplot", gnuplot, "additionally emit a plot-ready columnar file");

    std::string dump_scheme = "16qam", dump_labeling = "sp";
    auto* dump = app.add_subcommand("constellation-dump", "emit a labeling table for audit");
    dump->add_option("--scheme", dump_scheme, "qpsk | 8psk | 16qam");
    dump->add_option("--labeling", dump_labeling, "gray | sp");
    dump->add_option("--output,-o", output, "write JSON here instead of stdout");

    auto* validate = app.add_subcommand("validate", "run the statistical invariant suites");
    validate->add_option("--seed", seed, "master RNG seed");
    validate->add_option("--samples", samples, "Monte Carlo sample count (default 200000 here)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (rate->parsed()) return run_rate(ch_args, samples, seed, units == "bits", output);
        if (psi->parsed()) return run_psi(ch_args, samples, seed, t_max, psi_points, output);
        if (decode->parsed()) {
            return run_decode(ch_args, code_n, code_k, code_seed, weighting, max_queries, seed,
                              output);
        }
        if (bler->parsed()) {
            return run_bler(ch_args, code_n, code_k, code_seed, weighting, max_queries, trials,
                            seed, output);
        }
        if (sweep->parsed()) return run_sweep_cmd(sweep_spec_path, output, gnuplot);
        if (dump->parsed()) return run_constellation_dump(dump_scheme, dump_labeling, output);
        if (validate->parsed()) {
            // --samples doubles as the suite scale when given on validate
            return run_validate(seed, validate->count("--samples") ? samples : 200'000);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
