#include "grandrate/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "grandrate/bicm.hpp"
#include "grandrate/parallel.hpp"
#include "grandrate/rates.hpp"
#include "grandrate/stats.hpp"

namespace grandrate {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::string weighting_to_string(Weighting w) {
    switch (w) {
        case Weighting::Unit: return "grand";
        case Weighting::AbsLlr: return "sgrand";
        case Weighting::RankOverN: return "orbgrand";
    }
    return "?";
}

Weighting weighting_from_string(const std::string& s) {
    if (s == "grand" || s == "unit") return Weighting::Unit;
    if (s == "sgrand" || s == "abs-llr") return Weighting::AbsLlr;
    if (s == "orbgrand" || s == "rank") return Weighting::RankOverN;
    throw std::invalid_argument("unknown weighting: " + s);
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "psi_curves") return Scenario::PsiCurves;
    if (s == "bpsk_rates") return Scenario::BpskRates;
    if (s == "bicm_awgn_gray") return Scenario::BicmAwgnGray;
    if (s == "bicm_awgn_sp") return Scenario::BicmAwgnSp;
    if (s == "bicm_rayleigh_gray") return Scenario::BicmRayleighGray;
    if (s == "bicm_rayleigh_sp") return Scenario::BicmRayleighSp;
    if (s == "bler") return Scenario::Bler;
    throw std::invalid_argument("unknown scenario: " + s);
}

std::string scenario_to_string(Scenario s) {
    switch (s) {
        case Scenario::PsiCurves: return "psi_curves";
        case Scenario::BpskRates: return "bpsk_rates";
        case Scenario::BicmAwgnGray: return "bicm_awgn_gray";
        case Scenario::BicmAwgnSp: return "bicm_awgn_sp";
        case Scenario::BicmRayleighGray: return "bicm_rayleigh_gray";
        case Scenario::BicmRayleighSp: return "bicm_rayleigh_sp";
        case Scenario::Bler: return "bler";
    }
    return "?";
}

SweepSpec SweepSpec::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SweepSpec spec;
    spec.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    spec.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) spec.samples = j["samples"].get<std::size_t>();
    if (j.contains("n")) spec.code_n = j["n"].get<int>();
    if (j.contains("k")) spec.code_k = j["k"].get<int>();
    if (j.contains("max_queries")) spec.max_queries = j["max_queries"].get<std::uint64_t>();
    if (j.contains("trials")) spec.trials = j["trials"].get<std::size_t>();
    if (j.contains("weighting")) spec.weighting = weighting_from_string(j["weighting"].get<std::string>());
    if (j.contains("output")) spec.output_path = j["output"].get<std::string>();
    if (j.contains("gnuplot")) spec.gnuplot = j["gnuplot"].get<bool>();
    spec.validate();
    return spec;
}

void SweepSpec::validate() const {
    if (snr_grid_db.empty()) throw std::invalid_argument("sweep spec: empty snr grid");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
        if (!(snr_grid_db[i] > snr_grid_db[i - 1])) {
            throw std::invalid_argument("sweep spec: snr grid must be strictly increasing");
        }
    }
    if (scenario == Scenario::Bler) {
        if (trials < 100) throw std::invalid_argument("sweep spec: bler needs trials >= 100");
        if (!(1 <= code_k && code_k < code_n && code_n <= 128)) {
            throw std::invalid_argument("sweep spec: need 1 <= k < n <= 128");
        }
        if (max_queries < 1) throw std::invalid_argument("sweep spec: max_queries must be >= 1");
    } else if (scenario != Scenario::PsiCurves) {
        if (samples < 10'000) {
            throw std::invalid_argument("sweep spec: rate scenarios need samples >= 10^4");
        }
    }
}

std::string SweepSpec::canonical() const {
    std::string s = "scenario=" + scenario_to_string(scenario) + ";snr=[";
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        if (i) s += ",";
        s += fmt17(snr_grid_db[i]);
    }
    s += "];seed=" + std::to_string(seed);
    s += ";samples=" + std::to_string(samples);
    if (scenario == Scenario::Bler) {
        s += ";n=" + std::to_string(code_n) + ";k=" + std::to_string(code_k);
        s += ";max_queries=" + std::to_string(max_queries);
        s += ";trials=" + std::to_string(trials);
        s += ";weighting=" + weighting_to_string(weighting);
    }
    return s;
}

std::string SweepSpec::config_hash() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

namespace {

struct TaskOutput {
    std::vector<ResultRow> rows;
};

std::uint64_t task_seed(const SweepSpec& spec, const std::string& tag) {
    return splitmix64(spec.seed ^ fnv1a(tag));
}

ResultRow base_row(const SweepSpec& spec, const std::string& hash) {
    ResultRow r;
    r.scenario = scenario_to_string(spec.scenario);
    r.config_hash = hash;
    return r;
}

void push_rate_rows(std::vector<ResultRow>& rows, ResultRow proto, const std::string& level,
                    double orb, double orb_se, double mi, double mi_se, bool edge) {
    proto.level = level;
    proto.metric = "i_orbgrand";
    proto.value = orb;
    proto.std_error = orb_se;
    rows.push_back(proto);
    proto.metric = "i_mi";
    proto.value = mi;
    proto.std_error = mi_se;
    rows.push_back(proto);
    if (edge) {
        proto.metric = "orbgrand_bracket_edge";
        proto.value = 1.0;
        proto.std_error = 0.0;
        rows.push_back(proto);
    }
}

TaskOutput run_psi_task(const SweepSpec& spec, double snr, bool rayleigh,
                        const std::string& hash) {
    TaskOutput out;
    const BitChannel ch = rayleigh ? bpsk_rayleigh_channel(snr) : bpsk_awgn_channel(snr);
    const ReliabilityCdf psi = ch.analytic_psi();
    ResultRow proto = base_row(spec, hash);
    proto.scheme = "bpsk";
    proto.labeling = "-";
    proto.fading = rayleigh ? "rayleigh" : "awgn";
    proto.snr_db = snr;
    proto.metric = "psi";
    proto.seed = task_seed(spec, "psi;" + proto.fading + ";" + fmt17(snr));
    for (int i = 0; i <= 100; ++i) {
        const double t = 0.25 * i;
        proto.level = fmt_short(t);
        proto.value = psi(t);
        proto.std_error = 0.0;
        out.rows.push_back(proto);
    }
    return out;
}

TaskOutput run_bpsk_rate_task(const SweepSpec& spec, double snr, bool rayleigh,
                              const std::string& hash) {
    TaskOutput out;
    const BitChannel ch = rayleigh ? bpsk_rayleigh_channel(snr) : bpsk_awgn_channel(snr);
    ResultRow proto = base_row(spec, hash);
    proto.scheme = "bpsk";
    proto.labeling = "-";
    proto.fading = rayleigh ? "rayleigh" : "awgn";
    proto.snr_db = snr;
    proto.level = "sum";
    proto.seed = task_seed(spec, "bpsk;" + proto.fading + ";" + fmt17(snr));

    RateConfig cfg;
    cfg.samples = spec.samples;
    cfg.psi_samples = spec.samples;
    cfg.seed = proto.seed;
    const RateReport rep = rate_report(ch, cfg);

    proto.metric = "i_orbgrand";
    proto.value = rep.i_orbgrand;
    proto.std_error = rep.mc_std_error;
    out.rows.push_back(proto);
    proto.metric = "i_sgrand";
    proto.value = rep.i_sgrand;
    out.rows.push_back(proto);
    proto.metric = "i_mi";
    proto.value = rep.i_mi;
    proto.std_error = 0.0; // deterministic for the analytic BPSK kinds
    out.rows.push_back(proto);
    if (rep.bracket_edge_orb) {
        proto.metric = "orbgrand_bracket_edge";
        proto.value = 1.0;
        out.rows.push_back(proto);
    }
    if (rep.bracket_edge_sgrand) {
        proto.metric = "sgrand_bracket_edge";
        proto.value = 1.0;
        out.rows.push_back(proto);
    }
    return out;
}

TaskOutput run_bicm_task(const SweepSpec& spec, double snr, Scheme scheme, bool rayleigh,
                         LabelingRule labeling, const std::string& hash) {
    TaskOutput out;
    const Constellation c = make_constellation(scheme, labeling);
    const FadingModel fading{rayleigh ? Fading::RayleighCsi : Fading::Awgn, snr};
    ResultRow proto = base_row(spec, hash);
    proto.scheme = c.scheme_name;
    proto.labeling = c.labeling_name;
    proto.fading = rayleigh ? "rayleigh" : "awgn";
    proto.snr_db = snr;
    proto.seed = task_seed(spec, "bicm;" + c.scheme_name + ";" + c.labeling_name + ";" +
                                     proto.fading + ";" + fmt17(snr));

    RateConfig cfg;
    cfg.samples = spec.samples;
    cfg.psi_samples = spec.samples;
    cfg.seed = proto.seed;
    const BicmRateResult orb = bicm_rate(c, fading, RateMetric::Orbgrand, cfg);
    const BicmRateResult mi = bicm_rate(c, fading, RateMetric::Mi, cfg);

    for (int level = 1; level <= c.m; ++level) {
        push_rate_rows(out.rows, proto, std::to_string(level), orb.per_level[level - 1],
                       orb.per_level_std_error[level - 1], mi.per_level[level - 1],
                       mi.per_level_std_error[level - 1], false);
    }
    push_rate_rows(out.rows, proto, "sum", orb.total, orb.std_error, mi.total, mi.std_error,
                   orb.any_bracket_edge);
    return out;
}

TaskOutput run_bler_task(const SweepSpec& spec, double snr, const std::string& hash) {
    TaskOutput out;
    ResultRow proto = base_row(spec, hash);
    proto.scheme = "rlc_n" + std::to_string(spec.code_n) + "_k" + std::to_string(spec.code_k);
    proto.labeling = weighting_to_string(spec.weighting);
    proto.fading = "awgn";
    proto.snr_db = snr;
    proto.level = "sum";
    proto.seed = task_seed(spec, "bler;" + fmt17(snr));

    const LinearCode code = LinearCode::random_systematic(spec.code_n, spec.code_k, spec.seed);
    const BitChannel ch = bpsk_awgn_channel(snr);
    const QueryPlan plan{spec.weighting, spec.max_queries};

    std::size_t wrong = 0, abandoned = 0;
    double total_queries = 0.0;
    std::vector<double> llrs(spec.code_n);
    LinearCode::Word info;
    for (std::size_t t = 0; t < spec.trials; ++t) {
        Rng rng = make_rng(proto.seed, t);
        info.reset();
        for (int i = 0; i < spec.code_k; ++i) {
            if (rng() & 1ull) info.set(i);
        }
        const LinearCode::Word sent = code.encode(info);
        for (int i = 0; i < spec.code_n; ++i) {
            llrs[i] = ch.sample_llr(sent.test(i) ? +1 : -1, rng);
        }
        const DecodeOutcome res = grand_decode(llrs, code, plan);
        total_queries += static_cast<double>(res.queries_used);
        if (!res.decoded) {
            ++abandoned;
        } else {
            for (int i = 0; i < spec.code_n; ++i) {
                if ((res.codeword[i] != 0) != sent.test(i)) {
                    ++wrong;
                    break;
                }
            }
        }
    }
    const double nt = static_cast<double>(spec.trials);
    const auto binom_se = [nt](double p) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / nt); };

    const double bler = static_cast<double>(wrong + abandoned) / nt;
    proto.metric = "bler";
    proto.value = bler;
    proto.std_error = binom_se(bler);
    out.rows.push_back(proto);
    proto.metric = "wrong_rate";
    proto.value = static_cast<double>(wrong) / nt;
    proto.std_error = binom_se(proto.value);
    out.rows.push_back(proto);
    proto.metric = "abandon_rate";
    proto.value = static_cast<double>(abandoned) / nt;
    proto.std_error = binom_se(proto.value);
    out.rows.push_back(proto);
    proto.metric = "avg_queries";
    proto.value = total_queries / nt;
    proto.std_error = 0.0;
    out.rows.push_back(proto);
    return out;
}

std::string gnuplot_text(const SweepSpec& spec, const std::vector<ResultRow>& rows) {
    const bool psi = spec.scenario == Scenario::PsiCurves;
    std::map<std::string, std::string> blocks;
    for (const auto& r : rows) {
        std::string key, x;
        if (psi) {
            key = "scheme=" + r.scheme + " fading=" + r.fading + " metric=" + r.metric +
                  " snr_db=" + fmt_short(r.snr_db);
            x = r.level; // the t value
        } else {
            key = "scheme=" + r.scheme + " labeling=" + r.labeling + " fading=" + r.fading +
                  " metric=" + r.metric + " level=" + r.level;
            x = fmt17(r.snr_db);
        }
        blocks[key] += x + " " + fmt17(r.value) + " " + fmt17(r.std_error) + "\n";
    }
    std::string out;
    for (const auto& [key, body] : blocks) {
        out += "# " + key + "\n" + body + "\n\n";
    }
    return out;
}

} // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::string hash = spec.config_hash();

    std::vector<std::function<TaskOutput()>> tasks;
    switch (spec.scenario) {
        case Scenario::PsiCurves:
        case Scenario::BpskRates:
            for (double snr : spec.snr_grid_db) {
                for (bool rayleigh : {false, true}) {
                    if (spec.scenario == Scenario::PsiCurves) {
                        tasks.push_back([=, &spec] { return run_psi_task(spec, snr, rayleigh, hash); });
                    } else {
                        tasks.push_back(
                            [=, &spec] { return run_bpsk_rate_task(spec, snr, rayleigh, hash); });
                    }
                }
            }
            break;
        case Scenario::BicmAwgnGray:
        case Scenario::BicmAwgnSp:
        case Scenario::BicmRayleighGray:
        case Scenario::BicmRayleighSp: {
            const bool rayleigh = spec.scenario == Scenario::BicmRayleighGray ||
                                  spec.scenario == Scenario::BicmRayleighSp;
            const LabelingRule labeling = (spec.scenario == Scenario::BicmAwgnGray ||
                                           spec.scenario == Scenario::BicmRayleighGray)
                                              ? LabelingRule::Gray
                                              : LabelingRule::SetPartitioning;
            for (double snr : spec.snr_grid_db) {
                for (Scheme scheme : {Scheme::Qpsk, Scheme::Psk8, Scheme::Qam16}) {
                    tasks.push_back([=, &spec] {
                        return run_bicm_task(spec, snr, scheme, rayleigh, labeling, hash);
                    });
                }
            }
            break;
        }
        case Scenario::Bler:
            for (double snr : spec.snr_grid_db) {
                tasks.push_back([=, &spec] { return run_bler_task(spec, snr, hash); });
            }
            break;
    }

    std::vector<TaskOutput> outputs(tasks.size());
    parallel_for(tasks.size(), default_worker_count(),
                 [&](std::size_t i) { outputs[i] = tasks[i](); });

    std::vector<ResultRow> rows;
    for (auto& o : outputs) {
        rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    }
    if (!spec.output_path.empty()) {
        write_text_atomic(spec.output_path, rows_to_csv(rows));
        if (spec.gnuplot) {
            write_text_atomic(spec.output_path + ".gnuplot", gnuplot_text(spec, rows));
        }
    }
    return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "scenario,scheme,labeling,fading,snr_db,level,metric,value,std_error,seed,config_hash\n";
    for (const auto& r : rows) {
        out += r.scenario + "," + r.scheme + "," + r.labeling + "," + r.fading + "," +
               fmt17(r.snr_db) + "," + r.level + "," + r.metric + "," + fmt17(r.value) + "," +
               fmt17(r.std_error) + "," + std::to_string(r.seed) + "," + r.config_hash + "\n";
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f << text;
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw std::runtime_error("atomic rename failed for " + path + ": " + ec.message());
}

bool ValidationReport::all_pass() const {
    for (const auto& e : entries) {
        if (!e.pass) return false;
    }
    return true;
}

namespace {

struct NamedChannel {
    std::string name;
    BitChannel ch;
};

std::vector<NamedChannel> equality_check_channels() {
    std::vector<NamedChannel> v;
    for (double snr : {0.0, 3.0, 6.0}) {
        v.push_back({"awgn_" + fmt_short(snr) + "db", bpsk_awgn_channel(snr)});
    }
    for (double snr : {0.0, 3.0, 6.0}) {
        v.push_back({"rayleigh_" + fmt_short(snr) + "db", bpsk_rayleigh_channel(snr)});
    }
    v.push_back({"bsc_0.11", bsc_channel(0.11)});
    const Constellation qg = make_constellation(Scheme::Qpsk, LabelingRule::Gray);
    for (int level = 1; level <= qg.m; ++level) {
        v.push_back({"qpsk_gray_awgn_6db_l" + std::to_string(level),
                     bicm_bit_channel(qg, level, FadingModel{Fading::Awgn, 6.0})});
    }
    return v;
}

} // namespace

ValidationReport validate_all(std::uint64_t seed, std::size_t samples) {
    ValidationReport report;
    RateConfig cfg;
    cfg.samples = samples;
    cfg.psi_samples = samples;

    // rate equalities / orderings over the channel set
    const auto channels = equality_check_channels();
    std::vector<RateReport> reps(channels.size());
    parallel_for(channels.size(), default_worker_count(), [&](std::size_t i) {
        RateConfig c = cfg;
        c.seed = derive_seed(seed, 100 + i);
        reps[i] = rate_report(channels[i].ch, c);
    });
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const auto& rep = reps[i];
        const double budget = error_budget(rep);
        const double gap = std::abs(rep.i_sgrand - rep.i_mi);
        report.entries.push_back({"sgrand_equals_mi." + channels[i].name, gap <= budget, gap, budget,
                                  "sgrand=" + fmt_short(rep.i_sgrand) + " mi=" + fmt_short(rep.i_mi)});
    }
    {
        double worst = -1e300;
        bool below_ln2 = true;
        for (const auto& rep : reps) {
            worst = std::max(worst, rep.i_orbgrand - rep.i_sgrand - error_budget(rep));
            below_ln2 = below_ln2 && rep.i_orbgrand <= kLn2 + 1e-9 && rep.i_sgrand <= kLn2 + 1e-9 &&
                        rep.i_mi <= kLn2 + 1e-9;
        }
        report.entries.push_back(
            {"rate_ordering.orb_le_sgrand", worst <= 0.0, worst, 0.0, "max excess over budget"});
        report.entries.push_back({"rate_ordering.le_ln2", below_ln2, below_ln2 ? 1.0 : 0.0, 1.0, ""});
    }

    // uniformity of Psi(|T|) for the continuous-output analytic channels
    for (bool rayleigh : {false, true}) {
        const BitChannel ch = rayleigh ? bpsk_rayleigh_channel(3.0) : bpsk_awgn_channel(3.0);
        const ReliabilityCdf& psi = ch.analytic_psi();
        const std::size_t n = 100'000;
        Rng rng = make_rng(seed, rayleigh ? 11 : 12);
        std::bernoulli_distribution sign(0.5);
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = psi(std::abs(ch.sample_llr(sign(rng) ? +1 : -1, rng)));
        }
        const double stat = ks_statistic_uniform(std::move(u));
        const double crit = ks_critical_value(0.01, n);
        report.entries.push_back({std::string("uniformity.ks_") + (rayleigh ? "rayleigh" : "awgn") +
                                      "_3db",
                                  stat < crit, stat, crit, "n=100000 alpha=0.01"});
    }

    // metric-statistics limits: mean, variance trend, conditional log-MGF
    {
        const BitChannel ch = bpsk_awgn_channel(3.0);
        const std::vector<double> thetas = {-1.0, -5.0, -20.0};
        const MetricStats big = simulate_metric_statistics(ch, 4096, 500, thetas, derive_seed(seed, 21));
        RateConfig c = cfg;
        c.seed = derive_seed(seed, 22);
        const Estimate lin = orbgrand_linear_term(ch, ch.analytic_psi(), samples, c.seed);
        const double gap = std::abs(big.mean_d1 - lin.value);
        const double tol = 3.0 * (big.mean_std_error + lin.std_error);
        report.entries.push_back({"metric_mean.matches_linear_term", gap <= tol, gap, tol,
                                  "n=4096 trials=500 vs linear term"});

        const MetricStats small =
            simulate_metric_statistics(ch, 128, 500, {}, derive_seed(seed, 23));
        const MetricStats mid =
            simulate_metric_statistics(ch, 2048, 500, {}, derive_seed(seed, 24));
        const double ratio = mid.var_d1 / small.var_d1;
        report.entries.push_back(
            {"metric_variance.shrinks_with_n", mid.var_d1 < small.var_d1, ratio, 1.0,
             "var(D1) n=2048 over n=128"});

        double worst = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            const double limit = logistic_integral(thetas[i]) - kLn2;
            worst = std::max(worst, std::abs(big.delta_hat[i] - limit));
        }
        report.entries.push_back({"log_mgf.matches_logistic_integral", worst <= 1e-3, worst, 1e-3,
                                  "theta in {-1,-5,-20}, n=4096"});
    }

    // convexity of the GMI objective on a theta grid
    {
        double min_second_diff = 1e300;
        for (const auto& spec_ch : {0, 1, 2}) {
            const BitChannel ch = spec_ch == 0   ? bpsk_awgn_channel(3.0)
                                  : spec_ch == 1 ? bpsk_rayleigh_channel(3.0)
                                                 : bsc_channel(0.11);
            ReliabilityCdf psi = ch.analytic_psi();
            const Estimate lin =
                orbgrand_linear_term(ch, psi, std::min<std::size_t>(samples, 100'000),
                                     derive_seed(seed, 31 + spec_ch));
            GmiObjective obj{lin.value, [](double th) { return logistic_integral(th); }};
            std::vector<double> f(100);
            for (int i = 0; i < 100; ++i) {
                const double th = -20.0 + 19.95 * i / 99.0; // grid over [-20, -0.05]
                f[i] = obj(th);
            }
            for (int i = 1; i + 1 < 100; ++i) {
                min_second_diff = std::min(min_second_diff, f[i - 1] - 2.0 * f[i] + f[i + 1]);
            }
        }
        report.entries.push_back({"convexity.gmi_objective", min_second_diff >= -1e-9,
                                  min_second_diff, -1e-9, "100-point theta grid"});
    }

    // substitution identity: SGRAND on the Psi-transformed channel reproduces
    // the ORBGRAND rate of the base channel
    {
        const BitChannel base = bpsk_awgn_channel(3.0);
        const ReliabilityCdf psi = base.analytic_psi();
        const BitChannel transformed(ChannelKind::Empirical, [base, psi](int x, Rng& rng) {
            const double t = base.sample_llr(x, rng);
            return std::copysign(psi(std::abs(t)), t);
        });
        RateConfig c = cfg;
        c.seed = derive_seed(seed, 41);
        const GmiResult orb = orbgrand_gmi(base, c);
        c.seed = derive_seed(seed, 42);
        const GmiResult sg = sgrand_gmi(transformed, c);
        const double gap = std::abs(sg.rate - orb.rate);
        const double tol = 3.0 * (orb.mc_std_error + sg.mc_std_error) + 2e-6;
        report.entries.push_back(
            {"substitution.psi_transform", gap <= tol, gap, tol,
             "orb=" + fmt_short(orb.rate) + " sgrand(transformed)=" + fmt_short(sg.rate)});
    }

    return report;
}

} // namespace grandrate
