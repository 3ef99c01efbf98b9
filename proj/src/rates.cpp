#include "grandrate/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grandrate/numerics.hpp"
#include "grandrate/stats.hpp"

namespace grandrate {

namespace {

constexpr double kLn2 = 0.6931471805599453;
// Declared bound on all deterministic quadrature in the rate pipeline.
constexpr double kIntegrationBudget = 1e-6;
constexpr double kOptimizerSlack = 1e-6;

// Substream tags for seed derivation.
enum : std::uint64_t { kStreamMain = 1, kStreamPsi = 2, kStreamLinear = 3 };

struct SampleSet {
    std::vector<double> t_plus;  // LLR draws given X=+1
    std::vector<double> t_minus; // LLR draws given X=-1
};

SampleSet draw_samples(const BitChannel& ch, std::size_t n, std::uint64_t seed) {
    SampleSet s;
    s.t_plus.resize(n);
    s.t_minus.resize(n);
    Rng rng = make_rng(seed, kStreamMain);
    for (std::size_t i = 0; i < n; ++i) {
        s.t_plus[i] = ch.sample_llr(+1, rng);
        s.t_minus[i] = ch.sample_llr(-1, rng);
    }
    return s;
}

bool near_lower_bracket_edge(double theta_star, const RateConfig& cfg) {
    return theta_star <= cfg.theta_min * 0.99;
}

GmiResult minimize_objective(const GmiObjective& obj, const RateConfig& cfg) {
    const auto min = golden_section_min([&obj](double th) { return obj(th); }, cfg.theta_min,
                                        cfg.theta_max, cfg.theta_rel_tol);
    GmiResult r;
    r.theta_star = min.x;
    r.rate = std::clamp(kLn2 - min.fx, 0.0, kLn2);
    r.bracket_edge = near_lower_bracket_edge(min.x, cfg);
    return r;
}

Estimate orbgrand_linear_from_samples(const SampleSet& s, const ReliabilityCdf& psi) {
    RunningStats acc;
    for (std::size_t i = 0; i < s.t_plus.size(); ++i) {
        const double tp = s.t_plus[i];
        const double tm = s.t_minus[i];
        const double v = 0.5 * (tp < 0.0 ? psi(-tp) : 0.0) + 0.5 * (tm > 0.0 ? psi(tm) : 0.0);
        acc.add(v);
    }
    return {acc.mean(), acc.std_error()};
}

Estimate sgrand_linear_from_samples(const SampleSet& s) {
    RunningStats acc;
    for (std::size_t i = 0; i < s.t_plus.size(); ++i) {
        const double tp = s.t_plus[i];
        const double tm = s.t_minus[i];
        acc.add(0.5 * (tp < 0.0 ? -tp : 0.0) + 0.5 * (tm > 0.0 ? tm : 0.0));
    }
    return {acc.mean(), acc.std_error()};
}

// E[ln(1+e^(theta|T|))] under equiprobable inputs, averaged over both branches.
double sgrand_mgf_from_samples(const SampleSet& s, double theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.t_plus.size(); ++i) {
        acc += 0.5 * (log1p_exp(theta * std::abs(s.t_plus[i])) +
                      log1p_exp(theta * std::abs(s.t_minus[i])));
    }
    return acc / static_cast<double>(s.t_plus.size());
}

// Standard error of the realized SGRAND objective at theta_star.
double sgrand_objective_std_error(const SampleSet& s, double theta) {
    RunningStats acc;
    for (std::size_t i = 0; i < s.t_plus.size(); ++i) {
        const double tp = s.t_plus[i];
        const double tm = s.t_minus[i];
        const double mgf =
            0.5 * (log1p_exp(theta * std::abs(tp)) + log1p_exp(theta * std::abs(tm)));
        const double lin = 0.5 * (tp < 0.0 ? -tp : 0.0) + 0.5 * (tm > 0.0 ? tm : 0.0);
        acc.add(mgf - theta * lin);
    }
    return acc.std_error();
}

Estimate mi_from_samples(const SampleSet& s) {
    RunningStats acc;
    for (std::size_t i = 0; i < s.t_plus.size(); ++i) {
        acc.add(0.5 * (log1p_exp(-s.t_plus[i]) + log1p_exp(s.t_minus[i])));
    }
    return {std::max(0.0, kLn2 - acc.mean()), acc.std_error()};
}

// Deterministic mutual information for the analytic channel kinds; quiet NaN if
// the channel has none.
double mi_deterministic(const BitChannel& ch, double quad_tol = 1e-9) {
    if (const auto* b = ch.bsc_params()) {
        const double L = b->magnitude;
        return kLn2 - ((1.0 - b->p) * log1p_exp(-L) + b->p * log1p_exp(L));
    }
    if (const auto* a = ch.awgn_params()) {
        // E[ln(1+e^-T) | X=+1] with T ~ N(mu, s^2); tails truncated at 8 sigma
        const double mu = a->mu, s = a->s;
        const double e = integrate_adaptive(
            [mu, s](double t) { return log1p_exp(-t) * normal_pdf((t - mu) / s) / s; },
            mu - 8.0 * s, mu + 8.0 * s, quad_tol);
        return kLn2 - e;
    }
    if (const auto* r = ch.rayleigh_params()) {
        // density of T | X=+1 is amp * exp(t/2 - kappa |t|)
        const double amp = r->amp, kappa = r->kappa;
        const double rate_neg = kappa + 0.5;
        const double lo = -80.0 / rate_neg;
        const double e_neg = integrate_adaptive(
            [amp, rate_neg](double t) { return log1p_exp(-t) * amp * std::exp(rate_neg * t); },
            lo, 0.0, quad_tol);
        const double rate_pos = kappa - 0.5;
        const double e_pos = integrate_adaptive(
            [amp, rate_pos](double t) { return log1p_exp(-t) * amp * std::exp(-rate_pos * t); },
            0.0, 40.0, quad_tol);
        return kLn2 - (e_neg + e_pos);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

double error_budget(const RateReport& r) {
    return 3.0 * r.mc_std_error + r.integration_abs_err + kOptimizerSlack;
}

double logistic_integral(double theta, double abs_tol) {
    if (theta > 0.0) throw std::invalid_argument("logistic_integral: theta must be <= 0");
    if (theta == 0.0) return kLn2;
    return integrate_adaptive([theta](double t) { return log1p_exp(theta * t); }, 0.0, 1.0,
                              abs_tol);
}

Estimate orbgrand_linear_term(const BitChannel& ch, const ReliabilityCdf& psi,
                              std::size_t n_samples, std::uint64_t seed) {
    if (const auto* b = ch.bsc_params()) {
        // |T| is constant, Psi at the atom is 1, so the term is exactly p.
        return {b->p, 0.0};
    }
    SampleSet s = draw_samples(ch, n_samples, derive_seed(seed, kStreamLinear));
    return orbgrand_linear_from_samples(s, psi);
}

double delta_log_mgf_estimator(std::span<const int> ranks, double theta) {
    if (theta > 0.0) throw std::invalid_argument("delta_log_mgf_estimator: theta must be <= 0");
    const std::size_t n = ranks.size();
    if (n == 0) throw std::invalid_argument("delta_log_mgf_estimator: empty rank vector");
    std::vector<bool> seen(n, false);
    for (int r : ranks) {
        if (r < 1 || static_cast<std::size_t>(r) > n || seen[r - 1]) {
            throw std::invalid_argument("delta_log_mgf_estimator: ranks must be a permutation of 1..N");
        }
        seen[r - 1] = true;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double acc = 0.0;
    for (int r : ranks) {
        acc += log1p_exp(theta * static_cast<double>(r) * inv_n) - kLn2;
    }
    return acc * inv_n;
}

namespace {

GmiResult orbgrand_gmi_impl(const BitChannel& ch, const RateConfig& cfg, const SampleSet* shared) {
    Estimate lin;
    double psi_noise = 0.0;
    if (ch.bsc_params() != nullptr) {
        lin = {ch.bsc_params()->p, 0.0};
    } else {
        ReliabilityCdf psi = ch.has_analytic_psi()
                                 ? ch.analytic_psi()
                                 : psi_cdf(ch, cfg.psi_samples, derive_seed(cfg.seed, kStreamPsi));
        if (psi.is_empirical()) {
            // construction noise of the independent empirical cdf
            psi_noise = 0.5 / std::sqrt(static_cast<double>(psi.sample_count()));
        }
        if (shared != nullptr) {
            lin = orbgrand_linear_from_samples(*shared, psi);
        } else {
            lin = orbgrand_linear_term(ch, psi, cfg.samples, cfg.seed);
        }
    }
    GmiObjective obj{lin.value,
                     [&cfg](double th) { return logistic_integral(th, cfg.logistic_tol); }};
    GmiResult r = minimize_objective(obj, cfg);
    r.mc_std_error = std::abs(r.theta_star) * (lin.std_error + psi_noise);
    return r;
}

GmiResult sgrand_gmi_impl(const BitChannel& ch, const RateConfig& cfg, const SampleSet* shared) {
    if (const auto* b = ch.bsc_params()) {
        const double L = b->magnitude;
        GmiObjective obj{b->p * L, [L](double th) { return log1p_exp(th * L); }};
        return minimize_objective(obj, cfg);
    }
    SampleSet local;
    const SampleSet* s = shared;
    if (s == nullptr) {
        local = draw_samples(ch, cfg.samples, cfg.seed);
        s = &local;
    }
    const Estimate lin = sgrand_linear_from_samples(*s);
    GmiObjective obj{lin.value, [s](double th) { return sgrand_mgf_from_samples(*s, th); }};
    GmiResult r = minimize_objective(obj, cfg);
    r.mc_std_error = sgrand_objective_std_error(*s, r.theta_star);
    return r;
}

} // namespace

GmiResult orbgrand_gmi(const BitChannel& ch, const RateConfig& cfg) {
    return orbgrand_gmi_impl(ch, cfg, nullptr);
}

GmiResult sgrand_gmi(const BitChannel& ch, const RateConfig& cfg) {
    return sgrand_gmi_impl(ch, cfg, nullptr);
}

Estimate mutual_information_estimate(const BitChannel& ch, std::size_t n_samples,
                                     std::uint64_t seed) {
    const double det = mi_deterministic(ch);
    if (!std::isnan(det)) return {det, 0.0};
    SampleSet s = draw_samples(ch, n_samples, seed);
    return mi_from_samples(s);
}

double mutual_information(const BitChannel& ch, std::size_t n_samples, std::uint64_t seed) {
    return mutual_information_estimate(ch, n_samples, seed).value;
}

RateReport rate_report(const BitChannel& ch, const RateConfig& cfg) {
    RateReport rep;
    rep.integration_abs_err = kIntegrationBudget;

    if (ch.bsc_params() != nullptr) {
        // fully deterministic path: no sampling at all
        const GmiResult orb = orbgrand_gmi_impl(ch, cfg, nullptr);
        const GmiResult sg = sgrand_gmi_impl(ch, cfg, nullptr);
        rep.i_orbgrand = orb.rate;
        rep.theta_star_orb = orb.theta_star;
        rep.bracket_edge_orb = orb.bracket_edge;
        rep.i_sgrand = sg.rate;
        rep.theta_star_sgrand = sg.theta_star;
        rep.bracket_edge_sgrand = sg.bracket_edge;
        rep.i_mi = mi_deterministic(ch);
        rep.mc_std_error = 0.0;
        return rep;
    }

    // one common sample set for all three rates
    const SampleSet s = draw_samples(ch, cfg.samples, cfg.seed);

    const GmiResult orb = orbgrand_gmi_impl(ch, cfg, &s);
    rep.i_orbgrand = orb.rate;
    rep.theta_star_orb = orb.theta_star;
    rep.bracket_edge_orb = orb.bracket_edge;

    const GmiResult sg = sgrand_gmi_impl(ch, cfg, &s);
    rep.i_sgrand = sg.rate;
    rep.theta_star_sgrand = sg.theta_star;
    rep.bracket_edge_sgrand = sg.bracket_edge;

    const double det_mi = mi_deterministic(ch);
    Estimate mi;
    if (!std::isnan(det_mi)) {
        mi = {det_mi, 0.0};
    } else {
        mi = mi_from_samples(s);
    }
    rep.i_mi = mi.value;

    rep.mc_std_error = std::max({orb.mc_std_error, sg.mc_std_error, mi.std_error});
    return rep;
}

} // namespace grandrate
