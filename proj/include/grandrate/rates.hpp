#ifndef GRANDRATE_RATES_HPP
#define GRANDRATE_RATES_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "grandrate/bit_channel.hpp"

namespace grandrate {

struct RateConfig {
    std::size_t samples = 1'000'000;     // LLR draws per conditional branch
    std::size_t psi_samples = 1'000'000; // empirical-Psi construction (independent stream)
    std::uint64_t seed = 0xC0FFEE;
    double theta_min = -500.0; // optimizer bracket: theta in [theta_min, theta_max]
    double theta_max = -1e-6;
    double theta_rel_tol = 1e-8;
    double logistic_tol = 1e-10;
};

struct RateReport {
    double i_orbgrand = 0.0;
    double i_mi = 0.0;
    double i_sgrand = 0.0;
    double theta_star_orb = 0.0;
    double theta_star_sgrand = 0.0;
    double mc_std_error = 0.0;        // worst standard error among the three estimates
    double integration_abs_err = 0.0; // declared deterministic-quadrature budget
    bool bracket_edge_orb = false;
    bool bracket_edge_sgrand = false;
};

// 3 * MC standard error + quadrature error + optimizer slack; the uniform
// tolerance used in every equality assertion downstream.
double error_budget(const RateReport& r);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct GmiResult {
    double rate = 0.0;
    double theta_star = 0.0;
    double mc_std_error = 0.0;
    bool bracket_edge = false;
};

// Objective whose infimum over theta < 0 defines a GMI:
// objective(theta) = log_mgf_term(theta) - theta * linear_coefficient.
// Convex in theta; exposed so convexity can be property-tested directly.
struct GmiObjective {
    double linear_coefficient = 0.0;
    std::function<double(double)> log_mgf_term;
    double operator()(double theta) const {
        return log_mgf_term(theta) - theta * linear_coefficient;
    }
};

// Integral of ln(1 + e^(theta t)) over t in [0,1], theta <= 0, to abs error 1e-10.
double logistic_integral(double theta, double abs_tol = 1e-10);

// Monte Carlo estimate of
//   1/2 E[Psi(|T|) 1(T<0) | X=+1] + 1/2 E[Psi(|T|) 1(T>0) | X=-1],
// the limiting mean of the ORBGRAND decoding metric at the transmitted codeword.
// The BSC short-circuits to the exact value p (its reliability is constant).
Estimate orbgrand_linear_term(const BitChannel& ch, const ReliabilityCdf& psi,
                              std::size_t n_samples, std::uint64_t seed = 0xC0FFEE);

GmiResult orbgrand_gmi(const BitChannel& ch, const RateConfig& cfg = {});
GmiResult sgrand_gmi(const BitChannel& ch, const RateConfig& cfg = {});

// ln2 - 1/2 E[ln(1+e^-T) | X=+1] - 1/2 E[ln(1+e^T) | X=-1].
// Deterministic (closed form or quadrature) for the analytic channel kinds,
// Monte Carlo otherwise.
double mutual_information(const BitChannel& ch, std::size_t n_samples,
                          std::uint64_t seed = 0xC0FFEE);

// Same, with the Monte Carlo standard error (zero on the deterministic paths).
Estimate mutual_information_estimate(const BitChannel& ch, std::size_t n_samples,
                                     std::uint64_t seed = 0xC0FFEE);

// Finite-N conditional log-MGF of the metric at a non-transmitted codeword:
// (1/N) sum_n ln( (1 + e^(theta * ranks[n] / N)) / 2 ).
// Permutation-invariant; converges to logistic_integral(theta) - ln2.
double delta_log_mgf_estimator(std::span<const int> ranks, double theta);

// All three rates from one common LLR sample set (for variance-reduced
// differences), with optimizer diagnostics.
RateReport rate_report(const BitChannel& ch, const RateConfig& cfg = {});

} // namespace grandrate

#endif
