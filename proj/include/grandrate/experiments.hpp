#ifndef GRANDRATE_EXPERIMENTS_HPP
#define GRANDRATE_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "grandrate/grand.hpp"

namespace grandrate {

enum class Scenario {
    PsiCurves,
    BpskRates,
    BicmAwgnGray,
    BicmAwgnSp,
    BicmRayleighGray,
    BicmRayleighSp,
    Bler
};

Scenario scenario_from_string(const std::string& s);
std::string scenario_to_string(Scenario s);

Weighting weighting_from_string(const std::string& s);
std::string weighting_to_string(Weighting w);

struct SweepSpec {
    Scenario scenario = Scenario::BpskRates;
    std::vector<double> snr_grid_db;
    std::uint64_t seed = 0xC0FFEE;
    std::size_t samples = 1'000'000;
    // bler scenario only
    int code_n = 128;
    int code_k = 105;
    std::uint64_t max_queries = 1'000'000;
    std::size_t trials = 10'000;
    Weighting weighting = Weighting::RankOverN;

    std::string output_path; // empty: rows are returned but no CSV is written
    bool gnuplot = false;    // additionally emit a plot-ready columnar file

    static SweepSpec from_json_text(const std::string& text);
    std::string canonical() const; // canonical string digested into config_hash
    std::string config_hash() const;
    void validate() const;
};

struct ResultRow {
    std::string scenario;
    std::string scheme;
    std::string labeling;
    std::string fading;
    double snr_db = 0.0;
    std::string level; // "1".."m", "sum", or a t-value for psi curves
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

// Deterministic per (spec, seed, worker count): grid points get derived seeds
// and are computed independently, so scheduling order cannot leak into results.
// Writes the CSV atomically (temp file + rename) when output_path is set.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
void write_text_atomic(const std::string& path, const std::string& text);

struct ValidationEntry {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string details;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    bool all_pass() const;
};

// Bundles the statistical invariant suites (rate equalities/orderings,
// reliability-cdf uniformity, metric-statistics limits, convexity) into one
// pass/fail report. Failures are report entries, not errors.
ValidationReport validate_all(std::uint64_t seed, std::size_t samples = 200'000);

} // namespace grandrate

#endif
