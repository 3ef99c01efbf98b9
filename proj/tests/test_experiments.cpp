#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "grandrate/experiments.hpp"
#include "oracles.hpp"

using namespace grandrate;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("sweep spec validation") {
    SweepSpec spec;
    spec.scenario = Scenario::BpskRates;
    SUBCASE("empty grid rejected") {
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("non-increasing grid rejected") {
        spec.snr_grid_db = {0.0, 0.0};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
        spec.snr_grid_db = {3.0, 1.0};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("sample floor enforced for rate scenarios") {
        spec.snr_grid_db = {0.0, 3.0};
        spec.samples = 100;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("bler needs enough trials and a sane code") {
        spec.scenario = Scenario::Bler;
        spec.snr_grid_db = {6.0};
        spec.trials = 10;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
        spec.trials = 100;
        spec.code_k = 200;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
}

TEST_CASE("sweep spec json parsing") {
    const std::string text = R"({
        "scenario": "bler",
        "snr_grid_db": [4.0, 6.0],
        "seed": 99,
        "samples": 20000,
        "n": 32, "k": 16,
        "max_queries": 4096,
        "trials": 200,
        "weighting": "orbgrand",
        "output": "out.csv",
        "gnuplot": true
    })";
    const SweepSpec spec = SweepSpec::from_json_text(text);
    CHECK(spec.scenario == Scenario::Bler);
    CHECK(spec.snr_grid_db == std::vector<double>{4.0, 6.0});
    CHECK(spec.seed == 99);
    CHECK(spec.code_n == 32);
    CHECK(spec.code_k == 16);
    CHECK(spec.max_queries == 4096);
    CHECK(spec.trials == 200);
    CHECK(spec.weighting == Weighting::RankOverN);
    CHECK(spec.output_path == "out.csv");
    CHECK(spec.gnuplot);
    CHECK(spec.config_hash().size() == 16);
    CHECK_THROWS(SweepSpec::from_json_text("{\"scenario\": \"nope\", \"snr_grid_db\": [1]}"));
}

TEST_CASE("psi sweep: deterministic rows, exact csv header, atomic write") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "grandrate_test_sweep";
    fs::remove_all(dir);

    SweepSpec spec;
    spec.scenario = Scenario::PsiCurves;
    spec.snr_grid_db = {0.0, 3.0};
    spec.output_path = (dir / "nested" / "psi.csv").string();

    const auto rows = run_sweep(spec);
    CHECK(rows.size() == 2 * 2 * 101);

    const std::string csv = read_file(spec.output_path);
    CHECK(csv.rfind("scenario,scheme,labeling,fading,snr_db,level,metric,value,std_error,seed,"
                    "config_hash\n",
                    0) == 0);
    CHECK(!fs::exists(spec.output_path + ".tmp"));

    // byte-identical on repetition
    const auto rows2 = run_sweep(spec);
    CHECK(rows_to_csv(rows) == rows_to_csv(rows2));

    // worker count does not leak into the bytes
    setenv("GRANDRATE_THREADS", "1", 1);
    const auto rows_1w = run_sweep(spec);
    setenv("GRANDRATE_THREADS", "2", 1);
    const auto rows_2w = run_sweep(spec);
    unsetenv("GRANDRATE_THREADS");
    CHECK(rows_to_csv(rows_1w) == rows_to_csv(rows_2w));

    // rayleigh reliability cdf lies above awgn at small t (worse linearity)
    auto find_psi = [&rows](const std::string& fading, double snr, const std::string& t) {
        for (const auto& r : rows) {
            if (r.fading == fading && r.snr_db == snr && r.level == t) return r.value;
        }
        REQUIRE(false);
        return 0.0;
    };
    for (const std::string t : {"0.25", "0.5", "1"}) {
        CHECK(find_psi("rayleigh", 3.0, t) > find_psi("awgn", 3.0, t));
    }
    fs::remove_all(dir);
}

TEST_CASE("bpsk rate sweep emits the three metrics with full precision") {
    SweepSpec spec;
    spec.scenario = Scenario::BpskRates;
    spec.snr_grid_db = {3.0};
    spec.samples = 20'000;
    const auto rows = run_sweep(spec);
    int orb = 0, sg = 0, mi = 0;
    for (const auto& r : rows) {
        CHECK(r.std_error >= 0.0);
        CHECK(std::isfinite(r.value));
        CHECK(r.config_hash == spec.config_hash());
        if (r.metric == "i_orbgrand") ++orb;
        if (r.metric == "i_sgrand") ++sg;
        if (r.metric == "i_mi") ++mi;
    }
    CHECK(orb == 2); // awgn + rayleigh
    CHECK(sg == 2);
    CHECK(mi == 2);

    // 17-significant-digit floats in the csv
    ResultRow row;
    row.scenario = "x";
    row.value = 1.0 / 3.0;
    const std::string csv = rows_to_csv({row});
    CHECK(csv.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("bler sweep rows") {
    SweepSpec spec;
    spec.scenario = Scenario::Bler;
    spec.snr_grid_db = {6.0};
    spec.code_n = 32;
    spec.code_k = 16;
    spec.max_queries = 1 << 14;
    spec.trials = 300;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 4);
    double bler = -1, wrong = -1, abandon = -1, queries = -1;
    for (const auto& r : rows) {
        CHECK(r.scheme == "rlc_n32_k16");
        if (r.metric == "bler") bler = r.value;
        if (r.metric == "wrong_rate") wrong = r.value;
        if (r.metric == "abandon_rate") abandon = r.value;
        if (r.metric == "avg_queries") queries = r.value;
    }
    CHECK(bler == doctest::Approx(wrong + abandon));
    CHECK(bler >= 0.0);
    CHECK(bler <= 1.0);
    CHECK(queries >= 1.0);
}

TEST_CASE("gnuplot companion file") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "grandrate_test_gnuplot";
    fs::remove_all(dir);
    SweepSpec spec;
    spec.scenario = Scenario::BpskRates;
    spec.snr_grid_db = {0.0, 2.0};
    spec.samples = 10'000;
    spec.output_path = (dir / "rates.csv").string();
    spec.gnuplot = true;
    run_sweep(spec);
    const std::string plot = read_file(spec.output_path + ".gnuplot");
    CHECK(plot.find("# scheme=bpsk") != std::string::npos);
    CHECK(plot.find("metric=i_mi") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("rate rows honor the precision floor at default sampling") {
    SweepSpec spec;
    spec.scenario = Scenario::BpskRates;
    spec.snr_grid_db = {3.0};
    const auto rows = run_sweep(spec); // default 10^6 samples
    for (const auto& r : rows) {
        if (r.metric == "i_orbgrand" || r.metric == "i_sgrand" || r.metric == "i_mi") {
            CHECK(r.std_error <= r.value / 30.0);
        }
    }
}

TEST_CASE("validation suite passes at a moderate sample count") {
    const ValidationReport report = validate_all(2024, 50'000);
    CHECK(report.entries.size() >= 10);
    for (const auto& e : report.entries) {
        INFO(e.name, " value=", e.value, " threshold=", e.threshold, " ", e.details);
        CHECK(e.pass);
    }
    CHECK(report.all_pass());
}
