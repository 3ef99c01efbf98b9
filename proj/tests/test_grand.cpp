#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "grandrate/bit_channel.hpp"
#include "grandrate/grand.hpp"
#include "grandrate/linear_code.hpp"
#include "grandrate/rates.hpp"
#include "oracles.hpp"

using namespace grandrate;

namespace {

// all subsets of {0..n-1} keyed by a deterministic order key
std::vector<std::pair<long long, std::vector<int>>> all_subsets_by_rank_sum(
    const std::vector<int>& ranks) {
    const int n = static_cast<int>(ranks.size());
    std::vector<std::pair<long long, std::vector<int>>> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        long long w = 0;
        std::vector<int> pos;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                w += ranks[i];
                pos.push_back(i);
            }
        }
        out.emplace_back(w, pos);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::vector<double> sample_llrs(const BitChannel& ch, const LinearCode::Word& sent, int n,
                                Rng& rng) {
    std::vector<double> llrs(n);
    for (int i = 0; i < n; ++i) llrs[i] = ch.sample_llr(sent.test(i) ? +1 : -1, rng);
    return llrs;
}

} // namespace

TEST_CASE("random linear codes") {
    SUBCASE("degenerate dimensions rejected") {
        CHECK_THROWS_AS(LinearCode::random_systematic(4, 4, 1), std::invalid_argument);
        CHECK_THROWS_AS(LinearCode::random_systematic(4, 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(LinearCode::random_systematic(129, 64, 1), std::invalid_argument);
    }
    SUBCASE("G H^T = 0 checked exhaustively at n=8, k=4") {
        const LinearCode code = LinearCode::random_systematic(8, 4, 1);
        for (const auto& g : code.generator_rows()) {
            for (const auto& h : code.parity_rows()) {
                CHECK(((g & h).count() & 1u) == 0);
            }
        }
    }
    SUBCASE("syndrome accepts exactly the 2^k codewords at n=10, k=4") {
        const LinearCode code = LinearCode::random_systematic(10, 4, 7);
        std::set<unsigned long long> codewords;
        for (unsigned m = 0; m < 16; ++m) {
            LinearCode::Word info;
            for (int i = 0; i < 4; ++i) {
                if (m & (1u << i)) info.set(i);
            }
            codewords.insert(code.encode(info).to_ullong());
        }
        CHECK(codewords.size() == 16);
        int pass = 0;
        for (unsigned long long w = 0; w < (1ull << 10); ++w) {
            const LinearCode::Word word(w);
            const bool ok = code.is_codeword(word);
            if (ok) ++pass;
            CHECK(ok == (codewords.count(w) > 0));
        }
        CHECK(pass == 16);
    }
    SUBCASE("deterministic per seed") {
        const LinearCode a = LinearCode::random_systematic(16, 8, 5);
        const LinearCode b = LinearCode::random_systematic(16, 8, 5);
        for (int i = 0; i < 8; ++i) CHECK(a.generator_rows()[i] == b.generator_rows()[i]);
    }
}

TEST_CASE("rank reliabilities") {
    SUBCASE("direct sort") {
        const std::vector<double> v = {0.5, 0.1, 0.9};
        CHECK(rank_reliabilities(v) == std::vector<int>{2, 1, 3});
    }
    SUBCASE("all-equal input breaks ties by position") {
        const std::vector<double> v = {3.0, 3.0, 3.0};
        CHECK(rank_reliabilities(v) == std::vector<int>{1, 2, 3});
    }
    SUBCASE("always a permutation, order-isomorphic where distinct") {
        Rng rng = make_rng(4, 4);
        std::uniform_real_distribution<double> unif(0.0, 10.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(37);
            for (auto& x : v) x = unif(rng);
            const auto ranks = rank_reliabilities(v);
            std::vector<int> sorted_ranks = ranks;
            std::sort(sorted_ranks.begin(), sorted_ranks.end());
            for (std::size_t i = 0; i < sorted_ranks.size(); ++i) {
                CHECK(sorted_ranks[i] == static_cast<int>(i + 1));
            }
            for (std::size_t i = 0; i < v.size(); ++i) {
                for (std::size_t j = 0; j < v.size(); ++j) {
                    if (v[i] < v[j]) CHECK(ranks[i] < ranks[j]);
                }
            }
        }
    }
    SUBCASE("empty input rejected") {
        CHECK_THROWS_AS(rank_reliabilities(std::vector<double>{}), std::invalid_argument);
    }
}

TEST_CASE("orbgrand pattern stream") {
    SUBCASE("identity ranks at N=3 reproduce the pinned sequence") {
        OrbgrandPatternStream stream({1, 2, 3});
        // expected weights: 0,1,2,3,3,4,5,6 and the weight-3 patterns in order {3},{1,2}
        const std::vector<long long> want_w = {0, 1, 2, 3, 3, 4, 5, 6};
        std::vector<int> pat;
        std::vector<std::vector<int>> got;
        std::vector<long long> got_w;
        while (stream.next(pat)) {
            std::sort(pat.begin(), pat.end());
            got.push_back(pat);
            got_w.push_back(stream.last_weight());
        }
        CHECK(got_w == want_w);
        const std::vector<std::vector<int>> expected = {{},     {0},    {1},    {2},
                                                        {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
        REQUIRE(got.size() == 8);
        CHECK(got[0] == expected[0]);
        CHECK(got[1] == expected[1]);
        CHECK(got[2] == expected[2]);
        CHECK(got[3] == expected[3]); // weight 3: the single part {rank 3} first
        CHECK(got[4] == expected[4]); // then {rank 1, rank 2}
        CHECK(got[5] == expected[5]);
        CHECK(got[6] == expected[6]);
        CHECK(got[7] == expected[7]);
    }

    SUBCASE("random permutation at N=10: bijection onto the power set, nondecreasing weights") {
        Rng rng = make_rng(12, 12);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<int> ranks(10);
            for (int i = 0; i < 10; ++i) ranks[i] = i + 1;
            std::shuffle(ranks.begin(), ranks.end(), rng);

            OrbgrandPatternStream stream(ranks);
            std::set<unsigned> seen;
            std::vector<int> pat;
            long long prev_w = -1;
            while (stream.next(pat)) {
                unsigned mask = 0;
                long long w = 0;
                for (int pos : pat) {
                    mask |= 1u << pos;
                    w += ranks[pos];
                }
                CHECK(w == stream.last_weight());
                CHECK(w >= prev_w);
                prev_w = w;
                CHECK(seen.insert(mask).second); // each subset exactly once
            }
            CHECK(seen.size() == 1024);
        }
    }

    SUBCASE("rejects non-permutations") {
        CHECK_THROWS_AS(OrbgrandPatternStream({1, 1, 3}), std::invalid_argument);
        CHECK_THROWS_AS(OrbgrandPatternStream({2, 3, 4}), std::invalid_argument);
    }
}

TEST_CASE("sgrand pattern stream is the likelihood order") {
    Rng rng = make_rng(21, 3);
    std::uniform_real_distribution<double> unif(0.01, 5.0);
    std::vector<double> abs(12);
    for (auto& x : abs) x = unif(rng);

    SgrandPatternStream stream(abs);
    std::set<unsigned> seen;
    std::vector<int> pat;
    double prev = -1.0;
    while (stream.next(pat)) {
        unsigned mask = 0;
        double w = 0.0;
        for (int pos : pat) {
            mask |= 1u << pos;
            w += abs[pos];
        }
        CHECK(w == doctest::Approx(stream.last_weight()).epsilon(1e-12));
        CHECK(w >= prev - 1e-12);
        prev = w;
        CHECK(seen.insert(mask).second);
    }
    CHECK(seen.size() == 4096);
}

TEST_CASE("hamming pattern stream") {
    HammingPatternStream stream(5);
    std::set<unsigned> seen;
    std::vector<int> pat;
    std::size_t prev_card = 0;
    std::vector<int> prev_pat;
    while (stream.next(pat)) {
        unsigned mask = 0;
        for (int pos : pat) mask |= 1u << pos;
        CHECK(seen.insert(mask).second);
        CHECK(pat.size() >= prev_card);
        if (pat.size() == prev_card && !pat.empty()) {
            CHECK(std::lexicographical_compare(prev_pat.begin(), prev_pat.end(), pat.begin(),
                                               pat.end()));
        }
        prev_card = pat.size();
        prev_pat = pat;
    }
    CHECK(seen.size() == 32);
}

TEST_CASE("metric evaluation") {
    const std::vector<double> llrs = {0.4, -1.2, 2.0, -0.3};
    std::vector<std::uint8_t> hard = {1, 0, 1, 0}; // sgn(t), bit 1 <-> +1

    SUBCASE("hard decision scores zero") {
        for (Weighting w : {Weighting::Unit, Weighting::AbsLlr, Weighting::RankOverN}) {
            CHECK(metric_eval(hard, llrs, w) == 0.0);
        }
    }
    SUBCASE("all-disagree candidate under rank weights gives (N+1)/(2N)") {
        std::vector<std::uint8_t> flipped = {0, 1, 0, 1};
        const int n = 4;
        CHECK(metric_eval(flipped, llrs, Weighting::RankOverN) ==
              doctest::Approx((n + 1.0) / (2.0 * n)).epsilon(1e-12));
    }
    SUBCASE("unit weights recover the Hamming distance") {
        Rng rng = make_rng(8, 8);
        const BitChannel ch = bpsk_awgn_channel(0.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> t(9);
            for (auto& x : t) x = ch.sample_llr((rng() & 1) ? +1 : -1, rng);
            std::vector<std::uint8_t> cand(9);
            for (auto& b : cand) b = static_cast<std::uint8_t>(rng() & 1);
            int dist = 0;
            for (int i = 0; i < 9; ++i) {
                const std::uint8_t hd = t[i] >= 0 ? 1 : 0;
                dist += hd != cand[i];
            }
            CHECK(metric_eval(cand, t, Weighting::Unit) * 9.0 ==
                  doctest::Approx(static_cast<double>(dist)).epsilon(1e-12));
        }
    }
    SUBCASE("length mismatch rejected") {
        std::vector<std::uint8_t> bad = {1, 0};
        CHECK_THROWS_AS(metric_eval(bad, llrs, Weighting::Unit), std::invalid_argument);
    }
}

TEST_CASE("grand decoding") {
    SUBCASE("noise-free input decodes in exactly one query") {
        const LinearCode code = LinearCode::random_systematic(16, 8, 3);
        LinearCode::Word info;
        info.set(0);
        info.set(5);
        const LinearCode::Word sent = code.encode(info);
        std::vector<double> llrs(16);
        for (int i = 0; i < 16; ++i) llrs[i] = sent.test(i) ? 0.8 : -1.7; // correct signs
        for (Weighting w : {Weighting::Unit, Weighting::AbsLlr, Weighting::RankOverN}) {
            const auto res = grand_decode(llrs, code, {w, 1024});
            CHECK(res.decoded);
            CHECK(res.queries_used == 1);
            CHECK(res.metric_value == 0.0);
            for (int i = 0; i < 16; ++i) CHECK((res.codeword[i] != 0) == sent.test(i));
        }
    }

    SUBCASE("dimension mismatch and zero budget rejected") {
        const LinearCode code = LinearCode::random_systematic(8, 4, 1);
        std::vector<double> llrs(7, 1.0);
        CHECK_THROWS_AS(grand_decode(llrs, code, {Weighting::Unit, 10}), std::invalid_argument);
        std::vector<double> ok(8, 1.0);
        CHECK_THROWS_AS(grand_decode(ok, code, {Weighting::Unit, 0}), std::invalid_argument);
    }

    SUBCASE("abandonment respects the query budget and reports NaN metric") {
        const LinearCode code = LinearCode::random_systematic(12, 4, 2);
        std::vector<double> llrs(12);
        Rng rng = make_rng(31, 0);
        const BitChannel ch = bpsk_awgn_channel(-10.0);
        // heavy noise: a budget of 2 queries nearly always abandons
        bool saw_abandon = false;
        for (int t = 0; t < 20 && !saw_abandon; ++t) {
            for (int i = 0; i < 12; ++i) llrs[i] = ch.sample_llr(+1, rng);
            const auto res = grand_decode(llrs, code, {Weighting::RankOverN, 2});
            CHECK(res.queries_used <= 2);
            if (!res.decoded) {
                saw_abandon = true;
                CHECK(std::isnan(res.metric_value));
                CHECK(res.codeword.empty());
            }
        }
        CHECK(saw_abandon);
    }

    SUBCASE("increasing the budget never changes an already-found result") {
        const LinearCode code = LinearCode::random_systematic(12, 6, 4);
        const BitChannel ch = bpsk_awgn_channel(2.0);
        Rng rng = make_rng(77, 0);
        for (int t = 0; t < 50; ++t) {
            LinearCode::Word info;
            for (int i = 0; i < 6; ++i) {
                if (rng() & 1ull) info.set(i);
            }
            const auto sent = code.encode(info);
            const auto llrs = sample_llrs(ch, sent, 12, rng);
            const auto small = grand_decode(llrs, code, {Weighting::RankOverN, 64});
            const auto large = grand_decode(llrs, code, {Weighting::RankOverN, 4096});
            if (small.decoded) {
                REQUIRE(large.decoded);
                CHECK(small.codeword == large.codeword);
                CHECK(small.queries_used == large.queries_used);
            }
        }
    }

    SUBCASE("exhaustive-Q orbgrand equals the decoding-metric argmin on tie-free draws") {
        const int n = 12, k = 6;
        const LinearCode code = LinearCode::random_systematic(n, k, 11);
        std::vector<LinearCode::Word> codebook;
        for (unsigned m = 0; m < (1u << k); ++m) {
            LinearCode::Word info;
            for (int i = 0; i < k; ++i) {
                if (m & (1u << i)) info.set(i);
            }
            codebook.push_back(code.encode(info));
        }
        const BitChannel ch = bpsk_awgn_channel(6.0);
        Rng rng = make_rng(13, 13);
        int ties = 0, checked = 0;
        for (int t = 0; t < 200; ++t) {
            const auto sent = codebook[rng() % codebook.size()];
            const auto llrs = sample_llrs(ch, sent, n, rng);
            // metric argmin over the whole codebook
            double best = 1e300, second = 1e300;
            std::size_t best_idx = 0;
            for (std::size_t c = 0; c < codebook.size(); ++c) {
                std::vector<std::uint8_t> bits(n);
                for (int i = 0; i < n; ++i) bits[i] = codebook[c].test(i) ? 1 : 0;
                const double d = metric_eval(bits, llrs, Weighting::RankOverN);
                if (d < best) {
                    second = best;
                    best = d;
                    best_idx = c;
                } else {
                    second = std::min(second, d);
                }
            }
            if (second - best < 1e-12) {
                ++ties; // query order resolves ties; the metric form cannot
                continue;
            }
            ++checked;
            const auto res = grand_decode(llrs, code, {Weighting::RankOverN, 1ull << n});
            REQUIRE(res.decoded);
            for (int i = 0; i < n; ++i) {
                CHECK((res.codeword[i] != 0) == codebook[best_idx].test(i));
            }
            CHECK(res.metric_value == doctest::Approx(best).epsilon(1e-12));
        }
        INFO("ties skipped: ", ties);
        CHECK(checked >= 150);
    }

    SUBCASE("sgrand with a full budget implements maximum likelihood") {
        const int n = 12, k = 6;
        const LinearCode code = LinearCode::random_systematic(n, k, 19);
        std::vector<LinearCode::Word> codebook;
        for (unsigned m = 0; m < (1u << k); ++m) {
            LinearCode::Word info;
            for (int i = 0; i < k; ++i) {
                if (m & (1u << i)) info.set(i);
            }
            codebook.push_back(code.encode(info));
        }
        const BitChannel ch = bpsk_awgn_channel(3.0);
        Rng rng = make_rng(23, 5);
        for (int t = 0; t < 500; ++t) {
            const auto sent = codebook[rng() % codebook.size()];
            const auto llrs = sample_llrs(ch, sent, n, rng);
            // exhaustive ML: maximize sum of x_i * t_i
            double best = -1e300;
            std::size_t best_idx = 0;
            for (std::size_t c = 0; c < codebook.size(); ++c) {
                double score = 0.0;
                for (int i = 0; i < n; ++i) {
                    score += (codebook[c].test(i) ? 1.0 : -1.0) * llrs[i];
                }
                if (score > best) {
                    best = score;
                    best_idx = c;
                }
            }
            const auto res = grand_decode(llrs, code, {Weighting::AbsLlr, 1ull << n});
            REQUIRE(res.decoded);
            for (int i = 0; i < n; ++i) {
                CHECK((res.codeword[i] != 0) == codebook[best_idx].test(i));
            }
        }
    }
}

TEST_CASE("metric statistics match the rate-module limits") {
    const BitChannel ch = bpsk_awgn_channel(3.0);
    const std::vector<double> thetas = {-5.0};
    const MetricStats stats = simulate_metric_statistics(ch, 4096, 500, thetas, 314);

    SUBCASE("mean of D(1) approaches the linear term at large n") {
        const auto lin = orbgrand_linear_term(ch, ch.analytic_psi(), 400'000, 314);
        const double tol = 3.0 * (stats.mean_std_error + lin.std_error) + 2e-4;
        INFO("mean=", stats.mean_d1, " lin=", lin.value);
        CHECK(std::abs(stats.mean_d1 - lin.value) <= tol);
    }

    SUBCASE("variance of D(1) shrinks with block length") {
        const MetricStats small = simulate_metric_statistics(ch, 128, 500, {}, 42);
        const MetricStats mid = simulate_metric_statistics(ch, 2048, 500, {}, 43);
        CHECK(mid.var_d1 < small.var_d1);
    }

    SUBCASE("conditional log-mgf estimate approaches its logistic-integral limit") {
        const double want = logistic_integral(-5.0) - oracle::kLn2;
        REQUIRE(stats.delta_hat.size() == 1);
        CHECK(std::abs(stats.delta_hat[0] - want) <= 1e-3);
    }
}
