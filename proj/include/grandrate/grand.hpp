#ifndef GRANDRATE_GRAND_HPP
#define GRANDRATE_GRAND_HPP

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "grandrate/bit_channel.hpp"
#include "grandrate/linear_code.hpp"

namespace grandrate {

// Query-ordering weight gamma_n: 1 for plain GRAND, |t_n| for SGRAND,
// rank(|t_n|)/N for ORBGRAND.
enum class Weighting { Unit, AbsLlr, RankOverN };

struct QueryPlan {
    Weighting weighting = Weighting::RankOverN;
    std::uint64_t max_queries = 1'000'000;
};

struct DecodeOutcome {
    bool decoded = false;
    std::vector<std::uint8_t> codeword; // empty when abandoned
    std::uint64_t queries_used = 0;
    double metric_value = 0.0; // D at the returned codeword; NaN when abandoned
};

// Rank of each |t| from 1 (smallest) to N; ties broken by ascending position.
std::vector<int> rank_reliabilities(std::span<const double> abs_llrs);

// Streams every subset of {0..N-1} in nondecreasing order of summed ranks,
// starting with the empty pattern. Within one rank-sum the partitions of the
// weight into distinct parts are emitted largest-part-first, recursively, which
// fixes a deterministic order. Constant memory per weight level.
class OrbgrandPatternStream {
public:
    explicit OrbgrandPatternStream(const std::vector<int>& ranks);
    // Fills `positions` (0-based, unordered set of flips); false once all 2^N
    // patterns have been emitted.
    bool next(std::vector<int>& positions);
    long long last_weight() const { return weight_; }

private:
    struct Frame {
        long long remaining;
        int next_p;
        bool owns_part;
    };
    bool advance_dfs(std::vector<int>& positions);
    void start_weight(long long w);
    void emit(std::vector<int>& positions, int final_part) const;

    int n_ = 0;
    std::vector<int> pos_of_rank_; // 1-based rank -> position
    long long weight_ = -1;        // current target rank-sum; -1 = before empty pattern
    long long max_weight_ = 0;
    std::vector<Frame> stack_;
    std::vector<int> parts_;
};

// Streams subsets in nondecreasing order of summed |llr| via a best-first heap
// (max-priority in likelihood). Ties broken lexicographically for determinism.
class SgrandPatternStream {
public:
    explicit SgrandPatternStream(std::span<const double> abs_llrs);
    bool next(std::vector<int>& positions);
    double last_weight() const { return weight_; }

private:
    struct Node {
        double weight;
        std::vector<int> sorted_idx; // ascending indices into the sorted-|llr| order
        bool operator>(const Node& o) const {
            if (weight != o.weight) return weight > o.weight;
            return sorted_idx > o.sorted_idx;
        }
    };
    int n_ = 0;
    bool emitted_empty_ = false;
    double weight_ = 0.0;
    std::vector<double> sorted_abs_;
    std::vector<int> orig_pos_; // sorted order -> original position
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap_;
};

// Streams subsets in nondecreasing Hamming weight; lexicographic within a weight.
class HammingPatternStream {
public:
    explicit HammingPatternStream(int n);
    bool next(std::vector<int>& positions);

private:
    int n_;
    int card_ = -1;
    std::vector<int> comb_;
};

// Hard-decides sgn(t) (sgn(0) = +1, bit 1 <-> +1), then queries candidate error
// patterns in the plan's order until a word passes the syndrome check or the
// query budget is spent.
DecodeOutcome grand_decode(std::span<const double> llrs, const LinearCode& code,
                           const QueryPlan& plan);

// (1/N) sum_n gamma_n * 1(sgn(t_n) * x_n < 0) for the candidate word.
double metric_eval(std::span<const std::uint8_t> candidate_bits, std::span<const double> llrs,
                   Weighting weighting);

struct MetricStats {
    double mean_d1 = 0.0;
    double var_d1 = 0.0;
    double mean_std_error = 0.0;
    // delta_log_mgf_estimator evaluated on a realized rank permutation for each
    // requested theta (permutation-invariant, hence one value per theta).
    std::vector<double> delta_hat;
};

// Draws `trials` transmitted words of length n through the channel and collects
// statistics of the ORBGRAND metric at the transmitted codeword.
MetricStats simulate_metric_statistics(const BitChannel& ch, int n, int trials,
                                       std::span<const double> thetas,
                                       std::uint64_t seed = 0xC0FFEE);

} // namespace grandrate

#endif
