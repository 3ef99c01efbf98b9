#include "grandrate/grand.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "grandrate/rates.hpp"
#include "grandrate/stats.hpp"

namespace grandrate {

std::vector<int> rank_reliabilities(std::span<const double> abs_llrs) {
    if (abs_llrs.empty()) throw std::invalid_argument("rank_reliabilities: empty input");
    const int n = static_cast<int>(abs_llrs.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&abs_llrs](int a, int b) {
        if (abs_llrs[a] != abs_llrs[b]) return abs_llrs[a] < abs_llrs[b];
        return a < b; // ties by ascending position
    });
    std::vector<int> ranks(n);
    for (int r = 0; r < n; ++r) ranks[order[r]] = r + 1;
    return ranks;
}

OrbgrandPatternStream::OrbgrandPatternStream(const std::vector<int>& ranks) {
    n_ = static_cast<int>(ranks.size());
    if (n_ == 0) throw std::invalid_argument("OrbgrandPatternStream: empty rank vector");
    pos_of_rank_.assign(n_ + 1, -1);
    for (int pos = 0; pos < n_; ++pos) {
        const int r = ranks[pos];
        if (r < 1 || r > n_ || pos_of_rank_[r] != -1) {
            throw std::invalid_argument("OrbgrandPatternStream: ranks must be a permutation of 1..N");
        }
        pos_of_rank_[r] = pos;
    }
    max_weight_ = static_cast<long long>(n_) * (n_ + 1) / 2;
}

void OrbgrandPatternStream::start_weight(long long w) {
    stack_.clear();
    parts_.clear();
    const int maxp = static_cast<int>(std::min<long long>(w, n_));
    stack_.push_back(Frame{w, maxp, false});
}

void OrbgrandPatternStream::emit(std::vector<int>& positions, int final_part) const {
    positions.clear();
    for (int part : parts_) positions.push_back(pos_of_rank_[part]);
    positions.push_back(pos_of_rank_[final_part]);
}

bool OrbgrandPatternStream::advance_dfs(std::vector<int>& positions) {
    while (!stack_.empty()) {
        Frame& f = stack_.back();
        const long long rem = f.remaining;
        // smallest part that still allows the remainder to be a sum of smaller
        // distinct parts: p(p+1)/2 >= rem
        int pmin = static_cast<int>((std::sqrt(8.0 * static_cast<double>(rem) + 1.0) - 1.0) / 2.0);
        while (static_cast<long long>(pmin) * (pmin + 1) / 2 < rem) ++pmin;
        while (pmin > 1 && static_cast<long long>(pmin - 1) * pmin / 2 >= rem) --pmin;

        const int p = f.next_p;
        if (p < pmin) {
            const bool owns = f.owns_part;
            stack_.pop_back();
            if (owns) parts_.pop_back();
            continue;
        }
        f.next_p = p - 1;
        if (static_cast<long long>(p) == rem) {
            emit(positions, p);
            return true;
        }
        parts_.push_back(p);
        const long long rem2 = rem - p;
        stack_.push_back(Frame{rem2, static_cast<int>(std::min<long long>(rem2, p - 1)), true});
    }
    return false;
}

bool OrbgrandPatternStream::next(std::vector<int>& positions) {
    if (weight_ < 0) {
        weight_ = 0;
        positions.clear();
        return true;
    }
    if (weight_ == 0) {
        weight_ = 1;
        start_weight(1);
    }
    while (true) {
        if (advance_dfs(positions)) return true;
        ++weight_;
        if (weight_ > max_weight_) return false;
        start_weight(weight_);
    }
}

SgrandPatternStream::SgrandPatternStream(std::span<const double> abs_llrs) {
    n_ = static_cast<int>(abs_llrs.size());
    if (n_ == 0) throw std::invalid_argument("SgrandPatternStream: empty input");
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&abs_llrs](int a, int b) {
        if (abs_llrs[a] != abs_llrs[b]) return abs_llrs[a] < abs_llrs[b];
        return a < b;
    });
    sorted_abs_.resize(n_);
    orig_pos_.resize(n_);
    for (int s = 0; s < n_; ++s) {
        orig_pos_[s] = order[s];
        sorted_abs_[s] = abs_llrs[order[s]];
    }
    heap_.push(Node{sorted_abs_[0], {0}});
}

bool SgrandPatternStream::next(std::vector<int>& positions) {
    if (!emitted_empty_) {
        emitted_empty_ = true;
        weight_ = 0.0;
        positions.clear();
        return true;
    }
    if (heap_.empty()) return false;
    Node top = heap_.top();
    heap_.pop();
    weight_ = top.weight;
    positions.clear();
    for (int s : top.sorted_idx) positions.push_back(orig_pos_[s]);
    const int j = top.sorted_idx.back();
    if (j + 1 < n_) {
        Node ext = top;
        ext.sorted_idx.push_back(j + 1);
        ext.weight += sorted_abs_[j + 1];
        heap_.push(std::move(ext));
        Node rep = std::move(top);
        rep.sorted_idx.back() = j + 1;
        rep.weight += sorted_abs_[j + 1] - sorted_abs_[j];
        heap_.push(std::move(rep));
    }
    return true;
}

HammingPatternStream::HammingPatternStream(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("HammingPatternStream: n must be positive");
}

bool HammingPatternStream::next(std::vector<int>& positions) {
    if (card_ < 0) {
        card_ = 0;
        positions.clear();
        return true;
    }
    if (card_ == 0) {
        card_ = 1;
        comb_ = {0};
        positions = comb_;
        return true;
    }
    int i = card_ - 1;
    while (i >= 0 && comb_[i] == n_ - card_ + i) --i;
    if (i < 0) {
        ++card_;
        if (card_ > n_) return false;
        comb_.resize(card_);
        std::iota(comb_.begin(), comb_.end(), 0);
    } else {
        ++comb_[i];
        for (int j = i + 1; j < card_; ++j) comb_[j] = comb_[j - 1] + 1;
    }
    positions = comb_;
    return true;
}

double metric_eval(std::span<const std::uint8_t> candidate_bits, std::span<const double> llrs,
                   Weighting weighting) {
    if (candidate_bits.size() != llrs.size()) {
        throw std::invalid_argument("metric_eval: length mismatch");
    }
    const int n = static_cast<int>(llrs.size());
    std::vector<int> ranks;
    if (weighting == Weighting::RankOverN) {
        std::vector<double> abs(n);
        for (int i = 0; i < n; ++i) abs[i] = std::abs(llrs[i]);
        ranks = rank_reliabilities(abs);
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        // sgn(t) = +1 for t >= 0; candidate bit 1 <-> x = +1
        const bool disagree = (llrs[i] >= 0.0) != (candidate_bits[i] != 0);
        if (!disagree) continue;
        switch (weighting) {
            case Weighting::Unit: acc += 1.0; break;
            case Weighting::AbsLlr: acc += std::abs(llrs[i]); break;
            case Weighting::RankOverN:
                acc += static_cast<double>(ranks[i]) / static_cast<double>(n);
                break;
        }
    }
    return acc / static_cast<double>(n);
}

DecodeOutcome grand_decode(std::span<const double> llrs, const LinearCode& code,
                           const QueryPlan& plan) {
    const int n = code.n();
    if (static_cast<int>(llrs.size()) != n) {
        throw std::invalid_argument("grand_decode: LLR vector length must equal code.n");
    }
    if (plan.max_queries < 1) throw std::invalid_argument("grand_decode: max_queries must be >= 1");

    LinearCode::Word hard;
    std::vector<double> abs(n);
    for (int i = 0; i < n; ++i) {
        if (llrs[i] >= 0.0) hard.set(i);
        abs[i] = std::abs(llrs[i]);
    }
    const LinearCode::Word synd_hard = code.syndrome(hard);

    std::optional<OrbgrandPatternStream> orb;
    std::optional<SgrandPatternStream> sg;
    std::optional<HammingPatternStream> ham;
    std::function<bool(std::vector<int>&)> next_pattern;
    switch (plan.weighting) {
        case Weighting::RankOverN:
            orb.emplace(rank_reliabilities(abs));
            next_pattern = [&orb](std::vector<int>& p) { return orb->next(p); };
            break;
        case Weighting::AbsLlr:
            sg.emplace(abs);
            next_pattern = [&sg](std::vector<int>& p) { return sg->next(p); };
            break;
        case Weighting::Unit:
            ham.emplace(n);
            next_pattern = [&ham](std::vector<int>& p) { return ham->next(p); };
            break;
    }

    DecodeOutcome out;
    std::vector<int> pattern;
    while (out.queries_used < plan.max_queries && next_pattern(pattern)) {
        ++out.queries_used;
        LinearCode::Word s = synd_hard;
        for (int pos : pattern) s ^= code.column_syndrome(pos);
        if (s.none()) {
            LinearCode::Word w = hard;
            for (int pos : pattern) w.flip(pos);
            out.decoded = true;
            out.codeword.resize(n);
            for (int i = 0; i < n; ++i) out.codeword[i] = w.test(i) ? 1 : 0;
            out.metric_value = metric_eval(out.codeword, llrs, plan.weighting);
            return out;
        }
    }
    out.metric_value = std::numeric_limits<double>::quiet_NaN();
    return out;
}

MetricStats simulate_metric_statistics(const BitChannel& ch, int n, int trials,
                                       std::span<const double> thetas, std::uint64_t seed) {
    if (n < 1 || trials < 1) {
        throw std::invalid_argument("simulate_metric_statistics: n and trials must be positive");
    }
    RunningStats d1;
    std::vector<std::uint8_t> bits(n);
    std::vector<double> llrs(n);
    std::vector<int> last_ranks;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(seed, 0x51A7 + static_cast<std::uint64_t>(t));
        for (int i = 0; i < n; ++i) {
            bits[i] = static_cast<std::uint8_t>(rng() & 1ull);
            llrs[i] = ch.sample_llr(bits[i] ? +1 : -1, rng);
        }
        d1.add(metric_eval(bits, llrs, Weighting::RankOverN));
        if (t + 1 == trials) {
            std::vector<double> abs(n);
            for (int i = 0; i < n; ++i) abs[i] = std::abs(llrs[i]);
            last_ranks = rank_reliabilities(abs);
        }
    }
    MetricStats out;
    out.mean_d1 = d1.mean();
    out.var_d1 = d1.variance();
    out.mean_std_error = d1.std_error();
    out.delta_hat.reserve(thetas.size());
    for (double th : thetas) {
        out.delta_hat.push_back(delta_log_mgf_estimator(last_ranks, th));
    }
    return out;
}

} // namespace grandrate
