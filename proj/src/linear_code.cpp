#include "grandrate/linear_code.hpp"

#include <stdexcept>

#include "grandrate/random.hpp"

namespace grandrate {

LinearCode::LinearCode(int n, int k, std::vector<Word> p_rows) : n_(n), k_(k) {
    if (!(1 <= k && k < n && n <= kMaxBlockLength)) {
        throw std::invalid_argument("LinearCode: require 1 <= k < n <= 128");
    }
    if (p_rows.size() != static_cast<std::size_t>(k)) {
        throw std::invalid_argument("LinearCode: parity part must have k rows");
    }
    const int r = n - k;
    // G = [I_k | P]; P rows are given over columns 0..r-1
    g_rows_.assign(k, Word{});
    for (int i = 0; i < k; ++i) {
        g_rows_[i].set(i);
        for (int j = 0; j < r; ++j) {
            if (p_rows[i].test(j)) g_rows_[i].set(k + j);
        }
    }
    // H = [P^T | I_r]
    h_rows_.assign(r, Word{});
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < k; ++i) {
            if (p_rows[i].test(j)) h_rows_[j].set(i);
        }
        h_rows_[j].set(k + j);
    }
    col_syndrome_.assign(n, Word{});
    for (int j = 0; j < r; ++j) {
        for (int pos = 0; pos < n; ++pos) {
            if (h_rows_[j].test(pos)) col_syndrome_[pos].set(j);
        }
    }
}

LinearCode LinearCode::random_systematic(int n, int k, std::uint64_t seed) {
    if (!(1 <= k && k < n && n <= kMaxBlockLength)) {
        throw std::invalid_argument("random_systematic: require 1 <= k < n <= 128");
    }
    Rng rng = make_rng(seed, 0xC0DE);
    std::vector<Word> p_rows(k);
    const int r = n - k;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < r; ++j) {
            if (rng() & 1ull) p_rows[i].set(j);
        }
    }
    return LinearCode(n, k, std::move(p_rows));
}

LinearCode::Word LinearCode::encode(const Word& info) const {
    Word out;
    for (int i = 0; i < k_; ++i) {
        if (info.test(i)) out ^= g_rows_[i];
    }
    return out;
}

LinearCode::Word LinearCode::syndrome(const Word& word) const {
    Word s;
    const int r = n_ - k_;
    for (int j = 0; j < r; ++j) {
        if ((h_rows_[j] & word).count() & 1u) s.set(j);
    }
    return s;
}

bool LinearCode::is_codeword(const Word& word) const { return syndrome(word).none(); }

} // namespace grandrate
