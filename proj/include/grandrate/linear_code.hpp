#ifndef GRANDRATE_LINEAR_CODE_HPP
#define GRANDRATE_LINEAR_CODE_HPP

#include <bitset>
#include <cstdint>
#include <vector>

namespace grandrate {

// Binary linear block code in systematic form, n <= 128.
// G = [I_k | P], H = [P^T | I_{n-k}], so G H^T = 0 over GF(2) by construction.
class LinearCode {
public:
    static constexpr int kMaxBlockLength = 128;
    using Word = std::bitset<kMaxBlockLength>;

    LinearCode(int n, int k, std::vector<Word> parity_columns_of_p);

    // Systematic code with a uniformly random parity part; deterministic per seed.
    static LinearCode random_systematic(int n, int k, std::uint64_t seed);

    int n() const { return n_; }
    int k() const { return k_; }

    // Encode k information bits (positions 0..k-1 of info) into an n-bit word.
    Word encode(const Word& info) const;

    bool is_codeword(const Word& word) const;

    // Syndrome as a bitset over the n-k parity checks.
    Word syndrome(const Word& word) const;
    // Syndrome contribution of a single flipped position (column of H).
    const Word& column_syndrome(int pos) const { return col_syndrome_[pos]; }

    const std::vector<Word>& parity_rows() const { return h_rows_; }
    const std::vector<Word>& generator_rows() const { return g_rows_; }

private:
    int n_;
    int k_;
    std::vector<Word> g_rows_;       // k rows over n columns
    std::vector<Word> h_rows_;       // n-k rows over n columns
    std::vector<Word> col_syndrome_; // n entries over n-k checks
};

} // namespace grandrate

#endif
