#ifndef GRANDRATE_BICM_HPP
#define GRANDRATE_BICM_HPP

#include <complex>
#include <string>
#include <vector>

#include "grandrate/bit_channel.hpp"
#include "grandrate/rates.hpp"

namespace grandrate {

enum class Scheme { Qpsk, Psk8, Qam16 };
enum class LabelingRule { Gray, SetPartitioning };
enum class Fading { Awgn, RayleighCsi };

// Complex constellation with unit average energy and an m-bit labeling.
// labels[i] is the label of points[i]; level 1 is the most significant bit.
struct Constellation {
    std::vector<std::complex<double>> points;
    std::vector<unsigned> labels;
    int m = 0;
    std::string scheme_name;
    std::string labeling_name;

    unsigned level_bit(std::size_t point_index, int level) const {
        return (labels[point_index] >> (m - level)) & 1u;
    }
};

Constellation make_constellation(Scheme scheme, LabelingRule labeling);

Scheme scheme_from_string(const std::string& s);
LabelingRule labeling_from_string(const std::string& s);

// Y = H S + Z with Z circularly symmetric complex Gaussian scaled so the symbol
// SNR is 10^(snr_db/10); H = 1 for AWGN, unit-variance complex Gaussian
// (revealed to the receiver) for Rayleigh.
struct FadingModel {
    Fading kind = Fading::Awgn;
    double snr_db = 0.0;
};

// The i-th label position of the constellation as a memoryless bit channel:
// fresh (s, h, z) per use (ideal interleaving), LLR by log-sum-exp over the
// two label subsets with max-subtraction.
BitChannel bicm_bit_channel(const Constellation& c, int level, const FadingModel& fading);

enum class RateMetric { Orbgrand, Sgrand, Mi };

struct BicmRateResult {
    double total = 0.0;
    std::vector<double> per_level;
    std::vector<double> per_level_std_error;
    double std_error = 0.0; // of the total
    bool any_bracket_edge = false;
};

// Sum of the requested rate over the m parallel bit channels, with the
// per-level breakdown.
BicmRateResult bicm_rate(const Constellation& c, const FadingModel& fading, RateMetric which,
                         const RateConfig& cfg = {});

} // namespace grandrate

#endif
