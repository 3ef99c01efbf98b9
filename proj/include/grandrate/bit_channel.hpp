#ifndef GRANDRATE_BIT_CHANNEL_HPP
#define GRANDRATE_BIT_CHANNEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "grandrate/random.hpp"

namespace grandrate {

enum class ChannelKind { BpskAwgn, Bsc, BpskRayleighCsi, BicmBit, Empirical };

// Cdf of the LLR magnitude |T| under equiprobable inputs. Analytic form wraps a
// closure; empirical form is a right-continuous step function over sorted samples.
class ReliabilityCdf {
public:
    static ReliabilityCdf analytic(std::function<double(double)> cdf);
    static ReliabilityCdf empirical(std::vector<double> abs_llr_samples);

    double operator()(double t) const;
    bool is_empirical() const { return !samples_.empty(); }
    std::size_t sample_count() const { return samples_.size(); }

private:
    ReliabilityCdf() = default;
    std::function<double(double)> analytic_;
    std::vector<double> samples_; // sorted ascending when empirical
};

// Analytic parameter blocks. T | X=x is the LLR random variable.
struct AwgnParams {
    double sigma_sq; // noise variance per real dimension
    double mu;       // E[T | X=+1] = 2/sigma_sq
    double s;        // std of T given X: 2/sigma
};
struct BscParams {
    double p;         // crossover probability
    double magnitude; // |T| = ln((1-p)/p)
};
struct RayleighParams {
    double sigma_sq; // per-real-dimension noise variance at |h| = 1
    double kappa;    // density of T|X=+1 is amp * exp(t/2 - kappa*|t|)
    double amp;
};

// A binary-input channel seen through its LLR random variable T.
// sample_llr draws T conditioned on the transmitted input x in {+1,-1} using a
// caller-owned randomness source, so concurrent use only needs per-worker Rngs.
class BitChannel {
public:
    using Sampler = std::function<double(int, Rng&)>;
    using OutputMap = std::function<double(double)>;

    BitChannel(ChannelKind kind, Sampler sampler) : kind_(kind), sampler_(std::move(sampler)) {}

    double sample_llr(int x, Rng& rng) const {
        if (x != 1 && x != -1) throw std::invalid_argument("sample_llr: input must be +1 or -1");
        return sampler_(x, rng);
    }

    ChannelKind kind() const { return kind_; }

    bool has_llr_of_output() const { return static_cast<bool>(llr_of_output_); }
    double llr_of_output(double y) const {
        if (!llr_of_output_) throw std::logic_error("llr_of_output not defined for this channel");
        return llr_of_output_(y);
    }

    bool has_analytic_psi() const { return analytic_psi_.has_value(); }
    const ReliabilityCdf& analytic_psi() const {
        if (!analytic_psi_) throw std::logic_error("no analytic reliability cdf for this channel");
        return *analytic_psi_;
    }

    const AwgnParams* awgn_params() const { return std::get_if<AwgnParams>(&params_); }
    const BscParams* bsc_params() const { return std::get_if<BscParams>(&params_); }
    const RayleighParams* rayleigh_params() const { return std::get_if<RayleighParams>(&params_); }

    // Builder-style setters used by the channel factories.
    BitChannel& with_output_map(OutputMap f) {
        llr_of_output_ = std::move(f);
        return *this;
    }
    BitChannel& with_analytic_psi(ReliabilityCdf psi) {
        analytic_psi_ = std::move(psi);
        return *this;
    }
    template <typename P>
    BitChannel& with_params(P p) {
        params_ = std::move(p);
        return *this;
    }

private:
    ChannelKind kind_;
    Sampler sampler_;
    OutputMap llr_of_output_;
    std::optional<ReliabilityCdf> analytic_psi_;
    std::variant<std::monostate, AwgnParams, BscParams, RayleighParams> params_;
};

// y = x + n, n ~ N(0, sigma^2), sigma^2 = 10^(-snr_db/10); T = 2y/sigma^2.
BitChannel bpsk_awgn_channel(double snr_db);

// T = +-ln((1-p)/p), wrong sign with probability p. Requires 0 < p < 1/2.
BitChannel bsc_channel(double p);

// y = h x + z with h unit-variance circularly symmetric complex Gaussian revealed
// to the receiver, z complex Gaussian with variance sigma^2 per real dimension;
// matched-filter LLR t = 2 Re(h* y) / sigma^2. Reduces to the AWGN channel at h = 1.
BitChannel bpsk_rayleigh_channel(double snr_db);

// Channel backed by stored LLR samples (drawn uniformly with replacement).
BitChannel empirical_channel(std::vector<double> llr_given_plus,
                             std::vector<double> llr_given_minus);

// Matched-filter LLR for one complex observation with known gain; exposed so the
// fading math can be checked pointwise.
double rayleigh_csi_llr(double y_re, double y_im, double h_re, double h_im, double sigma_sq);

// Reliability cdf of a channel: closed form for the analytic kinds
// (BPSK-AWGN, BSC, BPSK-Rayleigh-CSI), empirical otherwise. The empirical form
// needs n_samples >= 10^4 and draws under equiprobable inputs.
ReliabilityCdf psi_cdf(const BitChannel& ch, std::size_t n_samples,
                       std::uint64_t seed = 0xC0FFEE);

} // namespace grandrate

#endif
