#include "grandrate/bit_channel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "grandrate/numerics.hpp"

namespace grandrate {

ReliabilityCdf ReliabilityCdf::analytic(std::function<double(double)> cdf) {
    ReliabilityCdf r;
    r.analytic_ = std::move(cdf);
    return r;
}

ReliabilityCdf ReliabilityCdf::empirical(std::vector<double> abs_llr_samples) {
    if (abs_llr_samples.empty()) {
        throw std::invalid_argument("ReliabilityCdf::empirical: no samples");
    }
    ReliabilityCdf r;
    r.samples_ = std::move(abs_llr_samples);
    std::sort(r.samples_.begin(), r.samples_.end());
    return r;
}

double ReliabilityCdf::operator()(double t) const {
    if (t < 0.0) return 0.0;
    if (samples_.empty()) return analytic_(t);
    // right-continuous step: fraction of samples <= t
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

namespace {

double snr_db_to_sigma_sq(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

} // namespace

BitChannel bpsk_awgn_channel(double snr_db) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("bpsk_awgn_channel: snr_db must be finite");
    const double sigma_sq = snr_db_to_sigma_sq(snr_db);
    const double mu = 2.0 / sigma_sq;
    const double s = 2.0 / std::sqrt(sigma_sq);
    AwgnParams params{sigma_sq, mu, s};

    auto sampler = [mu, s](int x, Rng& rng) {
        std::normal_distribution<double> d(x > 0 ? mu : -mu, s);
        return d(rng);
    };
    // folded Gaussian cdf of |T|; identical under either input by symmetry
    auto psi = ReliabilityCdf::analytic([mu, s](double t) {
        if (t < 0.0) return 0.0;
        return normal_cdf((t - mu) / s) - normal_cdf((-t - mu) / s);
    });

    BitChannel ch(ChannelKind::BpskAwgn, sampler);
    ch.with_output_map([sigma_sq](double y) { return 2.0 * y / sigma_sq; })
        .with_analytic_psi(std::move(psi))
        .with_params(params);
    return ch;
}

BitChannel bsc_channel(double p) {
    if (!(p > 0.0 && p < 0.5)) {
        throw std::invalid_argument("bsc_channel: p must lie in (0, 1/2)");
    }
    const double mag = std::log((1.0 - p) / p);
    BscParams params{p, mag};

    auto sampler = [p, mag](int x, Rng& rng) {
        std::bernoulli_distribution flip(p);
        const double sign = flip(rng) ? -1.0 : 1.0;
        return sign * static_cast<double>(x) * mag;
    };
    auto psi = ReliabilityCdf::analytic([mag](double t) { return t >= mag ? 1.0 : 0.0; });

    BitChannel ch(ChannelKind::Bsc, sampler);
    ch.with_analytic_psi(std::move(psi)).with_params(params);
    return ch;
}

double rayleigh_csi_llr(double y_re, double y_im, double h_re, double h_im, double sigma_sq) {
    return 2.0 * (h_re * y_re + h_im * y_im) / sigma_sq;
}

BitChannel bpsk_rayleigh_channel(double snr_db) {
    if (!std::isfinite(snr_db)) {
        throw std::invalid_argument("bpsk_rayleigh_channel: snr_db must be finite");
    }
    const double sigma_sq = snr_db_to_sigma_sq(snr_db);
    // Marginalizing the conditional N(2g/s2, 4g/s2) law over g = |h|^2 ~ Exp(1)
    // gives a two-sided exponential density amp * exp(t/2 - kappa |t|) for T | X=+1,
    // with kappa = sqrt(1/4 + sigma_sq/2).
    const double kappa = std::sqrt(0.25 + 0.5 * sigma_sq);
    const double amp = (kappa * kappa - 0.25) / (2.0 * kappa);
    RayleighParams params{sigma_sq, kappa, amp};

    auto sampler = [sigma_sq](int x, Rng& rng) {
        std::normal_distribution<double> half(0.0, std::sqrt(0.5));
        const double h_re = half(rng);
        const double h_im = half(rng);
        std::normal_distribution<double> noise(0.0, std::sqrt(sigma_sq));
        const double y_re = h_re * static_cast<double>(x) + noise(rng);
        const double y_im = h_im * static_cast<double>(x) + noise(rng);
        return rayleigh_csi_llr(y_re, y_im, h_re, h_im, sigma_sq);
    };
    // Psi(t) = P(|T| <= t): integrate the two-sided exponential over [-t, t].
    auto psi = ReliabilityCdf::analytic([kappa, amp](double t) {
        if (t <= 0.0) return 0.0;
        const double lo = kappa + 0.5; // decay rate on the wrong-sign side
        const double hi = kappa - 0.5; // decay rate on the correct-sign side
        return amp * ((1.0 - std::exp(-lo * t)) / lo + (1.0 - std::exp(-hi * t)) / hi);
    });

    BitChannel ch(ChannelKind::BpskRayleighCsi, sampler);
    ch.with_analytic_psi(std::move(psi)).with_params(params);
    return ch;
}

BitChannel empirical_channel(std::vector<double> llr_given_plus,
                             std::vector<double> llr_given_minus) {
    if (llr_given_plus.empty() || llr_given_minus.empty()) {
        throw std::invalid_argument("empirical_channel: sample stores must be nonempty");
    }
    auto plus = std::make_shared<std::vector<double>>(std::move(llr_given_plus));
    auto minus = std::make_shared<std::vector<double>>(std::move(llr_given_minus));
    auto sampler = [plus, minus](int x, Rng& rng) {
        const auto& store = (x > 0) ? *plus : *minus;
        std::uniform_int_distribution<std::size_t> pick(0, store.size() - 1);
        return store[pick(rng)];
    };
    return BitChannel(ChannelKind::Empirical, sampler);
}

ReliabilityCdf psi_cdf(const BitChannel& ch, std::size_t n_samples, std::uint64_t seed) {
    if (ch.has_analytic_psi()) return ch.analytic_psi();
    if (n_samples < 10'000) {
        throw std::invalid_argument("psi_cdf: empirical form requires n_samples >= 10^4");
    }
    Rng rng = make_rng(seed, 0x5150);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> abs_samples(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const int x = sign(rng) ? 1 : -1;
        abs_samples[i] = std::abs(ch.sample_llr(x, rng));
    }
    return ReliabilityCdf::empirical(std::move(abs_samples));
}

} // namespace grandrate
