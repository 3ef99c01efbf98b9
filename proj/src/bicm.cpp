#include "grandrate/bicm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grandrate {

namespace {

using cplx = std::complex<double>;

Constellation qpsk(LabelingRule labeling) {
    Constellation c;
    c.m = 2;
    c.scheme_name = "qpsk";
    const double a = 1.0 / std::sqrt(2.0);
    // angular order: 45, 135, 225, 315 degrees
    c.points = {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
    if (labeling == LabelingRule::Gray) {
        c.labeling_name = "gray";
        c.labels = {0b00, 0b01, 0b11, 0b10};
    } else {
        c.labeling_name = "sp";
        // successive antipodal splits: level-1 bit separates the two diagonals
        c.labels = {0b00, 0b10, 0b01, 0b11};
    }
    return c;
}

Constellation psk8(LabelingRule labeling) {
    Constellation c;
    c.m = 3;
    c.scheme_name = "8psk";
    for (int k = 0; k < 8; ++k) {
        const double phi = k * M_PI / 4.0;
        c.points.emplace_back(std::cos(phi), std::sin(phi));
    }
    if (labeling == LabelingRule::Gray) {
        c.labeling_name = "gray";
        c.labels = {0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100};
    } else {
        c.labeling_name = "sp";
        c.labels = {0b000, 0b100, 0b010, 0b110, 0b001, 0b101, 0b011, 0b111};
    }
    return c;
}

Constellation qam16(LabelingRule labeling) {
    Constellation c;
    c.m = 4;
    c.scheme_name = "16qam";
    c.labeling_name = labeling == LabelingRule::Gray ? "gray" : "sp";
    const double scale = 1.0 / std::sqrt(10.0);
    // per-axis Gray map over pam levels -3,-1,+1,+3
    const unsigned axis_gray[4] = {0b00, 0b01, 0b11, 0b10};
    struct Grouped {
        std::vector<int> flat; // flat indices (r*4+c) of one sub-lattice, row-major
    };
    std::vector<Grouped> groups(4);
    for (int r = 0; r < 4; ++r) {
        for (int c4 = 0; c4 < 4; ++c4) {
            c.points.emplace_back((2 * c4 - 3) * scale, (2 * r - 3) * scale);
            if (labeling == LabelingRule::SetPartitioning) {
                const unsigned b1 = static_cast<unsigned>((r + c4) & 1); // checkerboard coset
                const unsigned b2 = static_cast<unsigned>(r & 1);        // sub-lattice within coset
                groups[b1 * 2 + b2].flat.push_back(r * 4 + c4);
            }
        }
    }
    c.labels.assign(16, 0);
    if (labeling == LabelingRule::Gray) {
        for (int r = 0; r < 4; ++r) {
            for (int c4 = 0; c4 < 4; ++c4) {
                c.labels[r * 4 + c4] = (axis_gray[c4] << 2) | axis_gray[r];
            }
        }
    } else {
        // remaining two bits index the 4 points of each sub-lattice row-major
        for (unsigned g = 0; g < 4; ++g) {
            for (unsigned idx = 0; idx < groups[g].flat.size(); ++idx) {
                c.labels[groups[g].flat[idx]] = (g << 2) | idx;
            }
        }
    }
    return c;
}

} // namespace

Constellation make_constellation(Scheme scheme, LabelingRule labeling) {
    switch (scheme) {
        case Scheme::Qpsk: return qpsk(labeling);
        case Scheme::Psk8: return psk8(labeling);
        case Scheme::Qam16: return qam16(labeling);
    }
    throw std::logic_error("make_constellation: unknown scheme");
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "qpsk") return Scheme::Qpsk;
    if (s == "8psk" || s == "psk8") return Scheme::Psk8;
    if (s == "16qam" || s == "qam16") return Scheme::Qam16;
    throw std::invalid_argument("unknown scheme: " + s);
}

LabelingRule labeling_from_string(const std::string& s) {
    if (s == "gray") return LabelingRule::Gray;
    if (s == "sp" || s == "set_partitioning" || s == "set-partitioning") {
        return LabelingRule::SetPartitioning;
    }
    throw std::invalid_argument("unknown labeling: " + s);
}

BitChannel bicm_bit_channel(const Constellation& c, int level, const FadingModel& fading) {
    if (level < 1 || level > c.m) throw std::invalid_argument("bicm_bit_channel: bad level");
    std::vector<cplx> set1, set0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        (c.level_bit(i, level) ? set1 : set0).push_back(c.points[i]);
    }
    const double sigma_c_sq = std::pow(10.0, -fading.snr_db / 10.0); // complex noise variance
    const bool rayleigh = fading.kind == Fading::RayleighCsi;

    auto sampler = [set1, set0, sigma_c_sq, rayleigh](int x, Rng& rng) {
        const auto& own = (x > 0) ? set1 : set0; // label bit 1 corresponds to +1
        std::uniform_int_distribution<std::size_t> pick(0, own.size() - 1);
        const cplx s = own[pick(rng)];
        cplx h{1.0, 0.0};
        if (rayleigh) {
            std::normal_distribution<double> half(0.0, std::sqrt(0.5));
            h = cplx(half(rng), half(rng));
        }
        std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * sigma_c_sq));
        const cplx y = h * s + cplx(noise(rng), noise(rng));

        // log-sum-exp of -|y - h s'|^2 / sigma_c_sq over each subset, max-subtracted
        auto lse = [&](const std::vector<cplx>& set) {
            double mx = -std::numeric_limits<double>::infinity();
            std::vector<double> e(set.size());
            for (std::size_t i = 0; i < set.size(); ++i) {
                e[i] = -std::norm(y - h * set[i]) / sigma_c_sq;
                mx = std::max(mx, e[i]);
            }
            double acc = 0.0;
            for (double v : e) acc += std::exp(v - mx);
            return mx + std::log(acc);
        };
        return lse(set1) - lse(set0);
    };
    return BitChannel(ChannelKind::BicmBit, sampler);
}

BicmRateResult bicm_rate(const Constellation& c, const FadingModel& fading, RateMetric which,
                         const RateConfig& cfg) {
    BicmRateResult out;
    out.per_level.resize(c.m);
    out.per_level_std_error.resize(c.m);
    for (int level = 1; level <= c.m; ++level) {
        RateConfig level_cfg = cfg;
        level_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(level));
        const BitChannel ch = bicm_bit_channel(c, level, fading);
        double rate = 0.0, se = 0.0;
        switch (which) {
            case RateMetric::Orbgrand: {
                const GmiResult r = orbgrand_gmi(ch, level_cfg);
                rate = r.rate;
                se = r.mc_std_error;
                out.any_bracket_edge |= r.bracket_edge;
                break;
            }
            case RateMetric::Sgrand: {
                const GmiResult r = sgrand_gmi(ch, level_cfg);
                rate = r.rate;
                se = r.mc_std_error;
                out.any_bracket_edge |= r.bracket_edge;
                break;
            }
            case RateMetric::Mi: {
                const Estimate e = mutual_information_estimate(ch, level_cfg.samples, level_cfg.seed);
                rate = e.value;
                se = e.std_error;
                break;
            }
        }
        out.per_level[level - 1] = rate;
        out.per_level_std_error[level - 1] = se;
        out.total += rate;
        out.std_error = std::hypot(out.std_error, se);
    }
    return out;
}

} // namespace grandrate
