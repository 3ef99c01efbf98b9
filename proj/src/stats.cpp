#include "grandrate/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace grandrate {

double ks_statistic_uniform(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic_uniform: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double u = sample[i];
        const double hi = static_cast<double>(i + 1) / n - u;
        const double lo = u - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

namespace {

// P(K <= x) for the Kolmogorov distribution.
double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return 1.0 - 2.0 * s;
}

} // namespace

double ks_critical_value(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("ks_critical_value: alpha must be in (0,1)");
    }
    if (n == 0) throw std::invalid_argument("ks_critical_value: n must be positive");
    // invert the cdf by bisection
    double lo = 1e-3, hi = 4.0;
    const double target = 1.0 - alpha;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

} // namespace grandrate
