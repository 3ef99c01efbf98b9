#ifndef GRANDRATE_STATS_HPP
#define GRANDRATE_STATS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace grandrate {

// Welford accumulator for mean / variance / standard error.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_dev() const { return std::sqrt(variance()); }
    double std_error() const {
        return n_ > 1 ? std_dev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// One-sample Kolmogorov-Smirnov statistic against Uniform[0,1].
// Sorts a copy of the sample internally.
double ks_statistic_uniform(std::vector<double> sample);

// Critical KS statistic at significance alpha for sample size n
// (asymptotic Kolmogorov distribution, inverted numerically).
double ks_critical_value(double alpha, std::size_t n);

} // namespace grandrate

#endif
