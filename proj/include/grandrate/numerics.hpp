#ifndef GRANDRATE_NUMERICS_HPP
#define GRANDRATE_NUMERICS_HPP

#include <cmath>
#include <functional>

namespace grandrate {

// ln(1 + e^u), stable for any u.
inline double log1p_exp(double u) {
    if (u <= 0.0) return std::log1p(std::exp(u));
    return u + std::log1p(std::exp(-u));
}

// Standard normal cdf / pdf.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Adaptive Simpson quadrature with an absolute error target.
// Intended for smooth 1-D integrands; recursion depth is capped so a
// pathological integrand degrades accuracy instead of overflowing the stack.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 52);

struct MinimizeResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

// Golden-section minimization of a unimodal function on [lo, hi].
// Stops when the bracket width falls below rel_tol * max(1, |midpoint|).
MinimizeResult golden_section_min(const std::function<double(double)>& f, double lo,
                                  double hi, double rel_tol = 1e-8, int max_iter = 200);

} // namespace grandrate

#endif
