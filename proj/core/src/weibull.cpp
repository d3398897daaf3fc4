#include "lord/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lord {

namespace {

constexpr double kShapeTol = 1e-10;
constexpr int kMaxIter = 200;

struct ProfileEval {
    double f;       // profile-likelihood shape equation
    double df;      // its derivative, strictly positive
    double pow_sum; // (1/n) * sum z_i^kappa
};

// Shape equation on samples normalized by their maximum (the equation is
// scale-invariant, the normalization only guards pow() overflow):
//   f(k) = sum z^k ln z / sum z^k - 1/k - mean(ln z)
ProfileEval eval_profile(const std::vector<double>& z, const std::vector<double>& log_z, double mean_log, double kappa) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double w = std::exp(kappa * log_z[i]);
        s0 += w;
        s1 += w * log_z[i];
        s2 += w * log_z[i] * log_z[i];
    }
    ProfileEval out;
    const double a = s1 / s0;
    out.f = a - 1.0 / kappa - mean_log;
    out.df = (s2 / s0 - a * a) + 1.0 / (kappa * kappa);
    out.pow_sum = s0 / static_cast<double>(z.size());
    return out;
}

}  // namespace

WeibullParams weibull_fit_mle(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InvalidArgument("weibull_fit_mle: need at least two samples");
    double max_x = 0.0;
    for (double x : samples) {
        if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("weibull_fit_mle: samples must be finite and positive");
        max_x = std::max(max_x, x);
    }
    const bool all_equal = std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples[0]; });
    if (all_equal) throw NumericError("weibull_fit_mle: degenerate sample set (all values equal)");

    std::vector<double> z(n), log_z(n);
    double mean_log = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = samples[i] / max_x;
        log_z[i] = std::log(z[i]);
        mean_log += log_z[i];
    }
    mean_log /= static_cast<double>(n);

    // Moment-of-logs starting point: var(ln x) = pi^2 / (6 k^2).
    double var_log = 0.0;
    for (double lz : log_z) var_log += (lz - mean_log) * (lz - mean_log);
    var_log /= static_cast<double>(n);
    double kappa = 3.141592653589793 / std::sqrt(6.0 * var_log);
    if (!std::isfinite(kappa) || kappa <= 0.0) kappa = 1.0;

    // Bracket a sign change around the starting point; f is increasing in k.
    double lo = kappa, hi = kappa;
    ProfileEval at_lo = eval_profile(z, log_z, mean_log, lo);
    ProfileEval at_hi = at_lo;
    int guard = 0;
    while (at_lo.f > 0.0) {
        lo *= 0.5;
        at_lo = eval_profile(z, log_z, mean_log, lo);
        if (++guard > 200) throw NumericError("weibull_fit_mle: failed to bracket the shape equation from below");
    }
    guard = 0;
    while (at_hi.f < 0.0) {
        hi *= 2.0;
        at_hi = eval_profile(z, log_z, mean_log, hi);
        if (++guard > 200) throw NumericError("weibull_fit_mle: failed to bracket the shape equation from above");
    }

    kappa = 0.5 * (lo + hi);
    ProfileEval cur = eval_profile(z, log_z, mean_log, kappa);
    bool converged = std::fabs(cur.f) <= kShapeTol;
    for (int it = 0; it < kMaxIter && !converged; ++it) {
        double next = kappa - cur.f / cur.df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket; bisect
        kappa = next;
        cur = eval_profile(z, log_z, mean_log, kappa);
        if (cur.f > 0.0)
            hi = kappa;
        else
            lo = kappa;
        converged = std::fabs(cur.f) <= kShapeTol;
    }
    if (!converged) throw NumericError("weibull_fit_mle: shape equation did not converge within " +
                                       std::to_string(kMaxIter) + " iterations");

    WeibullParams params;
    params.shape = kappa;
    params.scale = max_x * std::pow(cur.pow_sum, 1.0 / kappa);
    return params;
}

double weibull_log_likelihood(std::span<const double> samples, const WeibullParams& params) {
    if (!(params.shape > 0.0) || !(params.scale > 0.0))
        throw InvalidArgument("weibull_log_likelihood: parameters must be positive");
    const double k = params.shape, lam = params.scale;
    double ll = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw InvalidArgument("weibull_log_likelihood: samples must be positive");
        ll += std::log(k) - k * std::log(lam) + (k - 1.0) * std::log(x) - std::pow(x / lam, k);
    }
    return ll;
}

double weibull_inclusion(double d, const WeibullParams& params) {
    if (d < 0.0) throw InvalidArgument("weibull_inclusion: distance must be non-negative");
    if (!(params.shape > 0.0) || !(params.scale > 0.0))
        throw InvalidArgument("weibull_inclusion: parameters must be positive");
    return std::exp(-std::pow(d / params.scale, params.shape));
}

double weibull_cdf(double x, const WeibullParams& params) {
    return 1.0 - weibull_inclusion(x, params);
}

}  // namespace lord
