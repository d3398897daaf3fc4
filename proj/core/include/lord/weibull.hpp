#pragma once

#include <span>

#include "lord/error.hpp"

namespace lord {

struct WeibullParams {
    double shape = 1.0;  // kappa
    double scale = 1.0;  // lambda
};

// Maximum-likelihood fit of a two-parameter Weibull. The shape solves the
// one-dimensional profile-likelihood equation (bracketed bisection with
// Newton refinement); the scale then follows in closed form. Requires at
// least two strictly positive, not-all-equal samples.
WeibullParams weibull_fit_mle(std::span<const double> samples);

double weibull_log_likelihood(std::span<const double> samples, const WeibullParams& params);

// exp(-(d/scale)^shape): probability that distance d still belongs to the
// fitted extreme-value regime. Monotone non-increasing, 1 at d = 0;
// underflow far in the tail flushes to exactly 0.
double weibull_inclusion(double d, const WeibullParams& params);

// 1 - inclusion; distribution function of the fitted Weibull.
double weibull_cdf(double x, const WeibullParams& params);

}  // namespace lord
