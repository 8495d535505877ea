#pragma once

#include <cstddef>

namespace clap::stats {

// Regularized lower incomplete gamma P(a, x); series for x < a+1,
// continued fraction otherwise.
double gamma_p(double a, double x);
// Upper tail Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// P(X >= x2) for a chi-square variate with df degrees of freedom.
double chi_square_tail(double x2, int df);

// Critical value: smallest x with chi_square_tail(x, df) <= alpha,
// found by bisection.
double chi_square_critical(double alpha, int df);

}  // namespace clap::stats
