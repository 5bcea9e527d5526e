#pragma once

// Special functions backing the Gamma and Student-t distributions.

namespace dapien::special {

double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double ndf);
double student_t_pdf(double t, double ndf);

}  // namespace dapien::special
