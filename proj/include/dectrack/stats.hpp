#pragma once

#include <span>

namespace dectrack {

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);

// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// Upper-tail p-value of the Student t distribution with df degrees of freedom.
double student_t_sf(double t, double df);

// One-sided paired t-test p-value for H1: mean(diffs) > 0.
double paired_t_pvalue_greater(std::span<const double> diffs);

} // namespace dectrack
