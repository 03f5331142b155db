#ifndef SBMEST_STATS_HPP
#define SBMEST_STATS_HPP

#include <vector>

namespace sbmest {

double mean(const std::vector<double>& xs);
/// Unbiased sample variance (n-1 denominator).
double variance(const std::vector<double>& xs);
double median(std::vector<double> xs);  // by value: sorts a copy

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov distance between the sample and N(mu, sigma^2).
double ks_distance_to_normal(std::vector<double> xs, double mu, double sigma);

/// KS distance after studentizing by the sample mean and standard deviation.
double ks_distance_studentized(const std::vector<double>& xs);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sbmest

#endif
