#pragma once

#include <cstddef>
#include <span>

namespace prnu {

double mean(std::span<const double> xs);

/// Unbiased (n-1) sample standard deviation.
double sample_sd(std::span<const double> xs);

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 over (0, 1)).
double normal_quantile(double p);

/// Mann-Whitney AUC of scores, positives vs negatives, ties counted half.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

} // namespace prnu
