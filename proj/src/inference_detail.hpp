#pragma once

#include <vector>

#include "gppl/inference.hpp"

namespace gppl::detail {

void check_problem(const GaussianPrior& prior, const Vector& y,
                   const LikelihoodModel& like);
void check_options(const InferenceOptions& opts);
std::vector<long> visiting_order(const InferenceOptions& opts, long n);

// Adds (dtau, dnu) to site i of the belief in O(n^2).
void rank_one_update(GaussianBelief& b, long i, double dtau, double dnu);

}  // namespace gppl::detail
