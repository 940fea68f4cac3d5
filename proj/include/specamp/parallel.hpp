#pragma once

#include <functional>
#include <span>
#include <vector>

namespace specamp {

// Worker count resolution: explicit request > SPECAMP_WORKERS > hardware.
int default_workers();
int resolve_workers(int requested);

// Runs fn(i) for i in [0, n) on a static partition across `workers` threads.
// Each index is processed exactly once; callers store results by index, so
// the outcome does not depend on the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Fixed-shape pairwise summation tree; identical result for identical input
// order regardless of how the inputs were produced.
double pairwise_sum(std::span<const double> values);

// log(sum(exp(v)))  via max-shift + pairwise sum.
double logsumexp(std::span<const double> values);

}  // namespace specamp
