#pragma once

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sfflab/estimation.hpp"

namespace sfflab::testing {

/// |estimate - target| <= k standard errors.
inline ::testing::AssertionResult WithinSe(const EstimateWithError& e, double target, double k = 4.0) {
  const double dev = std::abs(e.value - target);
  if (dev <= k * e.std_err) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << e.value << " +- " << e.std_err << " is " << dev / e.std_err
                                       << " SE from " << target;
}

template <typename Fn>
EstimateWithError sample_mean(std::size_t count, Fn&& fn) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = fn(i);
  return mean_with_error(v);
}

}  // namespace sfflab::testing
