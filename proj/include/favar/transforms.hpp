#pragma once

#include "favar/linalg.hpp"

namespace favar {

// Stationarity transforms keyed by the quarterly panel's numeric codes:
//   1  level (identity)
//   5  first difference of logs
//   7  one-quarter growth rate x_t/x_{t-1} - 1
//   50 four-quarter (year-over-year) log difference
// Output is shortened at the front by transform_lag(code) observations.
Vector apply_transform(const Vector& raw, int code);

// Leading observations consumed by the code: 0, 1, 1, 4.
int transform_lag(int code);

}  // namespace favar
