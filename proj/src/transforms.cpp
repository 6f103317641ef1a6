#include "favar/transforms.hpp"

#include <cmath>

namespace favar {

int transform_lag(int code) {
  switch (code) {
    case 1:
      return 0;
    case 5:
    case 7:
      return 1;
    case 50:
      return 4;
    default:
      throw UnknownCode("transform code " + std::to_string(code));
  }
}

static void require_positive(const Vector& raw, int code) {
  for (int t = 0; t < raw.size(); ++t) {
    if (!(raw(t) > 0.0)) {
      throw NonPositiveForLog("transform code " + std::to_string(code) +
                              " needs strictly positive data, got " +
                              std::to_string(raw(t)) + " at row " +
                              std::to_string(t));
    }
  }
}

Vector apply_transform(const Vector& raw, int code) {
  const int lag = transform_lag(code);
  const int T = static_cast<int>(raw.size());
  if (T <= lag) {
    throw SeriesTooShort("series of length " + std::to_string(T) +
                         " too short for transform code " +
                         std::to_string(code));
  }
  check_finite(raw, "transform input");
  Vector out(T - lag);
  switch (code) {
    case 1:
      out = raw;
      break;
    case 5:
      require_positive(raw, code);
      for (int t = 1; t < T; ++t) {
        out(t - 1) = std::log(raw(t)) - std::log(raw(t - 1));
      }
      break;
    case 7:
      for (int t = 1; t < T; ++t) {
        out(t - 1) = raw(t) / raw(t - 1) - 1.0;
      }
      check_finite(out, "transform code 7 output");
      break;
    case 50:
      require_positive(raw, code);
      for (int t = 4; t < T; ++t) {
        out(t - 4) = std::log(raw(t)) - std::log(raw(t - 4));
      }
      break;
    default:
      throw UnknownCode("transform code " + std::to_string(code));
  }
  return out;
}

}  // namespace favar
