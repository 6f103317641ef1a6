#pragma once

#include <array>

namespace favar::var {

// Seven-component normal mixture approximating the distribution of
// log(eps^2) for standard normal eps. `m` is the raw component mean; the
// sampler shifts it by -1.2704 (the mean of log chi-squared with one degree
// of freedom) when building observation equations.
struct KscComponent {
  double q;   // weight
  double m;   // raw mean
  double v2;  // variance
};

inline constexpr std::array<KscComponent, 7> kKscMixture = {{
    {0.00730, -10.12999, 5.79596},
    {0.10556, -3.97281, 2.61369},
    {0.00002, -8.56686, 5.17950},
    {0.04395, 2.77786, 0.16735},
    {0.34001, 0.61942, 0.64009},
    {0.24566, 1.79518, 0.34023},
    {0.25750, -1.08819, 1.26261},
}};

constexpr double kLogChi2Mean = -1.2704;

inline double ksc_mean(int j) { return kKscMixture[j].m + kLogChi2Mean; }

}  // namespace favar::var
