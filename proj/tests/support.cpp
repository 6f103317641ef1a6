#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace testsupport {

static favar::Vector ranks(const favar::Vector& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return v(a) < v(b); });
  favar::Vector r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v(idx[j + 1]) == v(idx[i])) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) r(idx[k]) = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const favar::Vector& a, const favar::Vector& b) {
  const double ma = a.mean(), mb = b.mean();
  const favar::Vector ca = a.array() - ma, cb = b.array() - mb;
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

double spearman(const favar::Vector& a, const favar::Vector& b) {
  return pearson(ranks(a), ranks(b));
}

}  // namespace testsupport
