#include "harmform/combinatorics.hpp"

#include <stdexcept>

namespace harmform {

std::int64_t Combinadic::binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Combinadic::Combinadic(int n, int k) : n_(n), k_(k) {
  if (k < 0 || k > n) throw std::invalid_argument("Combinadic: need 0 <= k <= n");
  count_ = static_cast<int>(binomial(n, k));
  tuples_.reserve(count_);
  std::vector<int> t(k);
  for (int i = 0; i < k; ++i) t[i] = i;
  for (int r = 0; r < count_; ++r) {
    tuples_.push_back(t);
    // next increasing tuple in colex order
    int j = 0;
    while (j + 1 < k && t[j] + 1 == t[j + 1]) {
      t[j] = j;
      ++j;
    }
    if (k > 0) ++t[j];
  }
}

int Combinadic::rank(const int* tuple) const {
  std::int64_t r = 0;
  for (int j = 0; j < k_; ++j) r += binomial(tuple[j], j + 1);
  return static_cast<int>(r);
}

void Combinadic::unrank(int r, int* tuple) const {
  const std::vector<int>& t = tuples_[r];
  for (int j = 0; j < k_; ++j) tuple[j] = t[j];
}

int sort_sign(const int* tuple, int k, int* sorted) {
  for (int i = 0; i < k; ++i) sorted[i] = tuple[i];
  int sign = 1;
  for (int i = 1; i < k; ++i) {
    int v = sorted[i];
    int j = i;
    while (j > 0 && sorted[j - 1] > v) {
      sorted[j] = sorted[j - 1];
      --j;
      sign = -sign;
    }
    sorted[j] = v;
  }
  for (int i = 0; i + 1 < k; ++i)
    if (sorted[i] == sorted[i + 1]) return 0;
  return sign;
}

int insert_sign(int v, const int* rest, int k_minus_1, int* merged) {
  int pos = 0;
  while (pos < k_minus_1 && rest[pos] < v) ++pos;
  if (pos < k_minus_1 && rest[pos] == v) return 0;
  for (int i = 0; i < pos; ++i) merged[i] = rest[i];
  merged[pos] = v;
  for (int i = pos; i < k_minus_1; ++i) merged[i + 1] = rest[i];
  return (pos % 2 == 0) ? 1 : -1;
}

}  // namespace harmform
