#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace harmform {

// Indexing of strictly increasing index tuples (the coordinate basis of
// alternating k-tensors).  Tuples over {0..n-1} are ranked colexicographically:
// rank(i_1 < ... < i_k) = C(i_1,1) + C(i_2,2) + ... + C(i_k,k).
class Combinadic {
 public:
  Combinadic(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  int count() const { return count_; }  // C(n,k)

  int rank(const int* tuple) const;
  void unrank(int r, int* tuple) const;
  const std::vector<int>& tuple(int r) const { return tuples_[r]; }

  static std::int64_t binomial(int n, int k);

 private:
  int n_, k_, count_;
  std::vector<std::vector<int>> tuples_;  // precomputed, indexed by rank
};

// Sign of sorting a small tuple into increasing order; 0 if entries repeat.
// Writes the sorted tuple into `sorted`.
int sort_sign(const int* tuple, int k, int* sorted);

// Sign of inserting `v` into the increasing tuple `rest` (length k-1);
// 0 if v already occurs.  The merged tuple is written to `merged` (length k).
int insert_sign(int v, const int* rest, int k_minus_1, int* merged);

}  // namespace harmform
