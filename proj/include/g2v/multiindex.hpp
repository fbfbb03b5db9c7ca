#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace g2v {

using Index = std::vector<uint8_t>;  // strictly increasing multi-index

inline long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sorts idx in place; returns permutation sign, or 0 if an index repeats.
inline int sort_sign(Index& idx) {
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i) {
    size_t j = i;
    while (j > 0 && idx[j - 1] >= idx[j]) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
      --j;
    }
  }
  return sign;
}

// Concatenation sign of two sorted disjoint multi-indices, 0 on collision.
inline int merge_sign(const Index& a, const Index& b, Index& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] hops over the remaining entries of a
      if ((a.size() - i) % 2) sign = -sign;
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return sign;
}

// Lexicographic rank of a sorted multi-index among k-subsets of {0..n-1}.
inline long index_rank(int n, const Index& idx) {
  long r = 0;
  int prev = -1;
  int k = static_cast<int>(idx.size());
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < idx[i]; ++v) r += binom(n - 1 - v, k - 1 - i);
    prev = idx[i];
  }
  return r;
}

inline Index index_unrank(int n, int k, long r) {
  Index idx;
  idx.reserve(k);
  int v = 0;
  for (int i = 0; i < k; ++i) {
    for (;; ++v) {
      long c = binom(n - 1 - v, k - 1 - i);
      if (r < c) {
        idx.push_back(static_cast<uint8_t>(v++));
        break;
      }
      r -= c;
    }
  }
  return idx;
}

// Complement of idx in {0..n-1} together with the sign of (idx, complement).
inline int complement_sign(int n, const Index& idx, Index& comp) {
  comp.clear();
  size_t j = 0;
  for (int v = 0; v < n; ++v) {
    if (j < idx.size() && idx[j] == v)
      ++j;
    else
      comp.push_back(static_cast<uint8_t>(v));
  }
  // sign of permutation (idx, comp) relative to (0..n-1):
  // count inversions between blocks; within blocks both are sorted.
  long inv = 0;
  for (uint8_t a : idx) {
    for (uint8_t b : comp)
      if (b < a) ++inv;
  }
  return inv % 2 ? -1 : 1;
}

}  // namespace g2v
