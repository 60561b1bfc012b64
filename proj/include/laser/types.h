#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace laser {

using Key = uint64_t;
using SeqNo = uint64_t;
using Value = int64_t;
using ColumnId = int;  // 1..c

inline constexpr int kMaxColumns = 128;

// Set of column ids in [1, kMaxColumns]. Iteration is ascending.
class ColumnSet {
 public:
  constexpr ColumnSet() = default;
  constexpr ColumnSet(uint64_t lo, uint64_t hi) : w_{lo, hi} {}

  static ColumnSet Range(ColumnId first, ColumnId last);
  static ColumnSet Of(std::initializer_list<ColumnId> ids);
  static ColumnSet FromVector(const std::vector<ColumnId>& ids);

  void Add(ColumnId id) { w_[(id - 1) >> 6] |= Bit(id); }
  void Remove(ColumnId id) { w_[(id - 1) >> 6] &= ~Bit(id); }
  bool Contains(ColumnId id) const {
    return id >= 1 && id <= kMaxColumns && (w_[(id - 1) >> 6] & Bit(id)) != 0;
  }

  int Size() const { return std::popcount(w_[0]) + std::popcount(w_[1]); }
  bool Empty() const { return (w_[0] | w_[1]) == 0; }
  bool Intersects(const ColumnSet& o) const {
    return ((w_[0] & o.w_[0]) | (w_[1] & o.w_[1])) != 0;
  }
  bool IsSubsetOf(const ColumnSet& o) const {
    return (w_[0] & ~o.w_[0]) == 0 && (w_[1] & ~o.w_[1]) == 0;
  }

  // Smallest member, 0 when empty.
  ColumnId First() const {
    if (w_[0]) return std::countr_zero(w_[0]) + 1;
    if (w_[1]) return std::countr_zero(w_[1]) + 65;
    return 0;
  }
  // Number of members smaller than id.
  int RankOf(ColumnId id) const {
    int b = id - 1;
    if (b < 64) return std::popcount(w_[0] & ((uint64_t{1} << b) - 1));
    return std::popcount(w_[0]) +
           std::popcount(w_[1] & ((uint64_t{1} << (b - 64)) - 1));
  }

  template <typename F>
  void ForEach(F&& f) const {
    for (int i = 0; i < 2; i++) {
      uint64_t x = w_[i];
      while (x) {
        int b = std::countr_zero(x);
        f(ColumnId(i * 64 + b + 1));
        x &= x - 1;
      }
    }
  }

  std::vector<ColumnId> ToVector() const;
  // "1-3,5"; empty set prints as "".
  std::string ToString() const;
  static bool Parse(std::string_view text, ColumnSet* out);

  uint64_t lo() const { return w_[0]; }
  uint64_t hi() const { return w_[1]; }

  ColumnSet operator&(const ColumnSet& o) const {
    return ColumnSet(w_[0] & o.w_[0], w_[1] & o.w_[1]);
  }
  ColumnSet operator|(const ColumnSet& o) const {
    return ColumnSet(w_[0] | o.w_[0], w_[1] | o.w_[1]);
  }
  ColumnSet operator-(const ColumnSet& o) const {
    return ColumnSet(w_[0] & ~o.w_[0], w_[1] & ~o.w_[1]);
  }
  ColumnSet& operator&=(const ColumnSet& o) { return *this = *this & o; }
  ColumnSet& operator|=(const ColumnSet& o) { return *this = *this | o; }
  ColumnSet& operator-=(const ColumnSet& o) { return *this = *this - o; }
  bool operator==(const ColumnSet& o) const = default;

  // Lexicographic order over the ascending member lists.
  static bool LexLess(const ColumnSet& a, const ColumnSet& b);

 private:
  static constexpr uint64_t Bit(ColumnId id) {
    return uint64_t{1} << ((id - 1) & 63);
  }
  uint64_t w_[2] = {0, 0};
};

struct ColumnSetHash {
  size_t operator()(const ColumnSet& s) const {
    uint64_t h = s.lo() * 0x9E3779B97F4A7C15ull ^ (s.hi() + 0x632BE59BD9B4E019ull);
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ull;
    return size_t(h ^ (h >> 29));
  }
};

}  // namespace laser
