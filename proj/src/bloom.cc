#include "bloom.h"

#include <algorithm>
#include <cmath>

#include "util/hash.h"

namespace laser {

std::string BloomBuilder::Finish() {
  int k = static_cast<int>(std::lround(bits_per_key_ * 0.69));
  k = std::clamp(k, 1, 30);
  size_t bits = std::max<size_t>(64, hashes_.size() * bits_per_key_);
  size_t bytes = (bits + 7) / 8;
  bits = bytes * 8;
  std::string out(bytes, '\0');
  for (Key key : hashes_) {
    uint64_t h = Hash64(key);
    uint32_t a = static_cast<uint32_t>(h);
    uint32_t delta = static_cast<uint32_t>(h >> 32) | 1;
    for (int j = 0; j < k; j++) {
      size_t bit = a % bits;
      out[bit / 8] |= static_cast<char>(1 << (bit % 8));
      a += delta;
    }
  }
  out.push_back(static_cast<char>(k));
  hashes_.clear();
  return out;
}

bool BloomMayContain(std::string_view filter, Key key) {
  if (filter.size() < 2) return true;
  int k = static_cast<unsigned char>(filter.back());
  if (k < 1 || k > 30) return true;
  size_t bits = (filter.size() - 1) * 8;
  uint64_t h = Hash64(key);
  uint32_t a = static_cast<uint32_t>(h);
  uint32_t delta = static_cast<uint32_t>(h >> 32) | 1;
  for (int j = 0; j < k; j++) {
    size_t bit = a % bits;
    if ((filter[bit / 8] & (1 << (bit % 8))) == 0) return false;
    a += delta;
  }
  return true;
}

}  // namespace laser
