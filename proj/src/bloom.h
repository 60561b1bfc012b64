#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "laser/types.h"

namespace laser {

// Standard bloom filter with double hashing. Layout: [bit array][k].
class BloomBuilder {
 public:
  explicit BloomBuilder(int bits_per_key) : bits_per_key_(bits_per_key) {}
  void AddKey(Key key) { hashes_.push_back(key); }
  size_t num_keys() const { return hashes_.size(); }
  std::string Finish();

 private:
  int bits_per_key_;
  std::vector<Key> hashes_;
};

bool BloomMayContain(std::string_view filter, Key key);

}  // namespace laser
