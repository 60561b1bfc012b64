#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "entry.h"
#include "laser/status.h"

namespace laser {

// Data block for one column group. Keys are delta-encoded against the
// previous entry, with a full key at every restart point.
//
// entry   := key-varint tag:u8 seq-varint [bitmap] value:8*n
// trailer := restart:u32* num_restarts:u32 num_entries:u32
class BlockBuilder {
 public:
  static constexpr int kRestartInterval = 16;

  explicit BlockBuilder(const ColumnSet& group);
  void Add(const EntryView& e);
  // Encoded size if `e` were added next.
  size_t SizeWith(const EntryView& e) const;
  size_t CurrentSize() const { return buf_.size() + 4 * restarts_.size() + 8; }
  int count() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::string Finish();

 private:
  ColumnSet group_;
  int group_size_;
  std::vector<ColumnId> group_cols_;
  std::string buf_;
  std::vector<uint32_t> restarts_;
  int count_ = 0;
  Key last_key_ = 0;
};

struct DecodedBlock {
  std::vector<Key> keys;
  std::vector<SeqNo> seqs;
  std::vector<EntryKind> kinds;
  std::vector<ColumnSet> present;
  std::vector<uint32_t> value_off;
  std::vector<Value> values;

  size_t size() const { return keys.size(); }
  EntryView at(size_t i) const {
    return {keys[i], seqs[i], kinds[i], present[i], values.data() + value_off[i]};
  }
  // First entry with key >= k.
  size_t LowerBound(Key k) const;
  void Clear();
};

Status DecodeBlock(std::string_view contents, const ColumnSet& group, DecodedBlock* out);

}  // namespace laser
