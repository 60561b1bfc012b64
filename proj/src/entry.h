#pragma once

#include <climits>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "laser/types.h"

namespace laser {

// kPut speaks for every column of its scope (absent columns read as
// deleted); kPartial only for the columns it carries; kTombstone deletes
// its whole scope.
enum class EntryKind : uint8_t { kPut = 0, kPartial = 1, kTombstone = 2 };

// Values are listed in ascending column order of `present`.
struct EntryView {
  Key key = 0;
  SeqNo seq = 0;
  EntryKind kind = EntryKind::kPut;
  ColumnSet present;
  const Value* values = nullptr;
};

struct OwnedEntry {
  Key key = 0;
  SeqNo seq = 0;
  EntryKind kind = EntryKind::kPut;
  ColumnSet present;
  std::vector<Value> values;

  OwnedEntry() = default;
  explicit OwnedEntry(const EntryView& v)
      : key(v.key), seq(v.seq), kind(v.kind), present(v.present),
        values(v.values, v.values + v.present.Size()) {}
  EntryView view() const { return {key, seq, kind, present, values.data()}; }
  bool operator==(const OwnedEntry&) const = default;
};

// Resolves per-column state for one key from entries applied newest first.
class RowMerger {
 public:
  static constexpr int kNoLevel = INT_MIN;

  void Reset(const ColumnSet& wanted) {
    wanted_ = wanted;
    unresolved_ = wanted;
    values_ = ColumnSet();
    deleted_ = ColumnSet();
    first_value_level_ = kNoLevel;
    applied_ = 0;
  }

  // `scope` is the set of columns the entry's writer spoke for: the full
  // row for memtable and level-0 entries, the group for level >= 1 runs.
  void Apply(const EntryView& e, const ColumnSet& scope, int level);

  bool Done() const { return unresolved_.Empty(); }
  const ColumnSet& wanted() const { return wanted_; }
  const ColumnSet& unresolved() const { return unresolved_; }
  const ColumnSet& values() const { return values_; }
  const ColumnSet& deleted() const { return deleted_; }
  Value value(ColumnId c) const { return vals_[c]; }
  SeqNo seq(ColumnId c) const { return seqs_[c]; }
  int first_value_level() const { return first_value_level_; }
  int applied() const { return applied_; }

 private:
  ColumnSet wanted_, unresolved_, values_, deleted_;
  int first_value_level_ = kNoLevel;
  int applied_ = 0;
  Value vals_[kMaxColumns + 1];
  SeqNo seqs_[kMaxColumns + 1];
};

// WAL payload for one entry.
void EncodeEntry(const EntryView& e, std::string* dst);
bool DecodeEntry(std::string_view* in, OwnedEntry* out);

}  // namespace laser
