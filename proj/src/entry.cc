#include "entry.h"

#include "util/coding.h"

namespace laser {

void RowMerger::Apply(const EntryView& e, const ColumnSet& scope, int level) {
  if (!unresolved_.Intersects(scope)) return;
  applied_++;
  ColumnSet got;
  if (e.kind != EntryKind::kTombstone) {
    got = e.present & unresolved_;
    if (!got.Empty()) {
      int k = 0;
      e.present.ForEach([&](ColumnId c) {
        if (got.Contains(c)) {
          vals_[c] = e.values[k];
          seqs_[c] = e.seq;
        }
        k++;
      });
      values_ |= got;
      if (first_value_level_ == kNoLevel) first_value_level_ = level;
    }
  }
  if (e.kind == EntryKind::kPartial) {
    unresolved_ -= got;
    return;
  }
  ColumnSet del = (scope & unresolved_) - got;
  del.ForEach([&](ColumnId c) { seqs_[c] = e.seq; });
  deleted_ |= del;
  unresolved_ -= scope;
}

namespace {
void PutColumnSet(std::string* dst, const ColumnSet& s) {
  PutVarint64(dst, s.lo());
  PutVarint64(dst, s.hi());
}
}  // namespace

void EncodeEntry(const EntryView& e, std::string* dst) {
  dst->push_back(static_cast<char>(e.kind));
  PutVarint64(dst, e.seq);
  PutFixed64(dst, e.key);
  if (e.kind == EntryKind::kTombstone) return;
  PutColumnSet(dst, e.present);
  int n = e.present.Size();
  for (int i = 0; i < n; i++) PutFixed64(dst, static_cast<uint64_t>(e.values[i]));
}

bool DecodeEntry(std::string_view* in, OwnedEntry* out) {
  if (in->empty()) return false;
  uint8_t kind = static_cast<uint8_t>((*in)[0]);
  if (kind > 2) return false;
  in->remove_prefix(1);
  out->kind = static_cast<EntryKind>(kind);
  if (!GetVarint64(in, &out->seq) || !GetFixed64(in, &out->key)) return false;
  out->present = ColumnSet();
  out->values.clear();
  if (out->kind == EntryKind::kTombstone) return true;
  uint64_t lo, hi;
  if (!GetVarint64(in, &lo) || !GetVarint64(in, &hi)) return false;
  out->present = ColumnSet(lo, hi);
  int n = out->present.Size();
  if (n == 0 && out->kind == EntryKind::kPartial) return false;
  out->values.resize(n);
  for (int i = 0; i < n; i++) {
    uint64_t v;
    if (!GetFixed64(in, &v)) return false;
    out->values[i] = static_cast<Value>(v);
  }
  return true;
}

}  // namespace laser
