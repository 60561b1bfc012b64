#include "block.h"

#include <algorithm>

#include "util/coding.h"

namespace laser {

namespace {
enum Tag : uint8_t { kTagPutFull = 0, kTagPutSparse = 1, kTagPartial = 2, kTagTombstone = 3 };
}

BlockBuilder::BlockBuilder(const ColumnSet& group)
    : group_(group), group_size_(group.Size()), group_cols_(group.ToVector()) {}

size_t BlockBuilder::SizeWith(const EntryView& e) const {
  size_t n = buf_.size();
  bool restart = count_ % kRestartInterval == 0;
  n += VarintLength(restart ? e.key : e.key - last_key_);
  n += 1 + VarintLength(e.seq);
  if (e.kind != EntryKind::kTombstone) {
    int nv = e.present.Size();
    if (e.kind == EntryKind::kPartial || nv != group_size_) n += (group_size_ + 7) / 8;
    n += 8 * nv;
  }
  size_t restarts = restarts_.size() + (restart ? 1 : 0);
  return n + 4 * restarts + 8;
}

void BlockBuilder::Add(const EntryView& e) {
  if (count_ % kRestartInterval == 0) {
    restarts_.push_back(static_cast<uint32_t>(buf_.size()));
    PutVarint64(&buf_, e.key);
  } else {
    PutVarint64(&buf_, e.key - last_key_);
  }
  last_key_ = e.key;
  int nv = e.kind == EntryKind::kTombstone ? 0 : e.present.Size();
  uint8_t tag;
  if (e.kind == EntryKind::kTombstone) {
    tag = kTagTombstone;
  } else if (e.kind == EntryKind::kPartial) {
    tag = kTagPartial;
  } else {
    tag = nv == group_size_ ? kTagPutFull : kTagPutSparse;
  }
  buf_.push_back(static_cast<char>(tag));
  PutVarint64(&buf_, e.seq);
  if (tag == kTagPutSparse || tag == kTagPartial) {
    size_t start = buf_.size();
    buf_.append((group_size_ + 7) / 8, '\0');
    e.present.ForEach([&](ColumnId c) {
      int pos = group_.RankOf(c);
      buf_[start + pos / 8] |= static_cast<char>(1 << (pos % 8));
    });
  }
  for (int i = 0; i < nv; i++) PutFixed64(&buf_, static_cast<uint64_t>(e.values[i]));
  count_++;
}

std::string BlockBuilder::Finish() {
  for (uint32_t r : restarts_) PutFixed32(&buf_, r);
  PutFixed32(&buf_, static_cast<uint32_t>(restarts_.size()));
  PutFixed32(&buf_, static_cast<uint32_t>(count_));
  std::string out;
  out.swap(buf_);
  restarts_.clear();
  count_ = 0;
  last_key_ = 0;
  return out;
}

size_t DecodedBlock::LowerBound(Key k) const {
  return std::lower_bound(keys.begin(), keys.end(), k) - keys.begin();
}

void DecodedBlock::Clear() {
  keys.clear();
  seqs.clear();
  kinds.clear();
  present.clear();
  value_off.clear();
  values.clear();
}

Status DecodeBlock(std::string_view contents, const ColumnSet& group, DecodedBlock* out) {
  out->Clear();
  if (contents.size() < 8) return Status::Corruption("block too short");
  const char* base = contents.data();
  uint32_t num_restarts = DecodeFixed32(base + contents.size() - 8);
  uint32_t num_entries = DecodeFixed32(base + contents.size() - 4);
  if (8 + uint64_t{4} * num_restarts > contents.size()) {
    return Status::Corruption("bad restart count");
  }
  const char* limit = base + contents.size() - 8 - 4 * num_restarts;
  const int gsize = group.Size();
  const std::vector<ColumnId> cols = group.ToVector();
  const size_t bitmap_bytes = (gsize + 7) / 8;
  out->keys.reserve(num_entries);
  out->seqs.reserve(num_entries);
  out->kinds.reserve(num_entries);
  out->present.reserve(num_entries);
  out->value_off.reserve(num_entries);
  const char* p = base;
  Key last = 0;
  for (uint32_t i = 0; i < num_entries; i++) {
    uint64_t k, seq;
    p = GetVarint64Ptr(p, limit, &k);
    if (p == nullptr || p >= limit) return Status::Corruption("bad key");
    Key key = (i % BlockBuilder::kRestartInterval == 0) ? k : last + k;
    last = key;
    uint8_t tag = static_cast<uint8_t>(*p++);
    p = GetVarint64Ptr(p, limit, &seq);
    if (p == nullptr || tag > kTagTombstone) return Status::Corruption("bad entry header");
    ColumnSet present;
    EntryKind kind;
    switch (tag) {
      case kTagPutFull:
        kind = EntryKind::kPut;
        present = group;
        break;
      case kTagPutSparse:
      case kTagPartial:
        kind = tag == kTagPartial ? EntryKind::kPartial : EntryKind::kPut;
        if (static_cast<size_t>(limit - p) < bitmap_bytes) return Status::Corruption("bad bitmap");
        for (int pos = 0; pos < gsize; pos++) {
          if (p[pos / 8] & (1 << (pos % 8))) present.Add(cols[pos]);
        }
        p += bitmap_bytes;
        break;
      default:
        kind = EntryKind::kTombstone;
        break;
    }
    int nv = present.Size();
    if (static_cast<size_t>(limit - p) < size_t{8} * nv) return Status::Corruption("bad values");
    out->keys.push_back(key);
    out->seqs.push_back(seq);
    out->kinds.push_back(kind);
    out->present.push_back(present);
    out->value_off.push_back(static_cast<uint32_t>(out->values.size()));
    for (int j = 0; j < nv; j++) {
      out->values.push_back(static_cast<Value>(DecodeFixed64(p)));
      p += 8;
    }
  }
  if (p != limit) return Status::Corruption("trailing bytes in block");
  return Status::OK();
}

}  // namespace laser
