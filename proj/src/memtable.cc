#include "memtable.h"

#include <cassert>
#include <cstring>
#include <new>

namespace laser {

char* Arena::Allocate(size_t bytes) {
  bytes = (bytes + 7) & ~size_t{7};
  if (bytes > remaining_) {
    size_t sz = bytes > kBlockSize / 4 ? bytes : kBlockSize;
    blocks_.emplace_back(new char[sz]);
    usage_ += sz;
    if (sz != bytes) {
      ptr_ = blocks_.back().get();
      remaining_ = sz;
    } else {
      return blocks_.back().get();
    }
  }
  char* r = ptr_;
  ptr_ += bytes;
  remaining_ -= bytes;
  return r;
}

struct Node {
  Key key;
  SeqNo seq;
  ColumnSet present;
  EntryKind kind;
  uint8_t height;
  // Followed by height atomic next pointers, then the values.
  std::atomic<Node*>* next_array() {
    return reinterpret_cast<std::atomic<Node*>*>(this + 1);
  }
  const std::atomic<Node*>* next_array() const {
    return reinterpret_cast<const std::atomic<Node*>*>(this + 1);
  }
  Node* Next(int n) const { return next_array()[n].load(std::memory_order_acquire); }
  void SetNext(int n, Node* x) { next_array()[n].store(x, std::memory_order_release); }
  const Value* values() const {
    return reinterpret_cast<const Value*>(next_array() + height);
  }
  Value* values() { return reinterpret_cast<Value*>(next_array() + height); }
};

namespace {
// (key asc, seq desc)
inline bool Before(const Node* n, Key key, SeqNo seq) {
  return n->key < key || (n->key == key && n->seq > seq);
}
}  // namespace

MemTable::MemTable(const Schema& schema, SeqNo first_seq)
    : schema_(schema), first_seq_(first_seq), rnd_(0x2545F4914F6CDD1Dull ^ first_seq) {
  EntryView none;
  head_ = NewNode(none, kMaxHeight);
  for (int i = 0; i < kMaxHeight; i++) head_->SetNext(i, nullptr);
}

Node* MemTable::NewNode(const EntryView& e, int height) {
  int nvals = e.kind == EntryKind::kTombstone ? 0 : e.present.Size();
  size_t bytes = sizeof(Node) + sizeof(std::atomic<Node*>) * height + sizeof(Value) * nvals;
  char* mem = arena_.Allocate(bytes);
  Node* n = new (mem) Node;
  n->key = e.key;
  n->seq = e.seq;
  n->present = e.kind == EntryKind::kTombstone ? ColumnSet() : e.present;
  n->kind = e.kind;
  n->height = static_cast<uint8_t>(height);
  for (int i = 0; i < height; i++) new (&n->next_array()[i]) std::atomic<Node*>(nullptr);
  if (nvals > 0) std::memcpy(n->values(), e.values, sizeof(Value) * nvals);
  return n;
}

int MemTable::RandomHeight() {
  int h = 1;
  while (h < kMaxHeight) {
    rnd_ ^= rnd_ << 13;
    rnd_ ^= rnd_ >> 7;
    rnd_ ^= rnd_ << 17;
    if ((rnd_ & 3) != 0) break;
    h++;
  }
  return h;
}

Node* MemTable::FindGreaterOrEqual(Key key, SeqNo seq, Node** prev) const {
  Node* x = head_;
  int level = max_height_.load(std::memory_order_relaxed) - 1;
  while (true) {
    Node* next = x->Next(level);
    if (next != nullptr && Before(next, key, seq)) {
      x = next;
    } else {
      if (prev != nullptr) prev[level] = x;
      if (level == 0) return next;
      level--;
    }
  }
}

void MemTable::Add(const EntryView& e) {
  assert(!immutable());
  Node* prev[kMaxHeight];
  FindGreaterOrEqual(e.key, e.seq, prev);
  int height = RandomHeight();
  int cur = max_height_.load(std::memory_order_relaxed);
  if (height > cur) {
    for (int i = cur; i < height; i++) prev[i] = head_;
    max_height_.store(height, std::memory_order_relaxed);
  }
  Node* x = NewNode(e, height);
  for (int i = 0; i < height; i++) {
    x->next_array()[i].store(prev[i]->Next(i), std::memory_order_relaxed);
    prev[i]->SetNext(i, x);
  }
  int nvals = e.kind == EntryKind::kTombstone ? 0 : e.present.Size();
  nominal_bytes_.fetch_add(static_cast<size_t>((1 + nvals) * schema_.dt_size),
                           std::memory_order_relaxed);
  entries_.fetch_add(1, std::memory_order_release);
}

bool MemTable::Get(Key key, SeqNo snapshot, RowMerger* merger) const {
  Node* x = FindGreaterOrEqual(key, snapshot, nullptr);
  bool found = false;
  const ColumnSet all = schema_.AllColumns();
  while (x != nullptr && x->key == key) {
    found = true;
    merger->Apply({x->key, x->seq, x->kind, x->present, x->values()}, all, -1);
    if (merger->Done()) break;
    x = x->Next(0);
  }
  return found;
}

void MemTable::Iterator::SkipInvisible() {
  while (node_ != nullptr && node_->seq > snapshot_) node_ = node_->Next(0);
}

void MemTable::Iterator::SeekToFirst() {
  node_ = mem_->head_->Next(0);
  SkipInvisible();
}

void MemTable::Iterator::Seek(Key key) {
  node_ = mem_->FindGreaterOrEqual(key, UINT64_MAX, nullptr);
  SkipInvisible();
}

void MemTable::Iterator::Next() {
  node_ = node_->Next(0);
  SkipInvisible();
}

EntryView MemTable::Iterator::entry() const {
  return {node_->key, node_->seq, node_->kind, node_->present, node_->values()};
}

}  // namespace laser
