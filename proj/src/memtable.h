#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "entry.h"
#include "laser/schema.h"

namespace laser {

class Arena {
 public:
  Arena() = default;
  Arena(const Arena&) = delete;
  Arena& operator=(const Arena&) = delete;
  char* Allocate(size_t bytes);
  size_t MemoryUsage() const { return usage_; }

 private:
  static constexpr size_t kBlockSize = 1 << 20;
  std::vector<std::unique_ptr<char[]>> blocks_;
  char* ptr_ = nullptr;
  size_t remaining_ = 0;
  size_t usage_ = 0;
};

// Skiplist ordered by (key asc, seq desc). One writer at a time; readers
// need no locking.
class MemTable {
 public:
  MemTable(const Schema& schema, SeqNo first_seq);
  MemTable(const MemTable&) = delete;
  MemTable& operator=(const MemTable&) = delete;

  void Add(const EntryView& e);

  // Applies the versions of `key` with seq <= snapshot, newest first.
  // Returns true if any version was seen.
  bool Get(Key key, SeqNo snapshot, RowMerger* merger) const;

  // Nominal size: (1 + values) * dt_size per entry.
  size_t nominal_bytes() const { return nominal_bytes_.load(std::memory_order_relaxed); }
  uint64_t num_entries() const { return entries_.load(std::memory_order_relaxed); }
  bool Empty() const { return num_entries() == 0; }
  SeqNo first_seq() const { return first_seq_; }
  size_t MemoryUsage() const { return arena_.MemoryUsage(); }

  void MarkImmutable() { immutable_.store(true, std::memory_order_release); }
  bool immutable() const { return immutable_.load(std::memory_order_acquire); }

  class Iterator {
   public:
    // Entries with seq > snapshot are skipped.
    Iterator(const MemTable* mem, SeqNo snapshot) : mem_(mem), snapshot_(snapshot) {}
    bool Valid() const { return node_ != nullptr; }
    void SeekToFirst();
    void Seek(Key key);
    void Next();
    EntryView entry() const;

   private:
    void SkipInvisible();
    const MemTable* mem_;
    SeqNo snapshot_;
    const struct Node* node_ = nullptr;
  };

 private:
  friend class Iterator;
  static constexpr int kMaxHeight = 12;

  struct Node* NewNode(const EntryView& e, int height);
  int RandomHeight();
  // First node >= (key, seq); fills prev when non-null.
  struct Node* FindGreaterOrEqual(Key key, SeqNo seq, struct Node** prev) const;

  const Schema schema_;
  const SeqNo first_seq_;
  Arena arena_;
  struct Node* head_;
  std::atomic<int> max_height_{1};
  uint64_t rnd_;
  std::atomic<size_t> nominal_bytes_{0};
  std::atomic<uint64_t> entries_{0};
  std::atomic<bool> immutable_{false};
};

}  // namespace laser
