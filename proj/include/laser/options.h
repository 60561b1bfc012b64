#pragma once

#include <cstddef>
#include <cstdint>

#include "laser/schema.h"

namespace laser {

// Which SST of an overflowing column group moves down next.
enum class CompactionPriority {
  kOldestFirst,  // smallest contained seq first
  kLargestFirst,  // largest file first
};

struct Options {
  Schema schema;
  TreeParams params;
  // Must have params.L + 1 levels and pass ValidateLayout.
  LayoutConfig layout;

  // Nominal bytes ((1 + values) * dt_size per entry) at which the mutable
  // memtable is sealed. 0 sizes it so that K flushes fill level 0:
  // B * pg / K rows.
  size_t memtable_bytes = 0;
  // Sealed memtables allowed to wait for flush before writes stall.
  int max_immutable_memtables = 1;
  int compaction_threads = 2;
  // Run flushes and compactions inline on the writing thread, so that the
  // resulting tree depends only on the operation sequence.
  bool deterministic = false;
  CompactionPriority priority = CompactionPriority::kOldestFirst;
  uint64_t target_file_bytes = 256 << 10;
  int bloom_bits_per_key = 10;
  bool sync_every_write = false;
  bool create_if_missing = true;
  bool error_if_exists = false;
  bool enable_profiler = false;
};

// Per-query block reads, filled in when passed to a read.
struct QueryTrace {
  // blocks[level][group]
  std::vector<std::vector<uint64_t>> blocks;
  // Deepest level consulted; -1 when served from memtables.
  int deepest_level = -1;

  uint64_t Total() const {
    uint64_t n = 0;
    for (const auto& l : blocks) {
      for (uint64_t b : l) n += b;
    }
    return n;
  }
};

struct ReadOptions {
  QueryTrace* trace = nullptr;
  // Record the operation in the workload profiler (when enabled).
  bool profile = true;
};

struct WriteOptions {
  bool sync = false;
  bool profile = true;
};

}  // namespace laser
