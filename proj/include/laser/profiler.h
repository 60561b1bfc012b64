#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>

#include "laser/cost_model.h"
#include "laser/status.h"

namespace laser {

struct TraceStats {
  int num_columns = 0;
  int num_levels = 0;  // levels 0..num_levels-1
  uint64_t window_ops = 0;
  SeqNo window_first_seq = 0;
  SeqNo window_last_seq = 0;
  bool overflowed = false;
  WorkloadStats stats;

  bool operator==(const TraceStats&) const = default;
};

std::string FormatTraceStats(const TraceStats& t);
Status ParseTraceStats(const std::string& text, TraceStats* out);
Status ExportTraceStats(const TraceStats& t, const std::string& path);
Status ImportTraceStats(const std::string& path, TraceStats* out);

// Thread-safe per-level operation counters.
class WorkloadProfiler {
 public:
  WorkloadProfiler(int num_columns, int num_levels);

  void RecordInsert(uint64_t n = 1);
  // `deepest_level` is the last level probed; -1 when served from memory.
  void RecordRead(int deepest_level, const ColumnSet& projection);
  void RecordUpdate(int deepest_level, const ColumnSet& projection);
  // `emitted[i]` = entries the scan returned whose newest value came from
  // level i. Counts the scan once at every level.
  void RecordScan(const ColumnSet& projection, std::span<const uint64_t> emitted);
  // Generic form: one op touching the listed levels.
  void Record(OpKind kind, std::span<const int> levels, const ColumnSet& projection,
              std::span<const uint64_t> selected);

  void SetSeqWindow(SeqNo first, SeqNo last);
  TraceStats Snapshot() const;
  void Reset();

 private:
  struct Cell {
    uint64_t count = 0;
    uint64_t selected = 0;
  };
  struct CellKey {
    int level;
    OpKind kind;
    ColumnSet proj;
    bool operator==(const CellKey&) const = default;
  };
  struct CellKeyHash {
    size_t operator()(const CellKey& k) const {
      return ColumnSetHash()(k.proj) ^ (size_t(k.level) * 31 + size_t(k.kind)) * 0x9E3779B9;
    }
  };
  void Bump(int level, OpKind kind, const ColumnSet& proj, uint64_t selected);

  const int num_columns_;
  const int num_levels_;
  mutable std::mutex mu_;
  uint64_t inserts_ = 0;
  uint64_t ops_ = 0;
  SeqNo first_seq_ = 0;
  SeqNo last_seq_ = 0;
  bool overflowed_ = false;
  std::unordered_map<CellKey, Cell, CellKeyHash> cells_;
};

}  // namespace laser
