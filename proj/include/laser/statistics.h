#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laser/types.h"

namespace laser {

struct GroupSummary {
  ColumnSet columns;
  uint64_t files = 0;
  uint64_t entries = 0;
  uint64_t values = 0;
  uint64_t file_bytes = 0;
  double nominal_bytes = 0;
  double capacity_bytes = 0;  // 0 for level 0 and the last level
};

struct LevelSummary {
  int level = 0;
  uint64_t files = 0;
  uint64_t entries = 0;
  uint64_t file_bytes = 0;
  double nominal_bytes = 0;
  double capacity_bytes = 0;
  std::vector<GroupSummary> groups;
  // Age (last seq minus entry seq) quantiles from the SST seq samples,
  // weighted by entries. Empty level: all zero.
  double age_p10 = 0;
  double age_median = 0;
  double age_p90 = 0;
};

struct Statistics {
  // block_reads[level][group] from queries; compactions are not counted.
  std::vector<std::vector<uint64_t>> block_reads;
  uint64_t bytes_flushed = 0;
  uint64_t bytes_compacted_read = 0;
  uint64_t bytes_compacted_written = 0;
  uint64_t flushes = 0;
  uint64_t compactions = 0;
  uint64_t write_stalls = 0;
  uint64_t write_stall_micros = 0;
  SeqNo last_seq = 0;
  std::vector<LevelSummary> levels;

  uint64_t TotalBlockReads() const {
    uint64_t n = 0;
    for (const auto& l : block_reads) {
      for (uint64_t b : l) n += b;
    }
    return n;
  }
  std::string ToString() const;
};

}  // namespace laser
