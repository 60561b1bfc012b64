#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laser/bench/workload.h"
#include "laser/db.h"

namespace laser {
namespace bench {

// Fixed layouts: "row", "column", "cg<N>" and "htap-simple" (full rows
// above the last two levels, single columns in them).
Status FixedLayout(const std::string& name, const Schema& schema, int L, LayoutConfig* out);

struct RunConfig {
  WorkloadSpec spec;
  LayoutConfig layout;
  std::string layout_name = "custom";
  std::string db_path;
  bool deterministic = true;
  bool load = true;
  bool steady = true;
  bool profile = false;
  int compaction_threads = 2;
  size_t load_batch = 1000;
};

Options MakeOptions(const WorkloadSpec& spec, const TreeParams& params,
                    const LayoutConfig& layout, bool deterministic, bool profile,
                    int compaction_threads);

struct ClassSummary {
  uint64_t count = 0;
  uint64_t block_reads = 0;
  uint64_t rows = 0;  // rows found or scanned
  double mean_us = 0;
  double p50_us = 0;
  double p99_us = 0;
};

struct RunReport {
  uint64_t spec_hash = 0;
  std::string layout_name;
  std::string layout_text;
  bool deterministic = true;
  bool failed = false;
  std::string error;
  int block_size = 4096;

  uint64_t load_rows = 0;
  double load_seconds = 0;
  uint64_t steady_ops = 0;
  double steady_seconds = 0;
  double insert_throughput = 0;  // steady-phase inserts per second
  // Steady-phase inserts completed in each wall-clock second.
  std::vector<uint64_t> insert_timeline;
  ClassSummary classes[kNumQueryClasses];
  // Folded Q2 values, Q4 sums and Q5 maxima; equal across layouts.
  uint64_t result_checksum = 0;

  // Engine counters for the steady phase (reset after the load).
  Statistics stats;
  TraceStats profile;
  bool has_profile = false;

  uint64_t BlockReads() const { return stats.TotalBlockReads(); }
  double CompactionBlocks() const {
    return double(stats.bytes_compacted_written) / double(block_size);
  }
  // Block reads plus compaction output in blocks.
  double MeasuredCost() const { return double(BlockReads()) + CompactionBlocks(); }

  // "metric,value" rows.
  std::string ToCsv() const;
  static Status FromCsv(const std::string& text, RunReport* out);
};

Status WriteReport(const RunReport& r, const std::string& path);
Status ReadReport(const std::string& path, RunReport* out);

// Loads and/or runs the steady phase. On engine errors the partial report
// is returned with failed = true.
Status RunWorkload(const RunConfig& config, RunReport* report);

// Ranking by measured cost, ties share a rank. Reports must share a spec.
Status CompareReports(const std::vector<RunReport>& reports, std::string* csv);

}  // namespace bench
}  // namespace laser
