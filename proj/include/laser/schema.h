#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laser/status.h"
#include "laser/types.h"

namespace laser {

// Columns are the dense ids 1..num_columns.
struct Schema {
  int num_columns = 0;
  // Average bytes per value, including its share of encoding.
  double dt_size = 8.0;

  ColumnSet AllColumns() const { return ColumnSet::Range(1, num_columns); }
  Status Validate() const;
};

struct TreeParams {
  int T = 2;            // size ratio
  int L = 1;            // levels below level 0
  int B = 1;            // row-style entries per block
  int64_t pg = 1;       // blocks in level 0
  int D = 4096;         // block size in bytes
  int K = 4;            // max level-0 runs before compaction

  // B = floor(D / ((1 + c) * dt_size)), at least 1.
  static TreeParams FromBlockSize(const Schema& schema, int block_size, int T,
                                  int L, int64_t pg, int K = 4);

  Status Validate(const Schema& schema) const;
  // Entry capacity of level i >= 1: T^i * B * pg.
  uint64_t LevelCapacity(int level) const;
};

// "laser-params 1" followed by "key = value" lines for the schema and
// tree shape.
std::string FormatTreeParams(const Schema& schema, const TreeParams& params);
Status ParseTreeParams(const std::string& text, Schema* schema, TreeParams* params);

// ceil(log_T(N / (B*pg) * (T-1)/T)), clamped to >= 1.
Status LevelsFor(uint64_t n, const TreeParams& params, int* levels);

// floor(B * (1 + c) / (1 + cg_size)), at least 1.
int EntriesPerBlock(const Schema& schema, const TreeParams& params,
                    const ColumnSet& group);

// Per-level partition of the schema into column groups. Level 0 is the
// full row; levels are 0..L.
class LayoutConfig {
 public:
  LayoutConfig() = default;
  explicit LayoutConfig(std::vector<std::vector<ColumnSet>> levels);

  static LayoutConfig Row(const Schema& schema, int L);
  static LayoutConfig Column(const Schema& schema, int L);
  // Equal-width groups of cg_size columns (the last one may be narrower)
  // at every level >= 1.
  static LayoutConfig Uniform(const Schema& schema, int L, int cg_size);

  int L() const { return static_cast<int>(levels_.size()) - 1; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const std::vector<ColumnSet>& groups(int level) const { return levels_[level]; }
  const std::vector<std::vector<ColumnSet>>& levels() const { return levels_; }
  int num_groups(int level) const { return static_cast<int>(levels_[level].size()); }

  // Index of the group at `level` containing column c, -1 if none.
  int GroupOf(int level, ColumnId c) const;
  // Indices of the groups at level+1 contained in group g at `level`.
  std::vector<int> ChildrenOf(int level, int g) const;

  std::string ToText() const;
  static Status Parse(const std::string& text, LayoutConfig* out);

  bool operator==(const LayoutConfig& o) const = default;

 private:
  void Normalize();
  std::vector<std::vector<ColumnSet>> levels_;
};

struct LayoutViolation {
  int level = -1;
  int group = -1;
  std::string reason;
};

// OK iff every level partitions the schema, level 0 is the full row and
// every group at level i >= 1 lies inside one group of level i-1.
Status ValidateLayout(const LayoutConfig& layout, const Schema& schema,
                      LayoutViolation* violation = nullptr);

}  // namespace laser
