#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "laser/schema.h"

namespace laser {

enum class OpKind : uint8_t { kRead = 0, kScan = 1, kUpdate = 2 };

const char* OpKindName(OpKind k);
bool ParseOpKind(std::string_view s, OpKind* out);

// Aggregated operations sharing a kind and projection at one level.
// For scans `selected` is the summed number of entries selected at the level.
struct OpRecord {
  OpKind kind = OpKind::kRead;
  ColumnSet projection;
  uint64_t count = 0;
  double selected = 0;

  bool operator==(const OpRecord&) const = default;
};

struct LevelWorkload {
  std::vector<OpRecord> ops;
  bool Empty() const { return ops.empty(); }
  bool operator==(const LevelWorkload&) const = default;
};

struct WorkloadStats {
  uint64_t inserts = 0;             // w
  std::vector<LevelWorkload> levels;  // index = level

  // Merges into an existing record with the same kind and projection.
  void Add(int level, OpKind kind, const ColumnSet& projection, uint64_t count,
           double selected = 0);
  const LevelWorkload& level(int i) const;
  // Sort records by (kind, projection) so equal stats compare equal.
  void Canonicalize();
  bool operator==(const WorkloadStats&) const = default;
};

struct OpCosts {
  double W = 0;
  double P = 0;
  double Q = 0;
  double U = 0;
};

// Number of groups intersecting the projection.
int GroupsTouched(const std::vector<ColumnSet>& level_groups, const ColumnSet& proj);
// Sum of (1 + cg_size) over groups intersecting the projection.
int TouchedWidth(const std::vector<ColumnSet>& level_groups, const ColumnSet& proj);

double InsertCost(const LayoutConfig& layout, const TreeParams& params,
                  const Schema& schema);
double PointCost(const LayoutConfig& layout, const ColumnSet& proj);
// `selected[i]` is s_i; missing levels count as 0.
double ScanCost(const LayoutConfig& layout, const ColumnSet& proj,
                std::span<const double> selected, const TreeParams& params,
                const Schema& schema);
double UpdateCost(const LayoutConfig& layout, const ColumnSet& proj,
                  const TreeParams& params, const Schema& schema);

// Splits a total selectivity across levels 0..L in proportion to their
// capacities (level 0 counted as B*pg).
std::vector<double> SplitSelectivity(double s, int L, const TreeParams& params);

// Per-level objective for one level's groups.
double LevelCost(const std::vector<ColumnSet>& level_groups,
                 const LevelWorkload& wl, uint64_t inserts,
                 const TreeParams& params, const Schema& schema,
                 double insert_weight = 1.0);

// Contribution of a single group to LevelCost; LevelCost is the sum of
// these over the level's groups.
double GroupCost(const ColumnSet& group, const LevelWorkload& wl, uint64_t inserts,
                 const TreeParams& params, const Schema& schema,
                 double insert_weight = 1.0);

// Sum of LevelCost over levels 0..L.
double WorkloadCost(const LayoutConfig& layout, const WorkloadStats& stats,
                    const TreeParams& params, const Schema& schema,
                    double insert_weight = 1.0);

// Per-kind totals (W summed over inserts, etc.). W uses InsertCost, which
// carries the layout-independent T*L/B term that WorkloadCost omits.
OpCosts WorkloadCostBreakdown(const LayoutConfig& layout, const WorkloadStats& stats,
                              const TreeParams& params, const Schema& schema);

}  // namespace laser
