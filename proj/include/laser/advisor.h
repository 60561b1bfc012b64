#pragma once

#include <functional>
#include <span>
#include <vector>

#include "laser/cost_model.h"
#include "laser/schema.h"

namespace laser {

// Coarsest partition of `parent` in which every projection (restricted to
// the parent) is a union of parts. Parts are ordered by smallest column.
std::vector<ColumnSet> SplitAttributes(const ColumnSet& parent,
                                       std::span<const ColumnSet> projections);

struct Candidate {
  ColumnSet columns;
  double cost = 0;
};

struct CandidateSet {
  std::vector<ColumnSet> primitives;
  std::vector<Candidate> candidates;  // primitives first, then retained unions
  bool capped = false;                // only contiguous unions were explored
};

using GroupCostFn = std::function<double(const ColumnSet&)>;

inline constexpr int kMaxExactPrimitives = 12;

// Keeps every union of primitives whose cost does not exceed the summed cost
// of its primitives. With more than `max_exact` primitives only unions of
// runs of adjacent primitives (ordered by smallest column) are considered.
CandidateSet MergeCandidates(const std::vector<ColumnSet>& primitives,
                             const GroupCostFn& cost,
                             int max_exact = kMaxExactPrimitives);

// Minimum-cost partition of the union of the primitives built from the
// candidates. Ties prefer fewer groups, then the lexicographically smallest
// list of groups.
std::vector<ColumnSet> SelectPartition(const CandidateSet& candidates);

struct AdvisorOptions {
  double insert_weight = 1.0;
  int max_exact_primitives = kMaxExactPrimitives;
};

struct AdviseReport {
  double modeled_cost = 0;
  int capped_subproblems = 0;  // parents that fell back to contiguous merges
  int subproblems = 0;
};

// Chooses a layout for levels 1..params.L minimising WorkloadCost subject to
// containment. Level 0 stays the full row.
LayoutConfig Advise(const WorkloadStats& stats, const TreeParams& params,
                    const Schema& schema, const AdvisorOptions& options = {},
                    AdviseReport* report = nullptr);

}  // namespace laser
