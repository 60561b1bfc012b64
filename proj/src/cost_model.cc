#include "laser/cost_model.h"

#include <algorithm>
#include <tuple>

namespace laser {

const char* OpKindName(OpKind k) {
  switch (k) {
    case OpKind::kRead:
      return "read";
    case OpKind::kScan:
      return "scan";
    case OpKind::kUpdate:
      return "update";
  }
  return "?";
}

bool ParseOpKind(std::string_view s, OpKind* out) {
  if (s == "read") {
    *out = OpKind::kRead;
  } else if (s == "scan") {
    *out = OpKind::kScan;
  } else if (s == "update") {
    *out = OpKind::kUpdate;
  } else {
    return false;
  }
  return true;
}

void WorkloadStats::Add(int level, OpKind kind, const ColumnSet& projection,
                        uint64_t count, double selected) {
  if (static_cast<int>(levels.size()) <= level) levels.resize(level + 1);
  for (auto& r : levels[level].ops) {
    if (r.kind == kind && r.projection == projection) {
      r.count += count;
      r.selected += selected;
      return;
    }
  }
  levels[level].ops.push_back({kind, projection, count, selected});
}

const LevelWorkload& WorkloadStats::level(int i) const {
  static const LevelWorkload kEmpty;
  if (i < 0 || i >= static_cast<int>(levels.size())) return kEmpty;
  return levels[i];
}

void WorkloadStats::Canonicalize() {
  for (auto& lv : levels) {
    std::sort(lv.ops.begin(), lv.ops.end(), [](const OpRecord& a, const OpRecord& b) {
      return std::make_tuple(a.kind, a.projection.hi(), a.projection.lo()) <
             std::make_tuple(b.kind, b.projection.hi(), b.projection.lo());
    });
  }
  while (!levels.empty() && levels.back().ops.empty()) levels.pop_back();
}

int GroupsTouched(const std::vector<ColumnSet>& level_groups, const ColumnSet& proj) {
  int n = 0;
  for (const auto& g : level_groups) n += g.Intersects(proj);
  return n;
}

int TouchedWidth(const std::vector<ColumnSet>& level_groups, const ColumnSet& proj) {
  int n = 0;
  for (const auto& g : level_groups) {
    if (g.Intersects(proj)) n += 1 + g.Size();
  }
  return n;
}

double InsertCost(const LayoutConfig& layout, const TreeParams& params,
                  const Schema& schema) {
  const int L = layout.L();
  double sum_g = 0;
  for (int i = 0; i <= L; i++) sum_g += layout.num_groups(i);
  return double(params.T) * L / params.B +
         double(params.T) / (double(params.B) * schema.num_columns) * sum_g;
}

double PointCost(const LayoutConfig& layout, const ColumnSet& proj) {
  double p = 0;
  for (int i = 0; i <= layout.L(); i++) p += GroupsTouched(layout.groups(i), proj);
  return p;
}

double ScanCost(const LayoutConfig& layout, const ColumnSet& proj,
                std::span<const double> selected, const TreeParams& params,
                const Schema& schema) {
  double q = 0;
  for (int i = 0; i <= layout.L() && i < static_cast<int>(selected.size()); i++) {
    q += selected[i] * TouchedWidth(layout.groups(i), proj);
  }
  return q / (double(schema.num_columns) * params.B);
}

double UpdateCost(const LayoutConfig& layout, const ColumnSet& proj,
                  const TreeParams& params, const Schema& schema) {
  double u = 0;
  for (int i = 0; i <= layout.L(); i++) u += TouchedWidth(layout.groups(i), proj);
  return u * params.T / (double(schema.num_columns) * params.B);
}

std::vector<double> SplitSelectivity(double s, int L, const TreeParams& params) {
  std::vector<double> caps(L + 1);
  double total = 0;
  double c = 1;
  for (int i = 0; i <= L; i++) {
    caps[i] = c;
    total += c;
    c *= params.T;
  }
  for (double& x : caps) x = s * x / total;
  return caps;
}

double GroupCost(const ColumnSet& group, const LevelWorkload& wl, uint64_t inserts,
                 const TreeParams& params, const Schema& schema,
                 double insert_weight) {
  const double cb = double(schema.num_columns) * params.B;
  double cost = insert_weight * double(inserts) * params.T / cb;
  const double width = 1 + group.Size();
  for (const auto& r : wl.ops) {
    if (!group.Intersects(r.projection)) continue;
    switch (r.kind) {
      case OpKind::kRead:
        cost += double(r.count);
        break;
      case OpKind::kScan:
        cost += r.selected * width / cb;
        break;
      case OpKind::kUpdate:
        cost += double(r.count) * params.T * width / cb;
        break;
    }
  }
  return cost;
}

double LevelCost(const std::vector<ColumnSet>& level_groups, const LevelWorkload& wl,
                 uint64_t inserts, const TreeParams& params, const Schema& schema,
                 double insert_weight) {
  double cost = 0;
  for (const auto& g : level_groups) {
    cost += GroupCost(g, wl, inserts, params, schema, insert_weight);
  }
  return cost;
}

double WorkloadCost(const LayoutConfig& layout, const WorkloadStats& stats,
                    const TreeParams& params, const Schema& schema,
                    double insert_weight) {
  double cost = 0;
  for (int i = 0; i <= layout.L(); i++) {
    cost += LevelCost(layout.groups(i), stats.level(i), stats.inserts, params, schema,
                      insert_weight);
  }
  return cost;
}

OpCosts WorkloadCostBreakdown(const LayoutConfig& layout, const WorkloadStats& stats,
                              const TreeParams& params, const Schema& schema) {
  OpCosts c;
  c.W = double(stats.inserts) * InsertCost(layout, params, schema);
  const double cb = double(schema.num_columns) * params.B;
  for (int i = 0; i <= layout.L(); i++) {
    for (const auto& r : stats.level(i).ops) {
      const auto& g = layout.groups(i);
      switch (r.kind) {
        case OpKind::kRead:
          c.P += double(r.count) * GroupsTouched(g, r.projection);
          break;
        case OpKind::kScan:
          c.Q += r.selected * TouchedWidth(g, r.projection) / cb;
          break;
        case OpKind::kUpdate:
          c.U += double(r.count) * params.T * TouchedWidth(g, r.projection) / cb;
          break;
      }
    }
  }
  return c;
}

}  // namespace laser
