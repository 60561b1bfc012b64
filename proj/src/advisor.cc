#include "laser/advisor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace laser {

namespace {

bool CostLess(double a, double b) {
  return a < b - 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool CostEqual(double a, double b) { return !CostLess(a, b) && !CostLess(b, a); }

std::vector<ColumnSet> Sorted(std::vector<ColumnSet> p) {
  std::sort(p.begin(), p.end(),
            [](const ColumnSet& a, const ColumnSet& b) { return a.First() < b.First(); });
  return p;
}

bool PartitionLexLess(const std::vector<ColumnSet>& a, const std::vector<ColumnSet>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; i++) {
    if (a[i] == b[i]) continue;
    return ColumnSet::LexLess(a[i], b[i]);
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<ColumnSet> SplitAttributes(const ColumnSet& parent,
                                       std::span<const ColumnSet> projections) {
  std::vector<ColumnSet> parts;
  if (parent.Empty()) return parts;
  parts.push_back(parent);
  for (const ColumnSet& raw : projections) {
    ColumnSet p = raw & parent;
    if (p.Empty()) continue;
    std::vector<ColumnSet> next;
    next.reserve(parts.size() + 1);
    for (const ColumnSet& s : parts) {
      ColumnSet in = s & p;
      ColumnSet out = s - p;
      if (!in.Empty()) next.push_back(in);
      if (!out.Empty()) next.push_back(out);
    }
    parts.swap(next);
  }
  return Sorted(std::move(parts));
}

CandidateSet MergeCandidates(const std::vector<ColumnSet>& primitives,
                             const GroupCostFn& cost, int max_exact) {
  CandidateSet cs;
  cs.primitives = Sorted(primitives);
  const int n = static_cast<int>(cs.primitives.size());
  std::vector<double> prim_cost(n);
  for (int i = 0; i < n; i++) {
    prim_cost[i] = cost(cs.primitives[i]);
    cs.candidates.push_back({cs.primitives[i], prim_cost[i]});
  }
  if (n <= 1) return cs;
  if (n <= max_exact) {
    const uint32_t full = (1u << n) - 1;
    for (uint32_t mask = 1; mask <= full; mask++) {
      if ((mask & (mask - 1)) == 0) continue;  // primitives already added
      ColumnSet u;
      double parts = 0;
      for (int i = 0; i < n; i++) {
        if (mask & (1u << i)) {
          u |= cs.primitives[i];
          parts += prim_cost[i];
        }
      }
      double c = cost(u);
      if (!CostLess(parts, c)) cs.candidates.push_back({u, c});
    }
    return cs;
  }
  cs.capped = true;
  for (int a = 0; a < n; a++) {
    ColumnSet u = cs.primitives[a];
    double parts = prim_cost[a];
    for (int b = a + 1; b < n; b++) {
      u |= cs.primitives[b];
      parts += prim_cost[b];
      double c = cost(u);
      if (!CostLess(parts, c)) cs.candidates.push_back({u, c});
    }
  }
  return cs;
}

std::vector<ColumnSet> SelectPartition(const CandidateSet& cs) {
  const auto& prims = cs.primitives;
  const int n = static_cast<int>(prims.size());
  if (n == 0) return {};
  auto prim_index = [&](const ColumnSet& s) {
    for (int i = 0; i < n; i++) {
      if (prims[i] == s) return i;
    }
    return -1;
  };
  // Express each candidate as a set of primitive indices.
  struct Cand {
    uint64_t first;  // index of lowest primitive
    uint64_t last;   // index of highest primitive
    std::vector<int> members;
    double cost;
    ColumnSet cols;
  };
  std::vector<Cand> cands;
  for (const auto& c : cs.candidates) {
    Cand x{0, 0, {}, c.cost, c.columns};
    for (int i = 0; i < n; i++) {
      if (prims[i].IsSubsetOf(c.columns)) x.members.push_back(i);
    }
    if (x.members.empty()) continue;
    x.first = x.members.front();
    x.last = x.members.back();
    cands.push_back(std::move(x));
  }
  (void)prim_index;

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    int groups = 0;
    std::vector<ColumnSet> parts;  // sorted
  };
  auto better = [](double c, int g, const std::vector<ColumnSet>& p, const Best& b) {
    if (std::isinf(b.cost)) return true;
    if (CostLess(c, b.cost)) return true;
    if (!CostEqual(c, b.cost)) return false;
    if (g != b.groups) return g < b.groups;
    return PartitionLexLess(p, b.parts);
  };

  if (n <= 20 && !cs.capped) {
    const uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    std::unordered_map<uint32_t, int> by_mask;
    std::vector<std::vector<int>> by_low(n);
    std::vector<uint32_t> cmask(cands.size());
    for (size_t k = 0; k < cands.size(); k++) {
      uint32_t m = 0;
      for (int i : cands[k].members) m |= 1u << i;
      cmask[k] = m;
      by_low[cands[k].first].push_back(static_cast<int>(k));
    }
    std::vector<Best> best(size_t(full) + 1);
    best[0].cost = 0;
    for (uint32_t mask = 1; mask <= full; mask++) {
      int low = std::countr_zero(mask);
      Best& b = best[mask];
      for (int k : by_low[low]) {
        uint32_t m = cmask[k];
        if ((m & mask) != m) continue;
        const Best& rest = best[mask ^ m];
        if (std::isinf(rest.cost)) continue;
        double c = rest.cost + cands[k].cost;
        int g = rest.groups + 1;
        if (!std::isinf(b.cost) && CostLess(b.cost, c)) continue;
        std::vector<ColumnSet> p = rest.parts;
        p.push_back(cands[k].cols);
        p = Sorted(std::move(p));
        if (better(c, g, p, b)) {
          b.cost = c;
          b.groups = g;
          b.parts = std::move(p);
        }
      }
    }
    return best[full].parts;
  }

  // Capped: candidates are runs of adjacent primitives; interval DP.
  std::vector<Best> best(n + 1);
  best[0].cost = 0;
  for (int end = 1; end <= n; end++) {
    for (const auto& c : cands) {
      if (static_cast<int>(c.last) != end - 1) continue;
      if (static_cast<int>(c.members.size()) != end - static_cast<int>(c.first)) continue;
      const Best& rest = best[c.first];
      if (std::isinf(rest.cost)) continue;
      double cost = rest.cost + c.cost;
      std::vector<ColumnSet> p = rest.parts;
      p.push_back(c.cols);
      p = Sorted(std::move(p));
      if (better(cost, rest.groups + 1, p, best[end])) {
        best[end] = {cost, rest.groups + 1, std::move(p)};
      }
    }
  }
  return best[n].parts;
}

namespace {

class Solver {
 public:
  Solver(const WorkloadStats& stats, const TreeParams& params, const Schema& schema,
         const AdvisorOptions& options, AdviseReport* report)
      : stats_(stats), params_(params), schema_(schema), options_(options),
        report_(report) {}

  struct Solution {
    double cost = 0;
    std::vector<ColumnSet> groups;
  };

  const Solution& Solve(int level, const ColumnSet& g) {
    auto& memo = memo_[level];
    auto it = memo.find(g);
    if (it != memo.end()) return it->second;
    Solution sol = Compute(level, g);
    return memo.emplace(g, std::move(sol)).first->second;
  }

  double LevelGroupCost(int level, const ColumnSet& g) const {
    return GroupCost(g, stats_.level(level), stats_.inserts, params_, schema_,
                     options_.insert_weight);
  }

 private:
  Solution Compute(int level, const ColumnSet& g) {
    if (level > params_.L) return {};
    if (report_ != nullptr) report_->subproblems++;
    std::vector<ColumnSet> deep;
    for (int i = level; i <= params_.L; i++) {
      for (const auto& r : stats_.level(i).ops) deep.push_back(r.projection);
    }
    std::vector<ColumnSet> prims = SplitAttributes(g, deep);
    CandidateSet cs;
    if (static_cast<int>(prims.size()) <= options_.max_exact_primitives) {
      cs = MergeCandidates(
          prims,
          [&](const ColumnSet& u) { return LevelGroupCost(level, u) + Solve(level + 1, u).cost; },
          options_.max_exact_primitives);
    } else {
      // Too many joint atoms: choose this level greedily from its own
      // operations, then recurse into the chosen groups.
      std::vector<ColumnSet> own;
      for (const auto& r : stats_.level(level).ops) own.push_back(r.projection);
      prims = SplitAttributes(g, own);
      cs = MergeCandidates(prims, [&](const ColumnSet& u) { return LevelGroupCost(level, u); },
                           options_.max_exact_primitives);
    }
    if (cs.capped && report_ != nullptr) report_->capped_subproblems++;
    Solution sol;
    sol.groups = SelectPartition(cs);
    for (const auto& h : sol.groups) {
      sol.cost += LevelGroupCost(level, h) + Solve(level + 1, h).cost;
    }
    return sol;
  }

  const WorkloadStats& stats_;
  const TreeParams& params_;
  const Schema& schema_;
  const AdvisorOptions& options_;
  AdviseReport* report_;
  std::unordered_map<int, std::unordered_map<ColumnSet, Solution, ColumnSetHash>> memo_;
};

}  // namespace

LayoutConfig Advise(const WorkloadStats& stats, const TreeParams& params,
                    const Schema& schema, const AdvisorOptions& options,
                    AdviseReport* report) {
  Solver solver(stats, params, schema, options, report);
  std::vector<std::vector<ColumnSet>> levels(params.L + 1);
  levels[0].push_back(schema.AllColumns());
  for (int i = 1; i <= params.L; i++) {
    for (const auto& parent : levels[i - 1]) {
      const auto& sol = solver.Solve(i, parent);
      levels[i].insert(levels[i].end(), sol.groups.begin(), sol.groups.end());
    }
  }
  LayoutConfig layout(std::move(levels));
  if (report != nullptr) {
    report->modeled_cost =
        WorkloadCost(layout, stats, params, schema, options.insert_weight);
  }
  return layout;
}

}  // namespace laser
