#pragma once

// Exhaustive reference for the layout search, in exact integer arithmetic.
// Costs are scaled by c*B so every term is an integer.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "laser/cost_model.h"
#include "laser/schema.h"

namespace laser::oracle {

using Cost = __int128;

// Scan selectivities and the insert weight must be integral.
inline Cost ScaledGroupCost(const ColumnSet& g, const LevelWorkload& wl, uint64_t w,
                            const TreeParams& p, const Schema& s) {
  const Cost cb = Cost(s.num_columns) * p.B;
  Cost c = Cost(w) * p.T;
  const Cost width = 1 + g.Size();
  for (const auto& r : wl.ops) {
    if (!g.Intersects(r.projection)) continue;
    if (r.kind == OpKind::kRead) c += Cost(r.count) * cb;
    if (r.kind == OpKind::kScan) c += Cost(int64_t(r.selected)) * width;
    if (r.kind == OpKind::kUpdate) c += Cost(r.count) * p.T * width;
  }
  return c;
}

inline Cost ScaledLayoutCost(const LayoutConfig& lc, const WorkloadStats& st,
                             const TreeParams& p, const Schema& s) {
  Cost c = 0;
  for (int i = 0; i <= lc.L(); i++) {
    for (const auto& g : lc.groups(i)) c += ScaledGroupCost(g, st.level(i), st.inserts, p, s);
  }
  return c;
}

// All set partitions of `set`.
inline void ForEachPartition(const ColumnSet& set,
                             const std::function<void(const std::vector<ColumnSet>&)>& fn) {
  std::vector<ColumnId> cols = set.ToVector();
  std::vector<ColumnSet> parts;
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == cols.size()) {
      fn(parts);
      return;
    }
    for (size_t j = 0; j < parts.size(); j++) {
      parts[j].Add(cols[k]);
      rec(k + 1);
      parts[j].Remove(cols[k]);
    }
    parts.push_back(ColumnSet::Of({cols[k]}));
    rec(k + 1);
    parts.pop_back();
  };
  rec(0);
}

// Minimum over every partition chain below `g` at levels level..L.
class ChainOracle {
 public:
  ChainOracle(const WorkloadStats& st, const TreeParams& p, const Schema& s)
      : st_(st), p_(p), s_(s) {}

  Cost Opt(int level, const ColumnSet& g) {
    if (level > p_.L) return 0;
    auto key = std::make_pair(level, std::make_pair(g.lo(), g.hi()));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Cost best = -1;
    ForEachPartition(g, [&](const std::vector<ColumnSet>& parts) {
      Cost c = 0;
      for (const auto& h : parts) {
        c += ScaledGroupCost(h, st_.level(level), st_.inserts, p_, s_) + Opt(level + 1, h);
      }
      if (best < 0 || c < best) best = c;
    });
    memo_[key] = best;
    return best;
  }

  // Minimum total layout cost including the fixed row level 0.
  Cost Minimum() {
    ColumnSet all = s_.AllColumns();
    return ScaledGroupCost(all, st_.level(0), st_.inserts, p_, s_) + Opt(1, all);
  }

  // Literal enumeration of whole chains; only for tiny schemas.
  Cost MinimumByChains() {
    ColumnSet all = s_.AllColumns();
    Cost best = -1;
    std::vector<std::vector<ColumnSet>> levels(p_.L + 1);
    levels[0] = {all};
    std::function<void(int)> rec = [&](int level) {
      if (level > p_.L) {
        Cost c = ScaledLayoutCost(LayoutConfig(levels), st_, p_, s_);
        if (best < 0 || c < best) best = c;
        return;
      }
      // Refine every group of the previous level independently.
      std::vector<std::vector<std::vector<ColumnSet>>> options;
      for (const auto& parent : levels[level - 1]) {
        options.emplace_back();
        ForEachPartition(parent, [&](const std::vector<ColumnSet>& p) { options.back().push_back(p); });
      }
      std::vector<size_t> idx(options.size(), 0);
      while (true) {
        levels[level].clear();
        for (size_t k = 0; k < options.size(); k++) {
          for (const auto& h : options[k][idx[k]]) levels[level].push_back(h);
        }
        rec(level + 1);
        size_t k = 0;
        while (k < idx.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    };
    rec(1);
    return best;
  }

 private:
  const WorkloadStats& st_;
  const TreeParams& p_;
  const Schema& s_;
  std::map<std::pair<int, std::pair<uint64_t, uint64_t>>, Cost> memo_;
};

struct RandomCase {
  Schema schema;
  TreeParams params;
  WorkloadStats stats;
};

inline RandomCase MakeRandomCase(std::mt19937_64& rng, int max_c = 6, int max_L = 3) {
  RandomCase rc;
  rc.schema.num_columns = 2 + int(rng() % (max_c - 1));
  rc.params.L = 1 + int(rng() % max_L);
  rc.params.T = 2 + int(rng() % 9);
  rc.params.B = 1 + int(rng() % 20);
  rc.params.pg = 1;
  const int c = rc.schema.num_columns;
  rc.stats.inserts = (rng() % 4 == 0) ? 0 : rng() % 2000;
  for (int i = 0; i <= rc.params.L; i++) {
    int n = int(rng() % 6);
    for (int k = 0; k < n; k++) {
      ColumnSet proj;
      while (proj.Empty()) {
        for (int col = 1; col <= c; col++) {
          if (rng() % 3 == 0) proj.Add(col);
        }
      }
      OpKind kind = static_cast<OpKind>(rng() % 3);
      uint64_t count = 1 + rng() % 200;
      double sel = kind == OpKind::kScan ? double(rng() % 200000) : 0.0;
      rc.stats.Add(i, kind, proj, count, sel);
    }
  }
  return rc;
}

}  // namespace laser::oracle
