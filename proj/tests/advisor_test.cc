#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "advisor_oracle.h"
#include "laser/advisor.h"

namespace laser {
namespace {

TEST(SplitTest, WorkedExample) {
  ColumnSet r = ColumnSet::Range(1, 4);
  std::vector<ColumnSet> projs = {ColumnSet::Of({2, 3, 4}), ColumnSet::Of({1, 2}),
                                  ColumnSet::Range(1, 4)};
  std::vector<ColumnSet> parts = SplitAttributes(r, projs);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], ColumnSet::Of({1}));
  EXPECT_EQ(parts[1], ColumnSet::Of({2}));
  EXPECT_EQ(parts[2], ColumnSet::Of({3, 4}));
}

TEST(SplitTest, Trivial) {
  ColumnSet r = ColumnSet::Range(1, 5);
  EXPECT_EQ(SplitAttributes(r, {}), std::vector<ColumnSet>{r});
  std::vector<ColumnSet> singles;
  for (int c = 1; c <= 5; c++) singles.push_back(ColumnSet::Of({c}));
  EXPECT_EQ(SplitAttributes(r, singles), singles);
}

TEST(SplitTest, IsCoarsestConsistentPartition) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 500; iter++) {
    ColumnSet r = ColumnSet::Range(1, 7);
    std::vector<ColumnSet> projs(rng() % 5);
    for (auto& p : projs) {
      for (int c = 1; c <= 9; c++) {
        if (rng() % 2) p.Add(c);
      }
    }
    auto parts = SplitAttributes(r, projs);
    ColumnSet u;
    for (const auto& x : parts) {
      EXPECT_FALSE(x.Intersects(u));
      u |= x;
      for (const auto& p : projs) {
        ColumnSet q = p & r;
        EXPECT_TRUE(x.IsSubsetOf(q) || !x.Intersects(q));
      }
    }
    EXPECT_EQ(u, r);
    // Coarsest: two columns share a part iff they agree on every projection.
    for (int a = 1; a <= 7; a++) {
      for (int b = a + 1; b <= 7; b++) {
        bool same = true;
        for (const auto& p : projs) same &= p.Contains(a) == p.Contains(b);
        bool together = false;
        for (const auto& x : parts) together |= x.Contains(a) && x.Contains(b);
        EXPECT_EQ(same, together);
      }
    }
  }
}

GroupCostFn LevelOnly(const LevelWorkload& wl, uint64_t w, const TreeParams& p,
                      const Schema& s) {
  return [&wl, w, &p, &s](const ColumnSet& g) { return GroupCost(g, wl, w, p, s); };
}

TEST(MergeTest, PointReadsKeepUnion) {
  Schema s{2, 8};
  TreeParams p;
  p.B = 10;
  LevelWorkload wl;
  wl.ops.push_back({OpKind::kRead, ColumnSet::Of({1, 2}), 1, 0});
  CandidateSet cs =
      MergeCandidates({ColumnSet::Of({1}), ColumnSet::Of({2})}, LevelOnly(wl, 0, p, s));
  ASSERT_EQ(cs.candidates.size(), 3u);
  EXPECT_EQ(cs.candidates[2].columns, ColumnSet::Of({1, 2}));
  EXPECT_DOUBLE_EQ(cs.candidates[2].cost, 1);
  EXPECT_DOUBLE_EQ(cs.candidates[0].cost + cs.candidates[1].cost, 2);
}

TEST(MergeTest, SingleColumnScansKeepNothing) {
  Schema s{2, 8};
  TreeParams p;
  p.B = 10;
  LevelWorkload wl;
  wl.ops.push_back({OpKind::kScan, ColumnSet::Of({1}), 1, 100});
  wl.ops.push_back({OpKind::kScan, ColumnSet::Of({2}), 1, 100});
  CandidateSet cs =
      MergeCandidates({ColumnSet::Of({1}), ColumnSet::Of({2})}, LevelOnly(wl, 0, p, s));
  EXPECT_EQ(cs.candidates.size(), 2u);
  EXPECT_EQ(SelectPartition(cs).size(), 2u);
}

TEST(MergeTest, SinglePrimitive) {
  CandidateSet cs = MergeCandidates({ColumnSet::Range(1, 3)}, [](const ColumnSet&) { return 1.0; });
  ASSERT_EQ(cs.candidates.size(), 1u);
  EXPECT_EQ(SelectPartition(cs), std::vector<ColumnSet>{ColumnSet::Range(1, 3)});
}

TEST(MergeTest, CapFallsBackToContiguousUnions) {
  std::vector<ColumnSet> prims;
  for (int c = 1; c <= 14; c++) prims.push_back(ColumnSet::Of({c}));
  CandidateSet cs = MergeCandidates(prims, [](const ColumnSet& g) { return 1.0 + 0.01 * g.Size(); });
  EXPECT_TRUE(cs.capped);
  EXPECT_EQ(cs.candidates.size(), 14u + 14 * 13 / 2);
  std::vector<ColumnSet> sel = SelectPartition(cs);
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0], ColumnSet::Range(1, 14));
}

TEST(SelectTest, PrimitivesOnly) {
  CandidateSet cs;
  cs.primitives = {ColumnSet::Of({1}), ColumnSet::Of({2, 3})};
  cs.candidates = {{cs.primitives[0], 1}, {cs.primitives[1], 2}};
  EXPECT_EQ(SelectPartition(cs), cs.primitives);
}

TEST(SelectTest, TieBreaks) {
  CandidateSet cs;
  cs.primitives = {ColumnSet::Of({1}), ColumnSet::Of({2}), ColumnSet::Of({3})};
  cs.candidates = {{cs.primitives[0], 1}, {cs.primitives[1], 1}, {cs.primitives[2], 1},
                   {ColumnSet::Of({1, 2}), 2}, {ColumnSet::Of({2, 3}), 2},
                   {ColumnSet::Of({1, 3}), 2}};
  // Three two-group partitions tie. Comparing group member lists in order,
  // {1},{2,3} comes first since [1] is a prefix of [1,2].
  std::vector<ColumnSet> want = {ColumnSet::Of({1}), ColumnSet::Of({2, 3})};
  EXPECT_EQ(SelectPartition(cs), want);
}

std::vector<ColumnSet> BestPartitionByBell(const ColumnSet& r, const LevelWorkload& wl,
                                           uint64_t w, const TreeParams& p, const Schema& s,
                                           oracle::Cost* best_cost) {
  oracle::Cost best = -1;
  std::vector<ColumnSet> arg;
  int count = 0;
  oracle::ForEachPartition(r, [&](const std::vector<ColumnSet>& parts) {
    count++;
    oracle::Cost c = 0;
    for (const auto& g : parts) c += oracle::ScaledGroupCost(g, wl, w, p, s);
    if (best < 0 || c < best) {
      best = c;
      arg = parts;
    }
  });
  if (r.Size() == 4) EXPECT_EQ(count, 15);
  *best_cost = best;
  return arg;
}

TEST(SelectTest, TensionCase) {
  Schema s{4, 8};
  TreeParams p;
  p.B = 10;
  p.T = 2;
  ColumnSet r = ColumnSet::Range(1, 4);
  for (bool reads_dominate : {true, false}) {
    LevelWorkload wl;
    wl.ops.push_back({OpKind::kRead, r, reads_dominate ? 1000u : 1u, 0});
    wl.ops.push_back({OpKind::kScan, ColumnSet::Of({1}), 1, reads_dominate ? 100.0 : 1e6});
    wl.ops.push_back({OpKind::kScan, ColumnSet::Of({2}), 1, reads_dominate ? 100.0 : 1e6});
    auto prims = SplitAttributes(r, std::vector<ColumnSet>{r, ColumnSet::Of({1}), ColumnSet::Of({2})});
    auto sel = SelectPartition(MergeCandidates(prims, LevelOnly(wl, 0, p, s)));
    if (reads_dominate) {
      EXPECT_EQ(sel.size(), 1u);
    } else {
      EXPECT_EQ(sel.size(), 3u);
    }
    oracle::Cost best;
    BestPartitionByBell(r, wl, 0, p, s, &best);
    oracle::Cost got = 0;
    for (const auto& g : sel) got += oracle::ScaledGroupCost(g, wl, 0, p, s);
    EXPECT_TRUE(got == best);
  }
}

TEST(SelectTest, MatchesBellEnumerationOnRandomLevels) {
  std::mt19937_64 rng(17);
  Schema s{4, 8};
  TreeParams p;
  ColumnSet r = ColumnSet::Range(1, 4);
  for (int iter = 0; iter < 300; iter++) {
    p.B = 1 + rng() % 16;
    p.T = 2 + rng() % 6;
    LevelWorkload wl;
    std::vector<ColumnSet> projs;
    int n = 1 + rng() % 5;
    for (int k = 0; k < n; k++) {
      ColumnSet pr;
      while (pr.Empty()) {
        for (int c = 1; c <= 4; c++) {
          if (rng() % 2) pr.Add(c);
        }
      }
      OpKind kind = static_cast<OpKind>(rng() % 3);
      wl.ops.push_back({kind, pr, 1 + rng() % 50, kind == OpKind::kScan ? double(rng() % 5000) : 0});
      projs.push_back(pr);
    }
    uint64_t w = rng() % 500;
    auto sel = SelectPartition(MergeCandidates(SplitAttributes(r, projs), LevelOnly(wl, w, p, s)));
    oracle::Cost best;
    BestPartitionByBell(r, wl, w, p, s, &best);
    oracle::Cost got = 0;
    for (const auto& g : sel) got += oracle::ScaledGroupCost(g, wl, w, p, s);
    EXPECT_TRUE(got == best) << "iter " << iter;
  }
}

TEST(AdviseTest, EmptyWorkloadIsRow) {
  Schema s{6, 8};
  TreeParams p;
  p.L = 3;
  p.B = 4;
  WorkloadStats st;
  LayoutConfig lc = Advise(st, p, s);
  EXPECT_EQ(lc, LayoutConfig::Row(s, 3));
}

TEST(AdviseTest, FullRowPointReadsStayRow) {
  Schema s{6, 8};
  TreeParams p;
  p.L = 3;
  p.B = 4;
  WorkloadStats st;
  st.inserts = 100;
  for (int i = 0; i <= 3; i++) st.Add(i, OpKind::kRead, s.AllColumns(), 50);
  EXPECT_EQ(Advise(st, p, s), LayoutConfig::Row(s, 3));
}

TEST(AdviseTest, SingleColumnScansGoColumnar) {
  Schema s{6, 8};
  TreeParams p;
  p.L = 3;
  p.B = 4;
  WorkloadStats st;
  st.inserts = 10;
  for (int i = 0; i <= 3; i++) {
    for (int c = 1; c <= 6; c++) st.Add(i, OpKind::kScan, ColumnSet::Of({c}), 1, 10000.0 * (1 << i));
  }
  EXPECT_EQ(Advise(st, p, s), LayoutConfig::Column(s, 3));
}

TEST(AdviseTest, HtapShape) {
  // Reads of recent data at the top, scans over old data at the bottom.
  Schema s{30, 8};
  TreeParams p;
  p.T = 2;
  p.L = 7;
  p.B = 16;
  WorkloadStats st;
  st.inserts = 200000;
  const ColumnSet q2a = ColumnSet::Range(1, 30), q2b = ColumnSet::Range(16, 30);
  const ColumnSet q4 = ColumnSet::Range(21, 30), q5 = ColumnSet::Range(28, 30);
  uint64_t reads_a = 5000, reads_b = 5000;
  for (int i = 0; i <= 7; i++) {
    st.Add(i, OpKind::kRead, q2a, reads_a);
    st.Add(i, OpKind::kRead, q2b, reads_b);
    reads_a = reads_a / 3;
    reads_b = reads_b * 2 / 3;
    double cap = 4000.0 * (1 << i);
    st.Add(i, OpKind::kScan, q4, 12, 12 * cap * 0.05);
    st.Add(i, OpKind::kScan, q5, 12, 12 * cap * 0.5);
  }
  st.Add(0, OpKind::kUpdate, ColumnSet::Of({3}), 2000);
  AdviseReport rep;
  LayoutConfig lc = Advise(st, p, s, {}, &rep);
  ASSERT_TRUE(ValidateLayout(lc, s).ok()) << lc.ToText();
  EXPECT_EQ(rep.capped_subproblems, 0);
  // Upper levels are wider than lower ones.
  EXPECT_LE(lc.num_groups(1), lc.num_groups(7));
  EXPECT_GT(lc.num_groups(7), 1);
  for (int i = 1; i <= 7; i++) {
    for (const auto& g : lc.groups(i)) {
      // Atoms of this workload are 1-15, 16-20, 21-27, 28-30.
      for (const auto& atom : {ColumnSet::Range(1, 15), ColumnSet::Range(16, 20),
                               ColumnSet::Range(21, 27), ColumnSet::Range(28, 30)}) {
        EXPECT_TRUE(atom.IsSubsetOf(g) || !atom.Intersects(g));
      }
    }
  }
  // Exact optimum over containment chains.
  oracle::ChainOracle orc(st, p, s);
  (void)orc;
  double best_fixed = 1e300;
  for (int cg : {1, 2, 3, 5, 6, 10, 15, 30}) {
    best_fixed = std::min(best_fixed, WorkloadCost(LayoutConfig::Uniform(s, 7, cg), st, p, s));
  }
  EXPECT_LE(rep.modeled_cost, best_fixed);
}

TEST(AdviseTest, Deterministic) {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 20; iter++) {
    auto rc = oracle::MakeRandomCase(rng);
    EXPECT_EQ(Advise(rc.stats, rc.params, rc.schema), Advise(rc.stats, rc.params, rc.schema));
  }
}

TEST(AdviseTest, OracleOptimalSmall) {
  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 60; iter++) {
    auto rc = oracle::MakeRandomCase(rng);
    LayoutConfig lc = Advise(rc.stats, rc.params, rc.schema);
    ASSERT_TRUE(ValidateLayout(lc, rc.schema).ok());
    ASSERT_EQ(lc.L(), rc.params.L);
    oracle::ChainOracle orc(rc.stats, rc.params, rc.schema);
    oracle::Cost want = orc.Minimum();
    oracle::Cost got = oracle::ScaledLayoutCost(lc, rc.stats, rc.params, rc.schema);
    EXPECT_TRUE(got == want) << "iter " << iter << " got " << double(got) << " want "
                             << double(want) << "\n" << lc.ToText();
    if (rc.schema.num_columns <= 4 && rc.params.L <= 2) {
      EXPECT_TRUE(orc.MinimumByChains() == want);
    }
  }
}

TEST(AdviseTest, InsertWeightDiscouragesSplits) {
  Schema s{4, 8};
  TreeParams p;
  p.L = 2;
  p.B = 4;
  WorkloadStats st;
  st.inserts = 1000;
  for (int i = 0; i <= 2; i++) {
    st.Add(i, OpKind::kScan, ColumnSet::Of({1}), 1, 3000);
  }
  AdvisorOptions heavy;
  heavy.insert_weight = 100;
  EXPECT_GT(Advise(st, p, s).num_groups(2), 1);
  EXPECT_EQ(Advise(st, p, s, heavy).num_groups(2), 1);
}

TEST(AdviseTest, WideSchemaFinishesQuickly) {
  Schema s{100, 8};
  TreeParams p;
  p.T = 2;
  p.L = 8;
  p.B = 5;
  std::mt19937_64 rng(31);
  WorkloadStats st;
  st.inserts = 1000000;
  for (int i = 0; i <= 8; i++) {
    for (int k = 0; k < 6; k++) {
      int a = 1 + rng() % 100, b = 1 + rng() % 100;
      if (a > b) std::swap(a, b);
      OpKind kind = static_cast<OpKind>(rng() % 3);
      st.Add(i, kind, ColumnSet::Range(a, b), 1 + rng() % 1000,
             kind == OpKind::kScan ? double(rng() % 10000000) : 0);
    }
  }
  auto t0 = std::chrono::steady_clock::now();
  LayoutConfig lc = Advise(st, p, s);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_TRUE(ValidateLayout(lc, s).ok());
  EXPECT_LT(secs, 30);
}

}  // namespace
}  // namespace laser
