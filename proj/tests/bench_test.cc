#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "laser/bench/runner.h"
#include "laser/bench/workload.h"
#include "test_util.h"

namespace laser {
namespace bench {
namespace {

TEST(WorkloadSpecTest, DefaultProjectionsFollowWidth) {
  WorkloadSpec s;
  s.columns = 30;
  s.ResolveProjections();
  EXPECT_EQ(s.q2a_proj, ColumnSet::Range(1, 30));
  EXPECT_EQ(s.q2b_proj, ColumnSet::Range(16, 30));
  EXPECT_EQ(s.q4_proj, ColumnSet::Range(21, 30));
  EXPECT_EQ(s.q5_proj, ColumnSet::Range(28, 30));
  WorkloadSpec n;
  n.ResolveProjections();
  EXPECT_EQ(n.q2b_proj, ColumnSet::Range(5, 8));
  EXPECT_EQ(n.q5_proj, ColumnSet::Of({8}));
}

TEST(WorkloadSpecTest, TextRoundTrip) {
  WorkloadSpec s;
  s.columns = 30;
  s.q4_proj = ColumnSet::Of({2, 5, 9});
  s.q2b_mean = 0.8125;
  s.seed = 99;
  std::string text = FormatSpec(s);
  WorkloadSpec back;
  ASSERT_TRUE(ParseSpec(text, &back).ok());
  EXPECT_EQ(FormatSpec(back), text);
  EXPECT_EQ(SpecHash(back), SpecHash(s));
  back.seed = 100;
  EXPECT_NE(SpecHash(back), SpecHash(s));
}

TEST(WorkloadSpecTest, ParseErrors) {
  WorkloadSpec s;
  EXPECT_TRUE(ParseSpec("columns = 8\n", &s).IsInvalidArgument());
  EXPECT_TRUE(ParseSpec("laser-workload 2\n", &s).IsInvalidArgument());
  EXPECT_TRUE(ParseSpec("laser-workload 1\nbogus = 1\n", &s).IsInvalidArgument());
  EXPECT_TRUE(ParseSpec("laser-workload 1\nq2a_mean = 1.5\n", &s).IsInvalidArgument());
  EXPECT_TRUE(ParseSpec("laser-workload 1\nupdate_ratio = -1\n", &s).IsInvalidArgument());
  EXPECT_TRUE(ParseSpec("laser-workload 1\ncolumns = 4\nq4_proj = 3-6\n", &s).IsInvalidArgument());
  Status st = ParseSpec("laser-workload 1\n# comment\ncolumns = x\n", &s);
  EXPECT_NE(st.message().find("line 3"), std::string::npos);
  ASSERT_TRUE(ParseSpec("laser-workload 1\ncolumns = 12 # wide enough\n", &s).ok());
  EXPECT_EQ(s.columns, 12);
}

TEST(WorkloadSpecTest, ScaleAndShift) {
  WorkloadSpec s;
  s.Scale(0.01);
  EXPECT_EQ(s.load_rows, 40000u);
  EXPECT_EQ(s.steady_inserts, 1000u);
  EXPECT_EQ(s.q2a_count, 50u);
  EXPECT_EQ(s.q4_count, 1u);  // non-zero counts stay non-zero
  EXPECT_EQ(s.UpdateCount(), 10u);
  s.ShiftReads(0.5);
  EXPECT_DOUBLE_EQ(s.q2a_mean, 0.48);
  s.ShiftReads(0.9);
  EXPECT_DOUBLE_EQ(s.q2b_mean, 0.0);
  WorkloadSpec w;
  w.columns = 30;
  w.ShiftScans(5);
  EXPECT_EQ(w.q4_proj, ColumnSet::Range(16, 25));
  EXPECT_EQ(w.q5_proj, ColumnSet::Range(23, 25));
  w.ShiftScans(100);
  EXPECT_EQ(w.q4_proj, ColumnSet::Range(1, 10));
  w.ShiftScans(-100);
  EXPECT_EQ(w.q4_proj, ColumnSet::Range(21, 30));
}

TEST(WorkloadSpecTest, AutomaticTreeShape) {
  WorkloadSpec s;  // 4M + 100k rows, 8 columns, 6 levels
  TreeParams p;
  ASSERT_TRUE(s.MakeParams(&p).ok());
  EXPECT_EQ(p.B, 56);
  EXPECT_EQ(p.L, 6);
  // The last level holds at least half the rows.
  EXPECT_GE(p.LevelCapacity(6) * 2, s.TotalRows());
  EXPECT_LT(p.LevelCapacity(6) * 2, s.TotalRows() + 2 * 56 * 64);
  s.pg = 100;
  s.levels = 0;
  ASSERT_TRUE(s.MakeParams(&p).ok());
  EXPECT_EQ(p.pg, 100);
  int want = 0;
  ASSERT_TRUE(LevelsFor(s.TotalRows(), p, &want).ok());
  EXPECT_EQ(p.L, want);
}

TEST(KeyMapTest, BijectiveOnPrefix) {
  std::set<Key> seen;
  for (uint64_t i = 0; i < 200000; i++) {
    Key k = KeyForIndex(i);
    EXPECT_LT(k, kKeySpace);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 200000u);
  // Spread over the key space: each eighth gets about 1/8 of the keys.
  std::vector<int> buckets(8);
  for (Key k : seen) buckets[k / (kKeySpace / 8)]++;
  for (int b : buckets) EXPECT_NEAR(b, 25000, 1000);
}

std::string Stream(const WorkloadSpec& s, Phase phase) {
  WorkloadGenerator g(s, phase);
  std::string out;
  Operation op;
  while (g.Next(&op)) out += op.Encode();
  return out;
}

TEST(GeneratorTest, Deterministic) {
  WorkloadSpec s;
  s.Scale(0.005);
  EXPECT_EQ(Stream(s, Phase::kSteady), Stream(s, Phase::kSteady));
  EXPECT_EQ(Stream(s, Phase::kLoad), Stream(s, Phase::kLoad));
  WorkloadSpec t = s;
  t.seed = 2;
  EXPECT_NE(Stream(s, Phase::kSteady), Stream(t, Phase::kSteady));
}

TEST(GeneratorTest, LoadIsInsertsInIndexOrder) {
  WorkloadSpec s;
  s.load_rows = 1000;
  WorkloadGenerator g(s, Phase::kLoad);
  Operation op;
  uint64_t n = 0;
  while (g.Next(&op)) {
    ASSERT_EQ(op.query, QueryClass::kQ1);
    ASSERT_EQ(op.key, KeyForIndex(n));
    n++;
  }
  EXPECT_EQ(n, 1000u);
}

TEST(GeneratorTest, SteadyCountsAndShapes) {
  WorkloadSpec s;
  s.Scale(0.05);
  s.ResolveProjections();
  WorkloadGenerator g(s, Phase::kSteady);
  uint64_t counts[kNumQueryClasses] = {};
  uint64_t inserted = s.load_rows;
  Operation op;
  uint64_t first_read_pos = 0, pos = 0, last_insert_pos = 0;
  while (g.Next(&op)) {
    counts[int(op.query)]++;
    switch (op.query) {
      case QueryClass::kQ1:
        EXPECT_EQ(op.key, KeyForIndex(inserted++));
        last_insert_pos = pos;
        break;
      case QueryClass::kQ3:
        EXPECT_GE(op.column, 1);
        EXPECT_LE(op.column, s.columns);
        EXPECT_EQ(op.projection, ColumnSet::Of({op.column}));
        break;
      case QueryClass::kQ2a:
        EXPECT_EQ(op.projection, s.q2a_proj);
        if (first_read_pos == 0) first_read_pos = pos;
        break;
      case QueryClass::kQ2b:
        EXPECT_EQ(op.projection, s.q2b_proj);
        break;
      case QueryClass::kQ4:
      case QueryClass::kQ5: {
        double sel = op.query == QueryClass::kQ4 ? s.q4_selectivity : s.q5_selectivity;
        EXPECT_NEAR(double(op.hi - op.key + 1) / double(kKeySpace), sel, 1e-9);
        EXPECT_EQ(op.projection, op.query == QueryClass::kQ4 ? s.q4_proj : s.q5_proj);
        break;
      }
    }
    pos++;
  }
  EXPECT_EQ(counts[int(QueryClass::kQ1)], s.steady_inserts);
  EXPECT_EQ(counts[int(QueryClass::kQ3)], s.UpdateCount());
  EXPECT_EQ(counts[int(QueryClass::kQ2a)], s.q2a_count);
  EXPECT_EQ(counts[int(QueryClass::kQ2b)], s.q2b_count);
  EXPECT_EQ(counts[int(QueryClass::kQ4)], s.q4_count);
  EXPECT_EQ(counts[int(QueryClass::kQ5)], s.q5_count);
  // Inserts are spread over the whole phase, not front-loaded.
  EXPECT_GT(last_insert_pos, pos * 9 / 10);
  EXPECT_LT(first_read_pos, pos / 10);
}

TEST(GeneratorTest, RecencyDistribution) {
  WorkloadSpec s;
  s.load_rows = 1000000;
  s.steady_inserts = 0;
  s.q2a_count = 200000;
  s.q2b_count = 200000;
  s.q4_count = s.q5_count = 0;
  WorkloadGenerator g(s, Phase::kSteady);
  double sum[2] = {}, sq[2] = {};
  uint64_t n[2] = {};
  Operation op;
  while (g.Next(&op)) {
    int i = op.query == QueryClass::kQ2a ? 0 : 1;
    ASSERT_GE(op.recency, 0.0);
    ASSERT_LE(op.recency, 1.0);
    uint64_t idx = static_cast<uint64_t>(std::llround(op.recency * double(s.load_rows - 1)));
    ASSERT_EQ(op.key, KeyForIndex(idx));
    sum[i] += op.recency;
    sq[i] += op.recency * op.recency;
    n[i]++;
  }
  double means[2] = {0.98, 0.85};
  for (int i = 0; i < 2; i++) {
    double mean = sum[i] / double(n[i]);
    double sd = std::sqrt(sq[i] / double(n[i]) - mean * mean);
    EXPECT_NEAR(mean, means[i], 0.005) << i;
    EXPECT_NEAR(sd, 0.02, 0.005) << i;
  }
}

TEST(FixedLayoutTest, Names) {
  Schema s{30, 8};
  LayoutConfig lc;
  for (const char* name : {"row", "column", "cg3", "cg6", "cg15", "htap-simple"}) {
    ASSERT_TRUE(FixedLayout(name, s, 6, &lc).ok()) << name;
    EXPECT_TRUE(ValidateLayout(lc, s).ok()) << name;
    EXPECT_EQ(lc.L(), 6);
  }
  ASSERT_TRUE(FixedLayout("htap-simple", s, 6, &lc).ok());
  for (int i = 0; i <= 4; i++) EXPECT_EQ(lc.num_groups(i), 1);
  EXPECT_EQ(lc.num_groups(5), 30);
  EXPECT_EQ(lc.num_groups(6), 30);
  ASSERT_TRUE(FixedLayout("cg6", s, 2, &lc).ok());
  EXPECT_EQ(lc.num_groups(2), 5);
  EXPECT_FALSE(FixedLayout("cg0", s, 2, &lc).ok());
  EXPECT_FALSE(FixedLayout("diagonal", s, 2, &lc).ok());
}

WorkloadSpec TinySpec() {
  WorkloadSpec s;
  s.columns = 6;
  s.load_rows = 20000;
  s.steady_inserts = 4000;
  s.update_ratio = 0.05;
  s.q2a_count = 300;
  s.q2b_count = 300;
  s.q4_count = 3;
  s.q5_count = 2;
  s.levels = 3;
  s.block_size = 1024;
  return s;
}

Status RunTiny(const WorkloadSpec& spec, const std::string& layout_name, bool deterministic,
               RunReport* report, bool steady = true) {
  TempDir dir;
  RunConfig cfg;
  cfg.spec = spec;
  TreeParams p;
  Status st = spec.MakeParams(&p);
  if (!st.ok()) return st;
  st = FixedLayout(layout_name, spec.schema(), p.L, &cfg.layout);
  if (!st.ok()) return st;
  cfg.layout_name = layout_name;
  cfg.db_path = dir.path() + "/db";
  cfg.deterministic = deterministic;
  cfg.steady = steady;
  cfg.profile = true;
  return RunWorkload(cfg, report);
}

TEST(RunnerTest, DeterministicCountersRepeatAndMatchEngine) {
  RunReport a, b;
  ASSERT_TRUE(RunTiny(TinySpec(), "cg2", true, &a).ok());
  ASSERT_TRUE(RunTiny(TinySpec(), "cg2", true, &b).ok());
  EXPECT_FALSE(a.failed);
  EXPECT_GT(a.BlockReads(), 0u);
  EXPECT_EQ(a.stats.block_reads, b.stats.block_reads);
  EXPECT_EQ(a.stats.bytes_compacted_written, b.stats.bytes_compacted_written);
  EXPECT_EQ(a.result_checksum, b.result_checksum);
  uint64_t per_class = 0;
  for (const auto& c : a.classes) per_class += c.block_reads;
  EXPECT_EQ(per_class, a.BlockReads());
  EXPECT_EQ(a.classes[int(QueryClass::kQ1)].count, 4000u);
  EXPECT_EQ(a.classes[int(QueryClass::kQ3)].count, 200u);
  EXPECT_EQ(a.classes[int(QueryClass::kQ2a)].rows, 300u);  // every read key exists
  uint64_t timeline = 0;
  for (uint64_t x : a.insert_timeline) timeline += x;
  EXPECT_EQ(timeline, 4000u);
  ASSERT_TRUE(a.has_profile);
  EXPECT_EQ(a.profile.stats.inserts, 4000u);
}

TEST(RunnerTest, QueryResultsIndependentOfLayout) {
  RunReport row, col;
  ASSERT_TRUE(RunTiny(TinySpec(), "row", true, &row).ok());
  ASSERT_TRUE(RunTiny(TinySpec(), "column", true, &col).ok());
  EXPECT_EQ(row.result_checksum, col.result_checksum);
  EXPECT_GT(col.stats.bytes_compacted_written, row.stats.bytes_compacted_written);
  // Single-column scans touch less data in the columnar layout.
  EXPECT_LT(col.classes[int(QueryClass::kQ5)].block_reads,
            row.classes[int(QueryClass::kQ5)].block_reads);
}

TEST(RunnerTest, ConcurrentRun) {
  RunReport r;
  ASSERT_TRUE(RunTiny(TinySpec(), "cg3", false, &r).ok());
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.classes[int(QueryClass::kQ2a)].count, 300u);
  EXPECT_EQ(r.classes[int(QueryClass::kQ5)].count, 2u);
  EXPECT_EQ(r.steady_ops, 4000u + 200 + 600 + 5);
}

TEST(RunnerTest, LoadOnly) {
  WorkloadSpec s = TinySpec();
  s.steady_inserts = s.q2a_count = s.q2b_count = s.q4_count = s.q5_count = 0;
  RunReport r;
  ASSERT_TRUE(RunTiny(s, "row", true, &r).ok());
  EXPECT_EQ(r.load_rows, 20000u);
  EXPECT_EQ(r.steady_ops, 0u);
  EXPECT_EQ(r.BlockReads(), 0u);
}

TEST(RunnerTest, EngineErrorFlagsReport) {
  RunConfig cfg;
  cfg.spec = TinySpec();
  cfg.layout = LayoutConfig::Row(cfg.spec.schema(), 1);  // wrong level count
  cfg.db_path = "/nonexistent/dir/db";
  RunReport r;
  EXPECT_FALSE(RunWorkload(cfg, &r).ok());
  EXPECT_TRUE(r.failed);
  EXPECT_FALSE(r.error.empty());
}

TEST(ReportTest, CsvRoundTripAndCompare) {
  RunReport a;
  ASSERT_TRUE(RunTiny(TinySpec(), "cg2", true, &a).ok());
  std::string csv = a.ToCsv();
  RunReport back;
  ASSERT_TRUE(RunReport::FromCsv(csv, &back).ok());
  EXPECT_EQ(back.ToCsv(), csv);
  EXPECT_EQ(back.MeasuredCost(), a.MeasuredCost());

  std::string table;
  ASSERT_TRUE(CompareReports({a, back}, &table).ok());
  // Identical reports tie.
  EXPECT_EQ(table.find("\n1,cg2,"), table.find('\n'));
  EXPECT_NE(table.find("\n1,cg2,", table.find('\n') + 1), std::string::npos);

  RunReport other = a;
  other.spec_hash ^= 1;
  EXPECT_TRUE(CompareReports({a, other}, &table).IsInvalidArgument());
  EXPECT_TRUE(CompareReports({a}, &table).IsInvalidArgument());
  EXPECT_TRUE(RunReport::FromCsv("metric,value\nlayout,x\n", &back).IsCorruption());
}

}  // namespace
}  // namespace bench
}  // namespace laser
