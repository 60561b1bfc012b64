#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "laser/bench/runner.h"
#include "laser/bench/workload.h"
#include "util/file.h"

using namespace laser;
using namespace laser::bench;

namespace {

struct Common {
  std::string spec_path;
  std::string layout = "row";
  std::string db;
  std::string report;
  std::string profile;
  uint64_t seed = 0;
  double scale = 1.0;
  bool deterministic = false;
  double shift_read = 0;
  int shift_scan = 0;
  int compaction_threads = 2;
};

void AddCommon(CLI::App* cmd, Common* c, bool needs_db) {
  cmd->add_option("--spec", c->spec_path, "workload spec file")->required();
  cmd->add_option("--layout", c->layout,
                  "layout file, or one of row, column, cgN, htap-simple");
  auto* db = cmd->add_option("--db", c->db, "database directory");
  if (needs_db) db->required();
  cmd->add_option("--seed", c->seed, "override the spec seed");
  cmd->add_option("--scale", c->scale, "multiply all operation counts");
  cmd->add_flag("--deterministic", c->deterministic,
                "single thread, inline flushes and compactions");
  cmd->add_option("--report", c->report, "write the run report CSV here");
  cmd->add_option("--profile", c->profile, "write steady-phase trace stats here");
  cmd->add_option("--shift-read", c->shift_read, "lower Q2a/Q2b recency means by this much");
  cmd->add_option("--shift-scan", c->shift_scan, "move Q4/Q5 projections this many columns left");
  cmd->add_option("--compaction-threads", c->compaction_threads, "background compaction workers");
}

Status PrepareSpec(const Common& c, WorkloadSpec* spec) {
  Status st = LoadSpec(c.spec_path, spec);
  if (!st.ok()) return st;
  if (c.seed != 0) spec->seed = c.seed;
  if (c.scale != 1.0) spec->Scale(c.scale);
  if (c.shift_read != 0) spec->ShiftReads(c.shift_read);
  if (c.shift_scan != 0) spec->ShiftScans(c.shift_scan);
  return spec->Validate();
}

Status ResolveLayout(const std::string& arg, const WorkloadSpec& spec, LayoutConfig* layout,
                     std::string* name) {
  TreeParams params;
  Status st = spec.MakeParams(&params);
  if (!st.ok()) return st;
  if (std::filesystem::exists(arg)) {
    std::string text;
    st = ReadFileToString(arg, &text);
    if (st.ok()) st = LayoutConfig::Parse(text, layout);
    if (!st.ok()) return st;
    *name = std::filesystem::path(arg).stem().string();
  } else {
    st = FixedLayout(arg, spec.schema(), params.L, layout);
    if (!st.ok()) return st;
    *name = arg;
  }
  if (layout->L() != params.L) {
    return Status::InvalidArgument("layout has " + std::to_string(layout->L()) +
                                   " levels, the spec needs " + std::to_string(params.L));
  }
  return ValidateLayout(*layout, spec.schema());
}

int Fail(const Status& st) {
  std::fprintf(stderr, "laser-bench: %s\n", st.ToString().c_str());
  return 1;
}

int Execute(const Common& c, bool load, bool steady) {
  RunConfig cfg;
  Status st = PrepareSpec(c, &cfg.spec);
  if (!st.ok()) return Fail(st);
  st = ResolveLayout(c.layout, cfg.spec, &cfg.layout, &cfg.layout_name);
  if (!st.ok()) return Fail(st);
  cfg.db_path = c.db;
  cfg.deterministic = c.deterministic;
  cfg.profile = !c.profile.empty();
  cfg.compaction_threads = c.compaction_threads;
  cfg.load = load;
  cfg.steady = steady;
  RunReport report;
  st = RunWorkload(cfg, &report);
  if (!c.report.empty()) {
    Status ws = WriteReport(report, c.report);
    if (!ws.ok()) return Fail(ws);
  }
  if (report.has_profile) {
    Status ws = ExportTraceStats(report.profile, c.profile);
    if (!ws.ok()) return Fail(ws);
  }
  std::printf("layout=%s load_rows=%llu load_s=%.2f steady_ops=%llu steady_s=%.2f "
              "block_reads=%llu compaction_blocks=%.0f cost=%.0f\n",
              report.layout_name.c_str(), (unsigned long long)report.load_rows,
              report.load_seconds, (unsigned long long)report.steady_ops, report.steady_seconds,
              (unsigned long long)report.BlockReads(), report.CompactionBlocks(),
              report.MeasuredCost());
  return st.ok() ? 0 : Fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSM column-group layout benchmark"};
  app.require_subcommand(1);

  Common load_opts, run_opts;
  auto* load = app.add_subcommand("load", "create a database and run the load phase");
  AddCommon(load, &load_opts, true);
  auto* run = app.add_subcommand(
      "run", "run the steady phase (loading first when the database is new)");
  AddCommon(run, &run_opts, true);

  std::vector<std::string> reports;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "rank run reports from the same spec");
  compare->add_option("reports", reports, "report CSV files")->required();
  compare->add_option("--out", compare_out, "write the ranking here instead of stdout");

  std::string preset = "desk", spec_out;
  auto* spec = app.add_subcommand("spec", "write a preset workload spec");
  spec->add_option("--preset", preset, "desk, paper-narrow or paper-wide")
      ->check(CLI::IsMember({"desk", "paper-narrow", "paper-wide"}));
  spec->add_option("--out", spec_out, "output file")->required();

  Common params_opts;
  std::string params_out;
  auto* params = app.add_subcommand("params", "write the tree params a spec implies");
  params->add_option("--spec", params_opts.spec_path, "workload spec file")->required();
  params->add_option("--scale", params_opts.scale, "multiply all operation counts");
  params->add_option("--out", params_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*load) return Execute(load_opts, true, false);
  if (*run) {
    bool fresh = !FileExists(run_opts.db + "/CURRENT");
    return Execute(run_opts, fresh, true);
  }
  if (*compare) {
    std::vector<RunReport> rs(reports.size());
    for (size_t i = 0; i < reports.size(); i++) {
      Status st = ReadReport(reports[i], &rs[i]);
      if (!st.ok()) return Fail(st);
    }
    std::string csv;
    Status st = CompareReports(rs, &csv);
    if (!st.ok()) return Fail(st);
    if (compare_out.empty()) {
      std::fputs(csv.c_str(), stdout);
      return 0;
    }
    st = WriteStringToFileSync(compare_out, csv);
    return st.ok() ? 0 : Fail(st);
  }
  if (*spec) {
    WorkloadSpec s;
    if (preset != "desk") {
      // Full-size runs: 400M loaded rows and 100x the desk query counts.
      s.columns = preset == "paper-narrow" ? 30 : 100;
      s.load_rows = 400000000;
      s.steady_inserts = 10000000;
      s.q2a_count = 500000;
      s.q2b_count = 500000;
      s.levels = 8;
    }
    Status st = WriteStringToFileSync(spec_out, FormatSpec(s));
    return st.ok() ? 0 : Fail(st);
  }
  if (*params) {
    WorkloadSpec s;
    Status st = PrepareSpec(params_opts, &s);
    TreeParams p;
    if (st.ok()) st = s.MakeParams(&p);
    if (st.ok()) st = WriteStringToFileSync(params_out, FormatTreeParams(s.schema(), p));
    return st.ok() ? 0 : Fail(st);
  }
  return 0;
}
