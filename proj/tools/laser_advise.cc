#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "laser/advisor.h"
#include "laser/profiler.h"
#include "util/file.h"

using namespace laser;

int main(int argc, char** argv) {
  CLI::App app{"Choose per-level column groups for a recorded workload"};
  std::string stats_path, params_path, out_path;
  AdvisorOptions opts;
  app.add_option("--stats", stats_path, "trace stats file")->required();
  app.add_option("--params", params_path, "tree params file")->required();
  app.add_option("--out", out_path, "layout output file (stdout when omitted)");
  app.add_option("--insert-weight", opts.insert_weight, "weight of the insert term");
  app.add_option("--max-exact", opts.max_exact_primitives,
                 "primitive count above which only contiguous merges are tried");
  CLI11_PARSE(app, argc, argv);

  auto fail = [](const Status& st) {
    std::fprintf(stderr, "laser-advise: %s\n", st.ToString().c_str());
    return 1;
  };
  TraceStats trace;
  Status st = ImportTraceStats(stats_path, &trace);
  if (!st.ok()) return fail(st);
  std::string text;
  st = ReadFileToString(params_path, &text);
  Schema schema;
  TreeParams params;
  if (st.ok()) st = ParseTreeParams(text, &schema, &params);
  if (!st.ok()) return fail(st);
  if (trace.num_columns != schema.num_columns) {
    return fail(Status::InvalidArgument("stats and params disagree on the column count"));
  }
  if (trace.num_levels > params.L + 1) {
    return fail(Status::InvalidArgument("stats cover more levels than the params"));
  }

  auto t0 = std::chrono::steady_clock::now();
  AdviseReport report;
  LayoutConfig layout = Advise(trace.stats, params, schema, opts, &report);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "modeled cost %.6g, %d subproblems (%d capped), %.3f s\n",
               report.modeled_cost, report.subproblems, report.capped_subproblems, secs);
  if (out_path.empty()) {
    std::fputs(layout.ToText().c_str(), stdout);
    return 0;
  }
  st = WriteStringToFileSync(out_path, layout.ToText());
  return st.ok() ? 0 : fail(st);
}
