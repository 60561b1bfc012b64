#include "laser/bench/runner.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "util/file.h"
#include "util/hash.h"

namespace laser {
namespace bench {

Status FixedLayout(const std::string& name, const Schema& schema, int L, LayoutConfig* out) {
  if (name == "row") {
    *out = LayoutConfig::Row(schema, L);
  } else if (name == "column") {
    *out = LayoutConfig::Column(schema, L);
  } else if (name.rfind("cg", 0) == 0 && name.size() > 2) {
    int cg = std::atoi(name.c_str() + 2);
    if (cg < 1 || cg > schema.num_columns) return Status::InvalidArgument("bad cg size in " + name);
    *out = LayoutConfig::Uniform(schema, L, cg);
  } else if (name == "htap-simple") {
    std::vector<std::vector<ColumnSet>> levels(L + 1);
    for (int i = 0; i <= L; i++) {
      if (i >= 1 && i > L - 2) {
        for (int c = 1; c <= schema.num_columns; c++) levels[i].push_back(ColumnSet::Of({c}));
      } else {
        levels[i].push_back(schema.AllColumns());
      }
    }
    *out = LayoutConfig(std::move(levels));
  } else {
    return Status::InvalidArgument("unknown layout '" + name + "'");
  }
  return Status::OK();
}

Options MakeOptions(const WorkloadSpec& spec, const TreeParams& params,
                    const LayoutConfig& layout, bool deterministic, bool profile,
                    int compaction_threads) {
  Options o;
  o.schema = spec.schema();
  o.params = params;
  o.layout = layout;
  o.deterministic = deterministic;
  o.enable_profiler = profile;
  o.compaction_threads = compaction_threads;
  return o;
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

struct ClassSamples {
  uint64_t count = 0;
  uint64_t blocks = 0;
  uint64_t rows = 0;
  std::vector<float> us;

  void Merge(const ClassSamples& o) {
    count += o.count;
    blocks += o.blocks;
    rows += o.rows;
    us.insert(us.end(), o.us.begin(), o.us.end());
  }
};

ClassSummary Summarize(ClassSamples& s) {
  ClassSummary out;
  out.count = s.count;
  out.block_reads = s.blocks;
  out.rows = s.rows;
  if (!s.us.empty()) {
    double sum = 0;
    for (float v : s.us) sum += v;
    out.mean_us = sum / double(s.us.size());
    auto q = [&](double p) {
      size_t i = std::min(s.us.size() - 1, static_cast<size_t>(p * double(s.us.size())));
      std::nth_element(s.us.begin(), s.us.begin() + i, s.us.end());
      return double(s.us[i]);
    };
    out.p50_us = q(0.50);
    out.p99_us = q(0.99);
  }
  return out;
}

// Executes one operation; `checksum` folds query results.
class Executor {
 public:
  Executor(DB* db, const WorkloadSpec& spec) : db_(db), spec_(spec) {
    row_.resize(spec.columns);
  }

  Status Run(const Operation& op, ClassSamples* samples, uint64_t* checksum) {
    QueryTrace trace;
    ReadOptions ro;
    ro.trace = &trace;
    WriteOptions wo;
    Status st;
    uint64_t rows = 0;
    auto t0 = Clock::now();
    switch (op.query) {
      case QueryClass::kQ1:
        for (int c = 1; c <= spec_.columns; c++) row_[c - 1] = InsertValue(op.key, c);
        st = db_->Insert(wo, op.key, row_);
        break;
      case QueryClass::kQ3: {
        ColumnValue cv{op.column, op.value};
        st = db_->Update(wo, op.key, std::span<const ColumnValue>(&cv, 1));
        break;
      }
      case QueryClass::kQ2a:
      case QueryClass::kQ2b: {
        RowResult r;
        st = db_->Read(ro, op.key, op.projection, &r);
        if (st.ok()) {
          rows = 1;
          op.projection.ForEach([&](ColumnId c) {
            auto v = r.Get(c);
            if (v) *checksum += Hash64(uint64_t(*v) ^ uint64_t(c));
          });
        } else if (st.IsNotFound()) {
          st = Status::OK();
        }
        break;
      }
      case QueryClass::kQ4:
      case QueryClass::kQ5: {
        auto it = db_->Scan(ro, op.key, op.hi, op.projection);
        int64_t sum = 0;
        int64_t mx = INT64_MIN;
        for (; it->Valid(); it->Next()) {
          const RowResult& r = it->row();
          rows++;
          r.projection.ForEach([&](ColumnId c) {
            auto v = r.Get(c);
            if (!v) return;
            sum += *v >> 16;
            mx = std::max<int64_t>(mx, *v);
          });
        }
        st = it->status();
        *checksum += Hash64(op.query == QueryClass::kQ4 ? uint64_t(sum) : uint64_t(mx));
        break;
      }
    }
    auto t1 = Clock::now();
    samples->count++;
    samples->rows += rows;
    samples->blocks += trace.Total();
    samples->us.push_back(static_cast<float>(std::chrono::duration<double, std::micro>(t1 - t0).count()));
    return st;
  }

 private:
  DB* db_;
  const WorkloadSpec& spec_;
  std::vector<Value> row_;
};

bool IsWrite(QueryClass q) { return q == QueryClass::kQ1 || q == QueryClass::kQ3; }

Status RunLoad(DB* db, const RunConfig& cfg, RunReport* report) {
  auto t0 = Clock::now();
  WorkloadGenerator gen(cfg.spec, Phase::kLoad);
  WriteBatch batch;
  std::vector<Value> row(cfg.spec.columns);
  Operation op;
  Status st;
  while (gen.Next(&op)) {
    for (int c = 1; c <= cfg.spec.columns; c++) row[c - 1] = InsertValue(op.key, c);
    batch.Insert(op.key, row);
    if (batch.Count() >= cfg.load_batch) {
      st = db->Write(WriteOptions(), batch);
      if (!st.ok()) return st;
      batch.Clear();
    }
  }
  if (batch.Count() > 0) st = db->Write(WriteOptions(), batch);
  if (st.ok()) st = db->Flush();
  if (st.ok()) st = db->WaitForIdle();
  report->load_rows = cfg.spec.load_rows;
  report->load_seconds = Seconds(t0, Clock::now());
  return st;
}

Status RunSteadyDeterministic(DB* db, const RunConfig& cfg, ClassSamples* samples,
                              RunReport* report) {
  WorkloadGenerator gen(cfg.spec, Phase::kSteady);
  Executor ex(db, cfg.spec);
  Operation op;
  auto t0 = Clock::now();
  while (gen.Next(&op)) {
    Status st = ex.Run(op, &samples[int(op.query)], &report->result_checksum);
    if (!st.ok()) return st;
    report->steady_ops++;
    if (op.query == QueryClass::kQ1) {
      size_t sec = static_cast<size_t>(Seconds(t0, Clock::now()));
      if (report->insert_timeline.size() <= sec) report->insert_timeline.resize(sec + 1);
      report->insert_timeline[sec]++;
    }
  }
  return Status::OK();
}

// One writer thread replays Q1/Q3 in order; reader threads take Q2/Q4/Q5
// from a shared cursor and wait until the writes generated before them are
// applied.
Status RunSteadyConcurrent(DB* db, const RunConfig& cfg, ClassSamples* samples,
                           RunReport* report) {
  struct ReadOp {
    Operation op;
    uint64_t writes_before;
  };
  std::vector<Operation> writes;
  std::vector<ReadOp> reads;
  {
    WorkloadGenerator gen(cfg.spec, Phase::kSteady);
    Operation op;
    while (gen.Next(&op)) {
      if (IsWrite(op.query)) {
        writes.push_back(op);
      } else {
        reads.push_back({op, writes.size()});
      }
    }
  }
  std::atomic<uint64_t> writes_done{0};
  std::atomic<size_t> next_read{0};
  std::atomic<bool> abort{false};
  int nreaders = cfg.spec.reader_threads;
  std::vector<std::vector<ClassSamples>> per_thread(nreaders + 1,
                                                    std::vector<ClassSamples>(kNumQueryClasses));
  std::vector<uint64_t> checksums(nreaders + 1, 0);
  std::vector<Status> errors(nreaders + 1);
  auto t0 = Clock::now();

  std::thread writer([&] {
    Executor ex(db, cfg.spec);
    for (const Operation& op : writes) {
      if (abort.load()) break;
      Status st = ex.Run(op, &per_thread[0][int(op.query)], &checksums[0]);
      if (!st.ok()) {
        errors[0] = st;
        abort = true;
        break;
      }
      if (op.query == QueryClass::kQ1) {
        size_t sec = static_cast<size_t>(Seconds(t0, Clock::now()));
        if (report->insert_timeline.size() <= sec) report->insert_timeline.resize(sec + 1);
        report->insert_timeline[sec]++;
      }
      writes_done.fetch_add(1, std::memory_order_release);
    }
  });
  std::vector<std::thread> readers;
  for (int t = 1; t <= nreaders; t++) {
    readers.emplace_back([&, t] {
      Executor ex(db, cfg.spec);
      for (;;) {
        size_t i = next_read.fetch_add(1);
        if (i >= reads.size() || abort.load()) break;
        while (writes_done.load(std::memory_order_acquire) < reads[i].writes_before &&
               !abort.load()) {
          std::this_thread::yield();
        }
        const Operation& op = reads[i].op;
        Status st = ex.Run(op, &per_thread[t][int(op.query)], &checksums[t]);
        if (!st.ok()) {
          errors[t] = st;
          abort = true;
          break;
        }
      }
    });
  }
  writer.join();
  for (auto& r : readers) r.join();
  for (int t = 0; t <= nreaders; t++) {
    for (int q = 0; q < kNumQueryClasses; q++) samples[q].Merge(per_thread[t][q]);
    report->result_checksum += checksums[t];
  }
  for (int q = 0; q < kNumQueryClasses; q++) report->steady_ops += samples[q].count;
  for (const Status& st : errors) {
    if (!st.ok()) return st;
  }
  return Status::OK();
}

}  // namespace

Status RunWorkload(const RunConfig& cfg, RunReport* report) {
  *report = RunReport();
  report->spec_hash = SpecHash(cfg.spec);
  report->layout_name = cfg.layout_name;
  report->layout_text = cfg.layout.ToText();
  report->deterministic = cfg.deterministic;
  report->block_size = cfg.spec.block_size;
  auto fail = [&](const Status& st) {
    report->failed = true;
    report->error = st.ToString();
    return st;
  };

  Status st = cfg.spec.Validate();
  if (!st.ok()) return fail(st);
  TreeParams params;
  st = cfg.spec.MakeParams(&params);
  if (!st.ok()) return fail(st);
  Options options = MakeOptions(cfg.spec, params, cfg.layout, cfg.deterministic, cfg.profile,
                                cfg.compaction_threads);
  std::unique_ptr<DB> db;
  st = DB::Open(options, cfg.db_path, &db);
  if (!st.ok()) return fail(st);

  if (cfg.load) {
    st = RunLoad(db.get(), cfg, report);
    if (!st.ok()) return fail(st);
  }
  if (!cfg.steady) {
    report->stats = db->GetStatistics();
    return Status::OK();
  }

  db->ResetCounters();
  db->ResetProfile();
  ClassSamples samples[kNumQueryClasses];
  auto t0 = Clock::now();
  st = cfg.deterministic ? RunSteadyDeterministic(db.get(), cfg, samples, report)
                         : RunSteadyConcurrent(db.get(), cfg, samples, report);
  if (st.ok()) st = db->WaitForIdle();
  report->steady_seconds = Seconds(t0, Clock::now());
  for (int q = 0; q < kNumQueryClasses; q++) report->classes[q] = Summarize(samples[q]);
  uint64_t inserts = report->classes[int(QueryClass::kQ1)].count;
  if (report->steady_seconds > 0) report->insert_throughput = double(inserts) / report->steady_seconds;
  report->stats = db->GetStatistics();
  if (cfg.profile) {
    report->profile = db->GetProfile();
    report->has_profile = true;
  }
  if (!st.ok()) return fail(st);
  return Status::OK();
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Splits one CSV record starting at `pos`; advances past its newline.
bool ReadCsvRecord(const std::string& text, size_t* pos, std::vector<std::string>* fields) {
  fields->clear();
  if (*pos >= text.size()) return false;
  std::string cur;
  bool quoted = false;
  size_t i = *pos;
  for (; i < text.size(); i++) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields->push_back(cur);
      cur.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields->push_back(cur);
  *pos = i + 1;
  return true;
}

std::string Num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr - buf);
}

}  // namespace

std::string RunReport::ToCsv() const {
  std::vector<std::pair<std::string, std::string>> rows;
  auto add = [&](const std::string& k, const std::string& v) { rows.emplace_back(k, v); };
  auto addn = [&](const std::string& k, double v) { add(k, Num(v)); };
  auto addu = [&](const std::string& k, uint64_t v) { add(k, std::to_string(v)); };
  add("spec_hash", std::to_string(spec_hash));
  add("layout", layout_name);
  add("layout_text", layout_text);
  addu("deterministic", deterministic);
  addu("failed", failed);
  add("error", error);
  addu("block_size", uint64_t(block_size));
  addu("load_rows", load_rows);
  addn("load_seconds", load_seconds);
  addu("steady_ops", steady_ops);
  addn("steady_seconds", steady_seconds);
  addn("insert_throughput", insert_throughput);
  std::string tl;
  for (size_t i = 0; i < insert_timeline.size(); i++) {
    if (i) tl += ' ';
    tl += std::to_string(insert_timeline[i]);
  }
  add("insert_timeline", tl);
  for (int q = 0; q < kNumQueryClasses; q++) {
    std::string p = QueryClassName(QueryClass(q));
    const ClassSummary& c = classes[q];
    addu(p + ".count", c.count);
    addu(p + ".block_reads", c.block_reads);
    addu(p + ".rows", c.rows);
    addn(p + ".mean_us", c.mean_us);
    addn(p + ".p50_us", c.p50_us);
    addn(p + ".p99_us", c.p99_us);
  }
  addu("result_checksum", result_checksum);
  addu("block_reads", BlockReads());
  addu("bytes_flushed", stats.bytes_flushed);
  addu("bytes_compacted_read", stats.bytes_compacted_read);
  addu("bytes_compacted_written", stats.bytes_compacted_written);
  addu("flushes", stats.flushes);
  addu("compactions", stats.compactions);
  addu("write_stalls", stats.write_stalls);
  addu("write_stall_micros", stats.write_stall_micros);
  addu("last_seq", stats.last_seq);
  addn("measured_cost", MeasuredCost());
  for (size_t l = 0; l < stats.block_reads.size(); l++) {
    for (size_t g = 0; g < stats.block_reads[l].size(); g++) {
      addu("block_reads." + std::to_string(l) + "." + std::to_string(g), stats.block_reads[l][g]);
    }
  }
  for (const LevelSummary& lv : stats.levels) {
    std::string p = "level." + std::to_string(lv.level);
    addu(p + ".files", lv.files);
    addu(p + ".entries", lv.entries);
    addu(p + ".file_bytes", lv.file_bytes);
    addn(p + ".age_p10", lv.age_p10);
    addn(p + ".age_median", lv.age_median);
    addn(p + ".age_p90", lv.age_p90);
  }
  std::string out = "metric,value\n";
  for (const auto& [k, v] : rows) out += CsvField(k) + "," + CsvField(v) + "\n";
  return out;
}

Status RunReport::FromCsv(const std::string& text, RunReport* out) {
  RunReport r;
  size_t pos = 0;
  std::vector<std::string> f;
  if (!ReadCsvRecord(text, &pos, &f) || f.size() != 2 || f[0] != "metric") {
    return Status::Corruption("report: missing header");
  }
  std::map<std::string, std::string> kv;
  while (ReadCsvRecord(text, &pos, &f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 2) return Status::Corruption("report: bad row");
    kv[f[0]] = f[1];
  }
  auto u = [&](const std::string& k) -> uint64_t {
    auto it = kv.find(k);
    return it == kv.end() ? 0 : std::strtoull(it->second.c_str(), nullptr, 10);
  };
  auto d = [&](const std::string& k) -> double {
    auto it = kv.find(k);
    return it == kv.end() ? 0 : std::strtod(it->second.c_str(), nullptr);
  };
  if (!kv.count("spec_hash")) return Status::Corruption("report: no spec_hash");
  r.spec_hash = u("spec_hash");
  r.layout_name = kv["layout"];
  r.layout_text = kv["layout_text"];
  r.deterministic = u("deterministic") != 0;
  r.failed = u("failed") != 0;
  r.error = kv["error"];
  r.block_size = static_cast<int>(u("block_size"));
  if (r.block_size <= 0) return Status::Corruption("report: bad block_size");
  r.load_rows = u("load_rows");
  r.load_seconds = d("load_seconds");
  r.steady_ops = u("steady_ops");
  r.steady_seconds = d("steady_seconds");
  r.insert_throughput = d("insert_throughput");
  std::istringstream tl(kv["insert_timeline"]);
  uint64_t x;
  while (tl >> x) r.insert_timeline.push_back(x);
  for (int q = 0; q < kNumQueryClasses; q++) {
    std::string p = QueryClassName(QueryClass(q));
    ClassSummary& c = r.classes[q];
    c.count = u(p + ".count");
    c.block_reads = u(p + ".block_reads");
    c.rows = u(p + ".rows");
    c.mean_us = d(p + ".mean_us");
    c.p50_us = d(p + ".p50_us");
    c.p99_us = d(p + ".p99_us");
  }
  r.result_checksum = u("result_checksum");
  r.stats.bytes_flushed = u("bytes_flushed");
  r.stats.bytes_compacted_read = u("bytes_compacted_read");
  r.stats.bytes_compacted_written = u("bytes_compacted_written");
  r.stats.flushes = u("flushes");
  r.stats.compactions = u("compactions");
  r.stats.write_stalls = u("write_stalls");
  r.stats.write_stall_micros = u("write_stall_micros");
  r.stats.last_seq = u("last_seq");
  for (const auto& [k, v] : kv) {
    unsigned l, g;
    char tail;
    if (std::sscanf(k.c_str(), "block_reads.%u.%u%c", &l, &g, &tail) == 2) {
      if (r.stats.block_reads.size() <= l) r.stats.block_reads.resize(l + 1);
      if (r.stats.block_reads[l].size() <= g) r.stats.block_reads[l].resize(g + 1);
      r.stats.block_reads[l][g] = std::strtoull(v.c_str(), nullptr, 10);
    }
  }
  for (int l = 0;; l++) {
    std::string p = "level." + std::to_string(l);
    if (!kv.count(p + ".files")) break;
    LevelSummary lv;
    lv.level = l;
    lv.files = u(p + ".files");
    lv.entries = u(p + ".entries");
    lv.file_bytes = u(p + ".file_bytes");
    lv.age_p10 = d(p + ".age_p10");
    lv.age_median = d(p + ".age_median");
    lv.age_p90 = d(p + ".age_p90");
    r.stats.levels.push_back(lv);
  }
  if (r.BlockReads() != u("block_reads")) return Status::Corruption("report: block reads disagree");
  *out = std::move(r);
  return Status::OK();
}

Status WriteReport(const RunReport& r, const std::string& path) {
  return WriteStringToFileSync(path, r.ToCsv());
}

Status ReadReport(const std::string& path, RunReport* out) {
  std::string text;
  Status st = ReadFileToString(path, &text);
  if (!st.ok()) return st;
  return RunReport::FromCsv(text, out);
}

Status CompareReports(const std::vector<RunReport>& reports, std::string* csv) {
  if (reports.size() < 2) return Status::InvalidArgument("need at least two reports");
  for (const RunReport& r : reports) {
    if (r.spec_hash != reports[0].spec_hash) {
      return Status::InvalidArgument("reports come from different workload specs");
    }
  }
  std::vector<size_t> order(reports.size());
  for (size_t i = 0; i < order.size(); i++) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return reports[a].MeasuredCost() < reports[b].MeasuredCost();
  });
  std::ostringstream os;
  os << "rank,layout,failed,total_cost,block_reads,compaction_blocks";
  for (int q = 0; q < kNumQueryClasses; q++) {
    std::string p = QueryClassName(QueryClass(q));
    os << "," << p << "_block_reads," << p << "_mean_us," << p << "_p50_us," << p << "_p99_us";
  }
  os << ",insert_throughput,steady_seconds\n";
  int rank = 0;
  double prev = -1;
  for (size_t i = 0; i < order.size(); i++) {
    const RunReport& r = reports[order[i]];
    if (i == 0 || r.MeasuredCost() != prev) rank = static_cast<int>(i) + 1;
    prev = r.MeasuredCost();
    os << rank << "," << CsvField(r.layout_name) << "," << (r.failed ? 1 : 0) << ","
       << Num(r.MeasuredCost()) << "," << r.BlockReads() << "," << Num(r.CompactionBlocks());
    for (int q = 0; q < kNumQueryClasses; q++) {
      const ClassSummary& c = r.classes[q];
      os << "," << c.block_reads << "," << Num(c.mean_us) << "," << Num(c.p50_us) << ","
         << Num(c.p99_us);
    }
    os << "," << Num(r.insert_throughput) << "," << Num(r.steady_seconds) << "\n";
  }
  *csv = os.str();
  return Status::OK();
}

}  // namespace bench
}  // namespace laser
