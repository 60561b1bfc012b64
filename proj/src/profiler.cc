#include "laser/profiler.h"

#include <fstream>
#include <limits>
#include <sstream>

namespace laser {

namespace {
constexpr char kHeader[] = "laser-stats 1";

void AddChecked(uint64_t* dst, uint64_t v, bool* overflowed) {
  if (*dst > std::numeric_limits<uint64_t>::max() - v) {
    *dst = std::numeric_limits<uint64_t>::max();
    *overflowed = true;
  } else {
    *dst += v;
  }
}
}  // namespace

WorkloadProfiler::WorkloadProfiler(int num_columns, int num_levels)
    : num_columns_(num_columns), num_levels_(num_levels) {}

void WorkloadProfiler::RecordInsert(uint64_t n) {
  std::lock_guard<std::mutex> l(mu_);
  AddChecked(&inserts_, n, &overflowed_);
  ops_ += n;
}

void WorkloadProfiler::Bump(int level, OpKind kind, const ColumnSet& proj,
                            uint64_t selected) {
  Cell& c = cells_[CellKey{level, kind, proj}];
  AddChecked(&c.count, 1, &overflowed_);
  AddChecked(&c.selected, selected, &overflowed_);
}

void WorkloadProfiler::RecordRead(int deepest_level, const ColumnSet& projection) {
  std::lock_guard<std::mutex> l(mu_);
  ops_++;
  for (int i = 0; i <= deepest_level && i < num_levels_; i++) {
    Bump(i, OpKind::kRead, projection, 0);
  }
}

void WorkloadProfiler::RecordUpdate(int deepest_level, const ColumnSet& projection) {
  std::lock_guard<std::mutex> l(mu_);
  ops_++;
  for (int i = 0; i <= deepest_level && i < num_levels_; i++) {
    Bump(i, OpKind::kUpdate, projection, 0);
  }
}

void WorkloadProfiler::RecordScan(const ColumnSet& projection,
                                  std::span<const uint64_t> emitted) {
  std::lock_guard<std::mutex> l(mu_);
  ops_++;
  for (int i = 0; i < num_levels_; i++) {
    Bump(i, OpKind::kScan, projection, i < static_cast<int>(emitted.size()) ? emitted[i] : 0);
  }
}

void WorkloadProfiler::Record(OpKind kind, std::span<const int> levels,
                              const ColumnSet& projection,
                              std::span<const uint64_t> selected) {
  std::lock_guard<std::mutex> l(mu_);
  ops_++;
  for (size_t k = 0; k < levels.size(); k++) {
    if (levels[k] < 0 || levels[k] >= num_levels_) continue;
    Bump(levels[k], kind, projection, k < selected.size() ? selected[k] : 0);
  }
}

void WorkloadProfiler::SetSeqWindow(SeqNo first, SeqNo last) {
  std::lock_guard<std::mutex> l(mu_);
  first_seq_ = first;
  last_seq_ = last;
}

TraceStats WorkloadProfiler::Snapshot() const {
  std::lock_guard<std::mutex> l(mu_);
  TraceStats t;
  t.num_columns = num_columns_;
  t.num_levels = num_levels_;
  t.window_ops = ops_;
  t.window_first_seq = first_seq_;
  t.window_last_seq = last_seq_;
  t.overflowed = overflowed_;
  t.stats.inserts = inserts_;
  for (const auto& [k, c] : cells_) {
    t.stats.Add(k.level, k.kind, k.proj, c.count, double(c.selected));
  }
  t.stats.Canonicalize();
  return t;
}

void WorkloadProfiler::Reset() {
  std::lock_guard<std::mutex> l(mu_);
  inserts_ = ops_ = 0;
  first_seq_ = last_seq_ = 0;
  overflowed_ = false;
  cells_.clear();
}

std::string FormatTraceStats(const TraceStats& t) {
  std::ostringstream os;
  os.precision(17);
  os << kHeader << '\n';
  os << "columns " << t.num_columns << '\n';
  os << "levels " << t.num_levels << '\n';
  os << "inserts " << t.stats.inserts << '\n';
  os << "window " << t.window_ops << ' ' << t.window_first_seq << ' ' << t.window_last_seq
     << '\n';
  if (t.overflowed) os << "overflowed\n";
  for (size_t i = 0; i < t.stats.levels.size(); i++) {
    for (const auto& r : t.stats.levels[i].ops) {
      os << i << ' ' << OpKindName(r.kind) << ' ' << r.projection.ToString() << ' '
         << r.count << ' ' << r.selected << '\n';
    }
  }
  return os.str();
}

Status ParseTraceStats(const std::string& text, TraceStats* out) {
  TraceStats t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto err = [&](const std::string& what) {
    return Status::Corruption("stats line " + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(in, line) || line != kHeader) {
    lineno = 1;
    return err("missing header '" + std::string(kHeader) + "'");
  }
  lineno = 1;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "columns") {
      if (!(ls >> t.num_columns)) return err("bad column count");
    } else if (first == "levels") {
      if (!(ls >> t.num_levels)) return err("bad level count");
    } else if (first == "inserts") {
      if (!(ls >> t.stats.inserts)) return err("bad insert count");
    } else if (first == "window") {
      if (!(ls >> t.window_ops >> t.window_first_seq >> t.window_last_seq)) {
        return err("bad window");
      }
    } else if (first == "overflowed") {
      t.overflowed = true;
    } else {
      int level;
      try {
        size_t used = 0;
        level = std::stoi(first, &used);
        if (used != first.size() || level < 0) return err("bad level '" + first + "'");
      } catch (...) {
        return err("bad level '" + first + "'");
      }
      std::string kind, proj;
      uint64_t count;
      double selected;
      if (!(ls >> kind >> proj >> count >> selected)) return err("incomplete record");
      OpKind k;
      if (!ParseOpKind(kind, &k)) return err("bad op kind '" + kind + "'");
      ColumnSet p;
      if (!ColumnSet::Parse(proj, &p)) return err("bad projection '" + proj + "'");
      if (t.num_columns > 0 && !p.IsSubsetOf(ColumnSet::Range(1, t.num_columns))) {
        return err("projection outside schema '" + proj + "'");
      }
      if (t.num_levels > 0 && level >= t.num_levels) return err("level out of range");
      t.stats.Add(level, k, p, count, selected);
      continue;
    }
    std::string rest;
    if (ls >> rest) return err("trailing token '" + rest + "'");
  }
  t.stats.Canonicalize();
  *out = std::move(t);
  return Status::OK();
}

Status ExportTraceStats(const TraceStats& t, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) return Status::IOError("cannot open " + path);
  f << FormatTraceStats(t);
  f.close();
  if (!f) return Status::IOError("write failed: " + path);
  return Status::OK();
}

Status ImportTraceStats(const std::string& path, TraceStats* out) {
  std::ifstream f(path);
  if (!f) return Status::IOError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseTraceStats(ss.str(), out);
}

}  // namespace laser
