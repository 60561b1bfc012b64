#include "laser/bench/workload.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "util/file.h"
#include "util/hash.h"

namespace laser {
namespace bench {

const char* QueryClassName(QueryClass q) {
  switch (q) {
    case QueryClass::kQ1: return "q1";
    case QueryClass::kQ2a: return "q2a";
    case QueryClass::kQ2b: return "q2b";
    case QueryClass::kQ3: return "q3";
    case QueryClass::kQ4: return "q4";
    case QueryClass::kQ5: return "q5";
  }
  return "?";
}

Schema WorkloadSpec::schema() const {
  Schema s;
  s.num_columns = columns;
  s.dt_size = dt_size;
  return s;
}

void WorkloadSpec::ResolveProjections() {
  int c = columns;
  if (c < 1) return;
  if (q2a_proj.Empty()) q2a_proj = ColumnSet::Range(1, c);
  if (q2b_proj.Empty()) q2b_proj = ColumnSet::Range(c / 2 + 1, c);
  if (q4_proj.Empty()) q4_proj = ColumnSet::Range(2 * c / 3 + 1, c);
  if (q5_proj.Empty()) q5_proj = ColumnSet::Range(c - (c + 9) / 10 + 1, c);
}

namespace {

uint64_t ScaleCount(uint64_t n, double f) {
  if (n == 0) return 0;
  return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(double(n) * f)));
}

}  // namespace

void WorkloadSpec::Scale(double f) {
  load_rows = ScaleCount(load_rows, f);
  steady_inserts = ScaleCount(steady_inserts, f);
  q2a_count = ScaleCount(q2a_count, f);
  q2b_count = ScaleCount(q2b_count, f);
  q4_count = ScaleCount(q4_count, f);
  q5_count = ScaleCount(q5_count, f);
}

void WorkloadSpec::ShiftReads(double offset) {
  q2a_mean = std::clamp(q2a_mean - offset, 0.0, 1.0);
  q2b_mean = std::clamp(q2b_mean - offset, 0.0, 1.0);
}

void WorkloadSpec::ShiftScans(int offset) {
  ResolveProjections();
  auto shift = [&](ColumnSet p) {
    int first = p.First();
    int move = std::min(offset, first - 1);
    if (offset < 0) {
      int last = 0;
      p.ForEach([&](ColumnId id) { last = id; });
      move = std::max(offset, last - columns);
    }
    ColumnSet out;
    p.ForEach([&](ColumnId id) { out.Add(id - move); });
    return out;
  };
  q4_proj = shift(q4_proj);
  q5_proj = shift(q5_proj);
}

uint64_t WorkloadSpec::UpdateCount() const {
  return static_cast<uint64_t>(std::llround(double(steady_inserts) * update_ratio));
}

Status WorkloadSpec::Validate() const {
  if (columns < 1 || columns > kMaxColumns) return Status::InvalidArgument("columns out of range");
  if (update_ratio < 0) return Status::InvalidArgument("update_ratio < 0");
  for (double m : {q2a_mean, q2b_mean, q3_mean}) {
    if (!(m >= 0 && m <= 1)) return Status::InvalidArgument("recency mean outside [0,1]");
  }
  if (!(recency_stddev >= 0)) return Status::InvalidArgument("recency_stddev < 0");
  for (double s : {q4_selectivity, q5_selectivity}) {
    if (!(s > 0 && s <= 1)) return Status::InvalidArgument("selectivity outside (0,1]");
  }
  ColumnSet all = ColumnSet::Range(1, columns);
  for (const ColumnSet* p : {&q2a_proj, &q2b_proj, &q4_proj, &q5_proj}) {
    if (!p->IsSubsetOf(all)) return Status::InvalidArgument("projection outside schema");
  }
  if (TotalRows() >= kKeySpace) return Status::InvalidArgument("too many rows");
  if (T < 2 || block_size < 64 || K < 1 || levels < 0 || pg < 0 || dt_size <= 0) {
    return Status::InvalidArgument("bad engine shape");
  }
  if (levels == 0 && pg == 0) return Status::InvalidArgument("levels and pg both automatic");
  if (reader_threads < 1) return Status::InvalidArgument("reader_threads < 1");
  return Status::OK();
}

Status WorkloadSpec::MakeParams(TreeParams* params) const {
  Schema s = schema();
  TreeParams p = TreeParams::FromBlockSize(s, block_size, T, std::max(levels, 1), std::max<int64_t>(pg, 1), K);
  uint64_t n = std::max<uint64_t>(TotalRows(), 1);
  if (pg == 0) {
    // Smallest pg with T^(L+1) * B * pg >= n * (T-1).
    double cap = std::pow(double(T), levels + 1) * p.B;
    p.pg = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(double(n) * (T - 1) / cap)));
  }
  if (levels == 0) {
    Status st = LevelsFor(n, p, &p.L);
    if (!st.ok()) return st;
  }
  Status st = p.Validate(s);
  if (st.ok()) *params = p;
  return st;
}

namespace {

template <typename T>
void Put(std::ostringstream& os, const char* name, const T& v) {
  os << name << " = " << v << "\n";
}

// Shortest text that parses back to the same double.
void Put(std::ostringstream& os, const char* name, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  os << name << " = " << std::string_view(buf, r.ptr - buf) << "\n";
}

}  // namespace

std::string FormatSpec(const WorkloadSpec& in) {
  WorkloadSpec s = in;
  s.ResolveProjections();
  std::ostringstream os;
  os << "laser-workload " << WorkloadSpec::kVersion << "\n";
  Put(os, "columns", s.columns);
  Put(os, "load_rows", s.load_rows);
  Put(os, "steady_inserts", s.steady_inserts);
  Put(os, "update_ratio", s.update_ratio);
  Put(os, "q2a_count", s.q2a_count);
  Put(os, "q2b_count", s.q2b_count);
  Put(os, "q4_count", s.q4_count);
  Put(os, "q5_count", s.q5_count);
  Put(os, "q2a_proj", s.q2a_proj.ToString());
  Put(os, "q2b_proj", s.q2b_proj.ToString());
  Put(os, "q4_proj", s.q4_proj.ToString());
  Put(os, "q5_proj", s.q5_proj.ToString());
  Put(os, "q2a_mean", s.q2a_mean);
  Put(os, "q2b_mean", s.q2b_mean);
  Put(os, "q3_mean", s.q3_mean);
  Put(os, "recency_stddev", s.recency_stddev);
  Put(os, "q4_selectivity", s.q4_selectivity);
  Put(os, "q5_selectivity", s.q5_selectivity);
  Put(os, "seed", s.seed);
  Put(os, "T", s.T);
  Put(os, "block_size", s.block_size);
  Put(os, "K", s.K);
  Put(os, "levels", s.levels);
  Put(os, "pg", s.pg);
  Put(os, "dt_size", s.dt_size);
  Put(os, "reader_threads", s.reader_threads);
  return os.str();
}

namespace {

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool ParseNum(const std::string& v, T* out) {
  std::istringstream is(v);
  T x;
  if (!(is >> x) || !is.eof()) return false;
  *out = x;
  return true;
}

}  // namespace

Status ParseSpec(const std::string& text, WorkloadSpec* out) {
  WorkloadSpec s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  std::map<std::string, std::function<bool(const std::string&)>> fields = {
      {"columns", [&](const std::string& v) { return ParseNum(v, &s.columns); }},
      {"load_rows", [&](const std::string& v) { return ParseNum(v, &s.load_rows); }},
      {"steady_inserts", [&](const std::string& v) { return ParseNum(v, &s.steady_inserts); }},
      {"update_ratio", [&](const std::string& v) { return ParseNum(v, &s.update_ratio); }},
      {"q2a_count", [&](const std::string& v) { return ParseNum(v, &s.q2a_count); }},
      {"q2b_count", [&](const std::string& v) { return ParseNum(v, &s.q2b_count); }},
      {"q4_count", [&](const std::string& v) { return ParseNum(v, &s.q4_count); }},
      {"q5_count", [&](const std::string& v) { return ParseNum(v, &s.q5_count); }},
      {"q2a_proj", [&](const std::string& v) { return ColumnSet::Parse(v, &s.q2a_proj); }},
      {"q2b_proj", [&](const std::string& v) { return ColumnSet::Parse(v, &s.q2b_proj); }},
      {"q4_proj", [&](const std::string& v) { return ColumnSet::Parse(v, &s.q4_proj); }},
      {"q5_proj", [&](const std::string& v) { return ColumnSet::Parse(v, &s.q5_proj); }},
      {"q2a_mean", [&](const std::string& v) { return ParseNum(v, &s.q2a_mean); }},
      {"q2b_mean", [&](const std::string& v) { return ParseNum(v, &s.q2b_mean); }},
      {"q3_mean", [&](const std::string& v) { return ParseNum(v, &s.q3_mean); }},
      {"recency_stddev", [&](const std::string& v) { return ParseNum(v, &s.recency_stddev); }},
      {"q4_selectivity", [&](const std::string& v) { return ParseNum(v, &s.q4_selectivity); }},
      {"q5_selectivity", [&](const std::string& v) { return ParseNum(v, &s.q5_selectivity); }},
      {"seed", [&](const std::string& v) { return ParseNum(v, &s.seed); }},
      {"T", [&](const std::string& v) { return ParseNum(v, &s.T); }},
      {"block_size", [&](const std::string& v) { return ParseNum(v, &s.block_size); }},
      {"K", [&](const std::string& v) { return ParseNum(v, &s.K); }},
      {"levels", [&](const std::string& v) { return ParseNum(v, &s.levels); }},
      {"pg", [&](const std::string& v) { return ParseNum(v, &s.pg); }},
      {"dt_size", [&](const std::string& v) { return ParseNum(v, &s.dt_size); }},
      {"reader_threads", [&](const std::string& v) { return ParseNum(v, &s.reader_threads); }},
  };
  auto err = [&](const std::string& m) {
    return Status::InvalidArgument("spec line " + std::to_string(lineno) + ": " + m);
  };
  while (std::getline(in, line)) {
    lineno++;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (!header) {
      int version = 0;
      if (std::sscanf(line.c_str(), "laser-workload %d", &version) != 1) {
        return err("missing 'laser-workload <version>' header");
      }
      if (version != WorkloadSpec::kVersion) return err("unsupported version");
      header = true;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) return err("expected key = value");
    std::string key = Trim(line.substr(0, eq));
    std::string val = Trim(line.substr(eq + 1));
    auto it = fields.find(key);
    if (it == fields.end()) return err("unknown field '" + key + "'");
    if (!it->second(val)) return err("bad value for '" + key + "'");
  }
  if (!header) return Status::InvalidArgument("empty spec");
  s.ResolveProjections();
  Status st = s.Validate();
  if (!st.ok()) return st;
  *out = s;
  return Status::OK();
}

Status LoadSpec(const std::string& path, WorkloadSpec* spec) {
  std::string text;
  Status st = ReadFileToString(path, &text);
  if (!st.ok()) return st;
  return ParseSpec(text, spec);
}

uint64_t SpecHash(const WorkloadSpec& spec) {
  std::string text = FormatSpec(spec);
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ull;
  return h;
}

Key KeyForIndex(uint64_t index) {
  // Four-round Feistel network over two 20-bit halves.
  constexpr uint64_t kHalf = (uint64_t{1} << 20) - 1;
  uint64_t l = (index >> 20) & kHalf;
  uint64_t r = index & kHalf;
  for (uint64_t round = 0; round < 4; round++) {
    uint64_t f = Hash64(r ^ (round * 0x5851F42D4C957F2Dull)) & kHalf;
    uint64_t nl = r;
    r = l ^ f;
    l = nl;
  }
  return (l << 20) | r;
}

Value InsertValue(Key key, ColumnId column) {
  return static_cast<Value>(Hash64(key * 131 + uint64_t(column)) >> 1);
}

std::string Operation::Encode() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s %llu %llu %s %d %lld %.17g\n", QueryClassName(query),
                (unsigned long long)key, (unsigned long long)hi, projection.ToString().c_str(),
                column, (long long)value, recency);
  return buf;
}

WorkloadGenerator::WorkloadGenerator(const WorkloadSpec& spec, Phase phase)
    : spec_(spec), phase_(phase), rng_(spec.seed * 0x9E3779B97F4A7C15ull + uint64_t(phase)) {
  spec_.ResolveProjections();
  if (phase == Phase::kLoad) {
    remaining_[int(QueryClass::kQ1)] = spec_.load_rows;
  } else {
    inserted_ = spec_.load_rows;
    remaining_[int(QueryClass::kQ1)] = spec_.steady_inserts;
    remaining_[int(QueryClass::kQ2a)] = spec_.q2a_count;
    remaining_[int(QueryClass::kQ2b)] = spec_.q2b_count;
    remaining_[int(QueryClass::kQ3)] = spec_.UpdateCount();
    remaining_[int(QueryClass::kQ4)] = spec_.q4_count;
    remaining_[int(QueryClass::kQ5)] = spec_.q5_count;
  }
  for (uint64_t n : remaining_) remaining_total_ += n;
}

Key WorkloadGenerator::RecentKey(double mean, double* recency) {
  double r = std::clamp(mean + spec_.recency_stddev * normal_(rng_), 0.0, 1.0);
  *recency = r;
  uint64_t n = inserted_;
  if (n == 0) return KeyForIndex(0);
  uint64_t idx = static_cast<uint64_t>(std::llround(r * double(n - 1)));
  return KeyForIndex(idx);
}

bool WorkloadGenerator::Next(Operation* op) {
  if (remaining_total_ == 0) return false;
  // Uniform interleaving: pick a class with probability proportional to
  // its remaining count.
  int cls = 0;
  if (phase_ == Phase::kSteady) {
    uint64_t x = std::uniform_int_distribution<uint64_t>(0, remaining_total_ - 1)(rng_);
    while (x >= remaining_[cls]) {
      x -= remaining_[cls];
      cls++;
    }
  }
  remaining_[cls]--;
  remaining_total_--;
  *op = Operation();
  op->query = QueryClass(cls);
  switch (op->query) {
    case QueryClass::kQ1:
      op->insert_index = inserted_;
      op->key = KeyForIndex(inserted_++);
      op->projection = ColumnSet::Range(1, spec_.columns);
      break;
    case QueryClass::kQ2a:
      op->key = RecentKey(spec_.q2a_mean, &op->recency);
      op->projection = spec_.q2a_proj;
      break;
    case QueryClass::kQ2b:
      op->key = RecentKey(spec_.q2b_mean, &op->recency);
      op->projection = spec_.q2b_proj;
      break;
    case QueryClass::kQ3:
      op->key = RecentKey(spec_.q3_mean, &op->recency);
      op->column = std::uniform_int_distribution<int>(1, spec_.columns)(rng_);
      op->projection = ColumnSet::Of({op->column});
      op->value = static_cast<Value>(rng_() >> 1);
      break;
    case QueryClass::kQ4:
    case QueryClass::kQ5: {
      double sel = op->query == QueryClass::kQ4 ? spec_.q4_selectivity : spec_.q5_selectivity;
      uint64_t width = std::max<uint64_t>(1, static_cast<uint64_t>(sel * double(kKeySpace)));
      op->key = std::uniform_int_distribution<uint64_t>(0, kKeySpace - width)(rng_);
      op->hi = op->key + width - 1;
      op->projection = op->query == QueryClass::kQ4 ? spec_.q4_proj : spec_.q5_proj;
      break;
    }
  }
  return true;
}

}  // namespace bench
}  // namespace laser
