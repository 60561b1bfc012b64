#include "laser/schema.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laser {

Status Schema::Validate() const {
  if (num_columns < 1 || num_columns > kMaxColumns) {
    return Status::InvalidArgument("column count must be in [1, 128]");
  }
  if (!(dt_size > 0)) return Status::InvalidArgument("dt_size must be positive");
  return Status::OK();
}

TreeParams TreeParams::FromBlockSize(const Schema& schema, int block_size,
                                     int T, int L, int64_t pg, int K) {
  TreeParams p;
  p.T = T;
  p.L = L;
  p.pg = pg;
  p.D = block_size;
  p.K = K;
  p.B = std::max(1, static_cast<int>(std::floor(
                        block_size / ((1 + schema.num_columns) * schema.dt_size))));
  return p;
}

Status TreeParams::Validate(const Schema& schema) const {
  if (T < 2) return Status::InvalidArgument("T must be >= 2");
  if (L < 1) return Status::InvalidArgument("L must be >= 1");
  if (B < 1) return Status::InvalidArgument("B must be >= 1");
  if (pg < 1) return Status::InvalidArgument("pg must be >= 1");
  if (K < 1) return Status::InvalidArgument("K must be >= 1");
  if (D < 1) return Status::InvalidArgument("D must be >= 1");
  // D = B (1 + c) dt_size up to the floor taken when deriving B.
  double row = (1 + schema.num_columns) * schema.dt_size;
  if (B * row > D + 1e-9 && B > 1) {
    return Status::InvalidArgument("B rows of (1+c)*dt_size bytes exceed D");
  }
  if ((B + 1) * row <= D) {
    return Status::InvalidArgument("D holds more than B rows");
  }
  return Status::OK();
}

uint64_t TreeParams::LevelCapacity(int level) const {
  long double cap = static_cast<long double>(B) * pg;
  for (int i = 0; i < level; i++) cap *= T;
  if (cap > 1.8e19L) return UINT64_MAX;
  return static_cast<uint64_t>(cap);
}

Status LevelsFor(uint64_t n, const TreeParams& params, int* levels) {
  if (params.T < 2 || params.B < 1 || params.pg < 1) {
    return Status::InvalidArgument("T >= 2, B >= 1 and pg >= 1 required");
  }
  if (n < 1) return Status::InvalidArgument("N must be >= 1");
  // Smallest integer L with T^L * T * B * pg >= N * (T - 1).
  using u128 = unsigned __int128;
  const u128 target = static_cast<u128>(n) * static_cast<u128>(params.T - 1);
  const u128 unit = static_cast<u128>(params.T) * params.B * params.pg;
  int l = 0;
  u128 cur = unit;  // T^0 * unit
  if (cur >= target) {
    // The exact value may be <= 0; clamp.
    *levels = 1;
    return Status::OK();
  }
  while (cur < target) {
    cur *= params.T;
    l++;
  }
  *levels = std::max(1, l);
  return Status::OK();
}

int EntriesPerBlock(const Schema& schema, const TreeParams& params,
                    const ColumnSet& group) {
  int cg = group.Size();
  if (cg == 0) return 0;
  int64_t b = static_cast<int64_t>(params.B) * (1 + schema.num_columns) / (1 + cg);
  return static_cast<int>(std::max<int64_t>(1, b));
}

LayoutConfig::LayoutConfig(std::vector<std::vector<ColumnSet>> levels)
    : levels_(std::move(levels)) {
  Normalize();
}

void LayoutConfig::Normalize() {
  for (auto& lv : levels_) {
    std::stable_sort(lv.begin(), lv.end(), [](const ColumnSet& a, const ColumnSet& b) {
      return a.First() < b.First();
    });
  }
}

LayoutConfig LayoutConfig::Row(const Schema& schema, int L) {
  return Uniform(schema, L, schema.num_columns);
}

LayoutConfig LayoutConfig::Column(const Schema& schema, int L) {
  return Uniform(schema, L, 1);
}

LayoutConfig LayoutConfig::Uniform(const Schema& schema, int L, int cg_size) {
  std::vector<std::vector<ColumnSet>> levels(L + 1);
  levels[0].push_back(schema.AllColumns());
  for (int i = 1; i <= L; i++) {
    for (int c = 1; c <= schema.num_columns; c += cg_size) {
      levels[i].push_back(
          ColumnSet::Range(c, std::min(schema.num_columns, c + cg_size - 1)));
    }
  }
  return LayoutConfig(std::move(levels));
}

int LayoutConfig::GroupOf(int level, ColumnId c) const {
  const auto& lv = levels_[level];
  for (size_t g = 0; g < lv.size(); g++) {
    if (lv[g].Contains(c)) return static_cast<int>(g);
  }
  return -1;
}

std::vector<int> LayoutConfig::ChildrenOf(int level, int g) const {
  std::vector<int> out;
  if (level + 1 >= num_levels()) return out;
  const ColumnSet& parent = levels_[level][g];
  const auto& next = levels_[level + 1];
  for (size_t j = 0; j < next.size(); j++) {
    if (next[j].IsSubsetOf(parent)) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::string LayoutConfig::ToText() const {
  std::ostringstream os;
  for (size_t i = 0; i < levels_.size(); i++) {
    os << 'L' << i << ':';
    for (const auto& g : levels_[i]) os << " [" << g.ToString() << ']';
    os << '\n';
  }
  return os.str();
}

Status LayoutConfig::Parse(const std::string& text, LayoutConfig* out) {
  std::vector<std::vector<ColumnSet>> levels;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto err = [&](const std::string& what) {
    return Status::InvalidArgument("layout line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    lineno++;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    size_t p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos) continue;
    if (line[p] != 'L') return err("expected 'L<level>:'");
    size_t colon = line.find(':', p);
    if (colon == std::string::npos) return err("missing ':'");
    int level = -1;
    try {
      size_t used = 0;
      level = std::stoi(line.substr(p + 1, colon - p - 1), &used);
      if (used != colon - p - 1) level = -1;
    } catch (...) {
      level = -1;
    }
    if (level != static_cast<int>(levels.size())) {
      return err("levels must be listed in order starting at L0");
    }
    std::vector<ColumnSet> groups;
    size_t pos = colon + 1;
    while (true) {
      size_t open = line.find_first_not_of(" \t\r", pos);
      if (open == std::string::npos) break;
      if (line[open] != '[') return err("expected '['");
      size_t close = line.find(']', open);
      if (close == std::string::npos) return err("unterminated group");
      ColumnSet g;
      if (!ColumnSet::Parse(std::string_view(line).substr(open + 1, close - open - 1), &g)) {
        return err("bad column list '" + line.substr(open + 1, close - open - 1) + "'");
      }
      groups.push_back(g);
      pos = close + 1;
    }
    if (groups.empty()) return err("level has no groups");
    levels.push_back(std::move(groups));
  }
  if (levels.empty()) return Status::InvalidArgument("layout is empty");
  *out = LayoutConfig(std::move(levels));
  return Status::OK();
}

Status ValidateLayout(const LayoutConfig& layout, const Schema& schema,
                      LayoutViolation* violation) {
  auto fail = [&](int level, int group, std::string reason) {
    std::string msg = "level " + std::to_string(level);
    if (group >= 0) {
      msg += " group [" + layout.groups(level)[group].ToString() + "]";
    }
    msg += ": " + reason;
    if (violation != nullptr) *violation = {level, group, reason};
    return Status::InvalidArgument(msg);
  };
  if (layout.num_levels() < 1) return fail(0, -1, "no levels");
  const ColumnSet all = schema.AllColumns();
  for (int i = 0; i < layout.num_levels(); i++) {
    const auto& lv = layout.groups(i);
    if (lv.empty()) return fail(i, -1, "no groups");
    ColumnSet seen;
    for (int g = 0; g < static_cast<int>(lv.size()); g++) {
      if (lv[g].Empty()) return fail(i, g, "empty group");
      if (!lv[g].IsSubsetOf(all)) return fail(i, g, "column outside the schema");
      if (lv[g].Intersects(seen)) return fail(i, g, "overlaps another group");
      seen |= lv[g];
    }
    if (seen != all) return fail(i, -1, "groups do not cover every column");
    if (i == 0 && lv.size() != 1) return fail(0, -1, "level 0 must be the full row");
    if (i > 0) {
      for (int g = 0; g < static_cast<int>(lv.size()); g++) {
        int parents = 0;
        for (const auto& p : layout.groups(i - 1)) {
          if (p.Intersects(lv[g])) parents++;
        }
        if (parents != 1) {
          return fail(i, g, "spans " + std::to_string(parents) + " parent groups");
        }
      }
    }
  }
  return Status::OK();
}

std::string FormatTreeParams(const Schema& schema, const TreeParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "laser-params 1\n"
     << "columns = " << schema.num_columns << "\n"
     << "dt_size = " << schema.dt_size << "\n"
     << "T = " << p.T << "\n"
     << "L = " << p.L << "\n"
     << "B = " << p.B << "\n"
     << "pg = " << p.pg << "\n"
     << "D = " << p.D << "\n"
     << "K = " << p.K << "\n";
  return os.str();
}

Status ParseTreeParams(const std::string& text, Schema* schema, TreeParams* params) {
  Schema s;
  TreeParams p;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  auto err = [&](const std::string& what) {
    return Status::InvalidArgument("params line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    lineno++;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    if (!header) {
      int version = 0;
      if (key != "laser-params" || !(ls >> version) || version != 1) {
        return err("missing 'laser-params 1' header");
      }
      header = true;
      continue;
    }
    if (!(ls >> eq) || eq != "=") return err("expected key = value");
    bool ok = false;
    if (key == "columns") ok = bool(ls >> s.num_columns);
    else if (key == "dt_size") ok = bool(ls >> s.dt_size);
    else if (key == "T") ok = bool(ls >> p.T);
    else if (key == "L") ok = bool(ls >> p.L);
    else if (key == "B") ok = bool(ls >> p.B);
    else if (key == "pg") ok = bool(ls >> p.pg);
    else if (key == "D") ok = bool(ls >> p.D);
    else if (key == "K") ok = bool(ls >> p.K);
    else return err("unknown field '" + key + "'");
    if (!ok) return err("bad value for '" + key + "'");
  }
  if (!header) return Status::InvalidArgument("empty params");
  Status st = s.Validate();
  if (st.ok()) st = p.Validate(s);
  if (!st.ok()) return st;
  *schema = s;
  *params = p;
  return Status::OK();
}

}  // namespace laser
