#include <algorithm>
#include <charconv>

#include "laser/types.h"

namespace laser {

ColumnSet ColumnSet::Range(ColumnId first, ColumnId last) {
  ColumnSet s;
  for (ColumnId c = first; c <= last; c++) s.Add(c);
  return s;
}

ColumnSet ColumnSet::Of(std::initializer_list<ColumnId> ids) {
  ColumnSet s;
  for (ColumnId c : ids) s.Add(c);
  return s;
}

ColumnSet ColumnSet::FromVector(const std::vector<ColumnId>& ids) {
  ColumnSet s;
  for (ColumnId c : ids) s.Add(c);
  return s;
}

std::vector<ColumnId> ColumnSet::ToVector() const {
  std::vector<ColumnId> v;
  v.reserve(Size());
  ForEach([&](ColumnId c) { v.push_back(c); });
  return v;
}

std::string ColumnSet::ToString() const {
  std::string out;
  std::vector<ColumnId> v = ToVector();
  for (size_t i = 0; i < v.size();) {
    size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[j] + 1) j++;
    if (!out.empty()) out += ',';
    out += std::to_string(v[i]);
    if (j > i) {
      out += '-';
      out += std::to_string(v[j]);
    }
    i = j + 1;
  }
  return out;
}

namespace {

bool ParseId(std::string_view s, ColumnId* out) {
  if (s.empty()) return false;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return false;
  if (v < 1 || v > kMaxColumns) return false;
  *out = v;
  return true;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool ColumnSet::Parse(std::string_view text, ColumnSet* out) {
  ColumnSet s;
  text = Trim(text);
  if (text.empty()) return false;
  while (!text.empty()) {
    size_t comma = text.find(',');
    std::string_view item = Trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    if (comma != std::string_view::npos && Trim(text).empty()) return false;
    size_t dash = item.find('-');
    ColumnId a, b;
    if (dash == std::string_view::npos) {
      if (!ParseId(item, &a)) return false;
      b = a;
    } else {
      if (!ParseId(Trim(item.substr(0, dash)), &a) ||
          !ParseId(Trim(item.substr(dash + 1)), &b) || b < a) {
        return false;
      }
    }
    for (ColumnId c = a; c <= b; c++) s.Add(c);
  }
  *out = s;
  return true;
}

bool ColumnSet::LexLess(const ColumnSet& a, const ColumnSet& b) {
  std::vector<ColumnId> x = a.ToVector(), y = b.ToVector();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace laser
