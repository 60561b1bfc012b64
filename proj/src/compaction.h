#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "laser/options.h"
#include "memtable.h"
#include "merge.h"
#include "version.h"

namespace laser {

// busy[level][group]; level 0 has a single slot.
using BusyMap = std::vector<std::vector<bool>>;
BusyMap MakeBusyMap(const LayoutConfig& layout);

// Moves the SSTs in `inputs` from (level, group) into the child groups of
// the next level.
struct CompactionJob {
  int level = 0;
  int group = 0;
  // Level 0: every input file, newest first. Otherwise a key-sorted slice of
  // the group's run.
  std::vector<FileRef> inputs;
  std::vector<int> children;
  std::vector<std::vector<FileRef>> child_inputs;
  bool bottommost = false;

  void MarkBusy(BusyMap* busy, bool value) const;
};

// Fill ratio of each level 0..L-1 (level 0: runs / K); a level needs work
// when its ratio reaches 1 (level 0) or exceeds 1 (deeper levels).
std::vector<double> LevelScores(const Version& v, const Options& o);
// Fill ratio of each group of a level >= 1.
std::vector<double> GroupScores(const Version& v, const Options& o, int level);

// Picks the most overflowing level, then its most overflowing group whose
// slots are free, then one SST of it by priority. Returns false when
// nothing needs work or every candidate is busy.
bool PickCompaction(const Version& v, const Options& o, const BusyMap& busy, CompactionJob* job);
// Job moving the whole (level, group) run, regardless of fill.
bool WholeRunJob(const Version& v, const Options& o, int level, int group, CompactionJob* job);

struct BuildContext {
  std::string dir;
  const Options* options;
  std::function<uint64_t()> new_file_number;
};

struct CompactionResult {
  std::vector<FileRef> outputs;
  uint64_t bytes_read = 0;
  uint64_t bytes_written = 0;
};

Status RunCompaction(const CompactionJob& job, const BuildContext& ctx, CompactionResult* result);

// Writes a sealed memtable as one level-0 SST, collapsing each key's
// versions into one entry. *out is null when the memtable is empty.
Status BuildLevel0(const MemTable& mem, const BuildContext& ctx, FileRef* out);

// Entry a merge writes for `columns` once the merger has seen every input
// version of a key. Returns false when nothing needs to be written.
bool ResolveOutput(const RowMerger& m, const ColumnSet& columns, bool bottommost, Key key,
                   OwnedEntry* out);

}  // namespace laser
