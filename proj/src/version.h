#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "laser/schema.h"
#include "laser/status.h"
#include "log.h"
#include "sst.h"

namespace laser {

struct FileMeta {
  uint64_t number = 0;
  int level = 0;
  int group = 0;  // index into the level's groups; 0 at level 0
  ColumnSet columns;
  uint64_t file_size = 0;
  Key smallest = 0;
  Key largest = 0;
  SeqNo min_seq = 0;
  SeqNo max_seq = 0;
  uint64_t num_entries = 0;
  uint64_t value_count = 0;
  std::shared_ptr<SstReader> reader;

  // Size under the model's accounting: (1 + values) * dt_size per entry.
  double NominalBytes(double dt_size) const {
    return (double(num_entries) + double(value_count)) * dt_size;
  }
};
using FileRef = std::shared_ptr<FileMeta>;

std::string SstFileName(const std::string& dir, uint64_t number);
std::string WalFileName(const std::string& dir, SeqNo first_seq);
std::string ManifestFileName(const std::string& dir, uint64_t number);

// Immutable snapshot of the tree's files.
class Version {
 public:
  explicit Version(const LayoutConfig& layout);

  // Newest first.
  const std::vector<FileRef>& level0() const { return level0_; }
  // Files of the run (level >= 1, group), sorted by key.
  const std::vector<FileRef>& run(int level, int group) const { return runs_[level][group]; }
  int L() const { return static_cast<int>(runs_.size()) - 1; }
  int num_groups(int level) const { return static_cast<int>(runs_[level].size()); }

  // File in the run whose range contains key, or nullptr.
  const FileMeta* FindFile(int level, int group, Key key) const;
  // Contiguous slice of the run overlapping [lo, hi].
  std::vector<FileRef> Overlapping(int level, int group, Key lo, Key hi) const;

  uint64_t NumFiles() const;
  template <typename F>
  void ForEachFile(F&& f) const {
    for (const auto& fm : level0_) f(fm);
    for (const auto& lvl : runs_) {
      for (const auto& run : lvl) {
        for (const auto& fm : run) f(fm);
      }
    }
  }

 private:
  friend class VersionBuilder;
  std::vector<FileRef> level0_;
  std::vector<std::vector<std::vector<FileRef>>> runs_;
};

struct VersionEdit {
  std::vector<FileRef> added;
  std::vector<uint64_t> deleted;
  bool has_last_seq = false;
  SeqNo last_seq = 0;
  bool has_flushed_seq = false;
  SeqNo flushed_seq = 0;
  bool has_next_file = false;
  uint64_t next_file = 0;
  bool has_layout = false;
  std::string layout_text;
  int num_columns = 0;

  void SetLastSeq(SeqNo s) { has_last_seq = true; last_seq = s; }
  void SetFlushedSeq(SeqNo s) { has_flushed_seq = true; flushed_seq = s; }
  void SetNextFile(uint64_t n) { has_next_file = true; next_file = n; }

  void EncodeTo(std::string* dst) const;
  Status DecodeFrom(std::string_view src);
};

// Owns the current version and the manifest. Not thread-safe; callers hold
// the database mutex.
class VersionSet {
 public:
  VersionSet(std::string dir, const Schema& schema, const LayoutConfig& layout);
  ~VersionSet();

  // Loads CURRENT and replays the manifest, opening every live SST.
  // *exists is false when the directory holds no database.
  Status Recover(bool* exists);
  // Writes a new manifest holding the full current state and points
  // CURRENT at it.
  Status WriteSnapshot();
  Status LogAndApply(VersionEdit* edit);

  std::shared_ptr<const Version> current() const { return current_; }
  const LayoutConfig& layout() const { return layout_; }
  uint64_t NewFileNumber() { return next_file_++; }
  SeqNo last_seq() const { return last_seq_; }
  void set_last_seq(SeqNo s) { last_seq_ = s; }
  SeqNo flushed_seq() const { return flushed_seq_; }
  uint64_t manifest_number() const { return manifest_number_; }

  // Deletes SSTs and manifests in the directory that the current state does
  // not reference.
  void DeleteOrphans();

 private:
  Status Apply(const VersionEdit& edit, bool open_files);

  const std::string dir_;
  const Schema schema_;
  LayoutConfig layout_;
  std::shared_ptr<const Version> current_;
  std::unique_ptr<LogWriter> manifest_;
  uint64_t manifest_number_ = 0;
  uint64_t next_file_ = 1;
  SeqNo last_seq_ = 0;
  SeqNo flushed_seq_ = 0;
};

}  // namespace laser
