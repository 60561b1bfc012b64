#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laser/options.h"
#include "laser/profiler.h"
#include "laser/statistics.h"
#include "laser/status.h"

namespace laser {

struct ColumnValue {
  ColumnId column;
  Value value;
};

// Values of a projection. Columns never written (or deleted and not
// rewritten) have no value.
struct RowResult {
  ColumnSet projection;
  ColumnSet present;
  // Indexed by rank within `projection`; meaningful where present.
  std::vector<Value> values;

  std::optional<Value> Get(ColumnId c) const {
    if (!present.Contains(c)) return std::nullopt;
    return values[projection.RankOf(c)];
  }
};

class WriteBatch {
 public:
  void Insert(Key key, std::span<const Value> row);
  void Update(Key key, std::span<const ColumnValue> values);
  void Delete(Key key);
  void Clear() { ops_.clear(); values_.clear(); }
  size_t Count() const { return ops_.size(); }

 private:
  friend class DBImpl;
  enum class Op : uint8_t { kInsert, kUpdate, kDelete };
  struct Rec {
    Op op;
    Key key;
    ColumnSet columns;
    size_t offset;  // into values_, ascending column order
  };
  std::vector<Rec> ops_;
  std::vector<Value> values_;
};

class ScanIterator {
 public:
  virtual ~ScanIterator() = default;
  virtual bool Valid() const = 0;
  virtual void Next() = 0;
  virtual Key key() const = 0;
  virtual const RowResult& row() const = 0;
  virtual Status status() const = 0;
};

// Live SST description for tests and tools.
struct LiveFile {
  uint64_t number;
  int level;
  int group;
  ColumnSet columns;
  std::string path;
  uint64_t entries;
  Key smallest;
  Key largest;
};

class DB {
 public:
  static Status Open(const Options& options, const std::string& path, std::unique_ptr<DB>* db);
  virtual ~DB() = default;

  // `row` holds values for columns 1..c in order.
  virtual Status Insert(const WriteOptions& o, Key key, std::span<const Value> row) = 0;
  virtual Status Update(const WriteOptions& o, Key key, std::span<const ColumnValue> values) = 0;
  virtual Status Delete(const WriteOptions& o, Key key) = 0;
  virtual Status Write(const WriteOptions& o, const WriteBatch& batch) = 0;

  // NotFound when no column of the projection has a value.
  virtual Status Read(const ReadOptions& o, Key key, const ColumnSet& projection,
                      RowResult* result) = 0;
  // Keys in [lo, hi] with at least one value in the projection, as of the
  // time of the call.
  virtual std::unique_ptr<ScanIterator> Scan(const ReadOptions& o, Key lo, Key hi,
                                             const ColumnSet& projection) = 0;

  // Seals the memtable and waits until it is on disk.
  virtual Status Flush() = 0;
  // Waits until no flush or compaction is pending or running.
  virtual Status WaitForIdle() = 0;
  // Pushes every entry down to the last level.
  virtual Status CompactAll() = 0;

  virtual Statistics GetStatistics() const = 0;
  virtual void ResetCounters() = 0;
  virtual TraceStats GetProfile() const = 0;
  virtual void ResetProfile() = 0;
  virtual std::vector<LiveFile> GetLiveFiles() const = 0;
  virtual const Options& options() const = 0;
};

}  // namespace laser
