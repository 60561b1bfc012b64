#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "compaction.h"
#include "laser/db.h"
#include "laser/profiler.h"
#include "log.h"
#include "memtable.h"
#include "version.h"

namespace laser {

class DBImpl : public DB {
 public:
  DBImpl(const Options& options, std::string dir);
  ~DBImpl() override;

  Status Recover();

  Status Insert(const WriteOptions& o, Key key, std::span<const Value> row) override;
  Status Update(const WriteOptions& o, Key key, std::span<const ColumnValue> values) override;
  Status Delete(const WriteOptions& o, Key key) override;
  Status Write(const WriteOptions& o, const WriteBatch& batch) override;
  Status Read(const ReadOptions& o, Key key, const ColumnSet& projection,
              RowResult* result) override;
  std::unique_ptr<ScanIterator> Scan(const ReadOptions& o, Key lo, Key hi,
                                     const ColumnSet& projection) override;
  Status Flush() override;
  Status WaitForIdle() override;
  Status CompactAll() override;
  Statistics GetStatistics() const override;
  void ResetCounters() override;
  TraceStats GetProfile() const override;
  void ResetProfile() override;
  std::vector<LiveFile> GetLiveFiles() const override;
  const Options& options() const override { return options_; }

 private:
  friend class DBScanIterator;
  friend class QuerySink;

  struct Imm {
    std::shared_ptr<MemTable> mem;
    std::string wal_path;
    SeqNo last_seq;
  };
  struct SuperVersion {
    std::shared_ptr<MemTable> mem;
    std::vector<std::shared_ptr<MemTable>> imms;  // newest first
    std::shared_ptr<const Version> version;
  };
  struct Writer {
    const WriteBatch* batch;
    bool sync;
    bool done = false;
    Status status;
    std::condition_variable cv;
  };

  std::shared_ptr<const SuperVersion> GetSuperVersion() const;
  void InstallSuperVersion();  // mu_ held
  Status NewWal(SeqNo first_seq);  // mu_ held
  Status MakeRoomForWrite(std::unique_lock<std::mutex>& l, bool force);
  Status SwitchMemTable();  // mu_ held
  Status FlushOldest(std::unique_lock<std::mutex>& l);
  Status RunJob(std::unique_lock<std::mutex>& l, const CompactionJob& job);
  Status CompactInline(std::unique_lock<std::mutex>& l);
  bool Idle() const;  // mu_ held
  void FlushThread();
  void CompactionThread();
  void Stall(std::unique_lock<std::mutex>& l);
  void ProfileUpdate(Key key, const ColumnSet& proj);
  BuildContext MakeBuildContext();
  void CountBlockRead(int level, int group);

  const Options options_;
  const std::string dir_;
  size_t memtable_bytes_;
  std::vector<int> group_offset_;  // flat index of (level, 0)

  mutable std::mutex mu_;
  std::condition_variable bg_cv_;
  std::condition_variable done_cv_;
  std::unique_ptr<VersionSet> versions_;
  std::shared_ptr<MemTable> mem_;
  std::unique_ptr<LogWriter> wal_;
  std::deque<Imm> imms_;  // newest at the front
  std::shared_ptr<const SuperVersion> sv_;
  std::atomic<SeqNo> last_seq_{0};
  std::deque<Writer*> writers_;
  BusyMap busy_;
  int running_jobs_ = 0;
  bool flush_running_ = false;
  int paused_ = 0;
  bool shutting_down_ = false;
  Status bg_error_;
  std::vector<std::thread> threads_;

  std::unique_ptr<std::atomic<uint64_t>[]> block_reads_;
  size_t num_counters_ = 0;
  std::atomic<uint64_t> bytes_flushed_{0};
  std::atomic<uint64_t> bytes_compacted_read_{0};
  std::atomic<uint64_t> bytes_compacted_written_{0};
  std::atomic<uint64_t> flushes_{0};
  std::atomic<uint64_t> compactions_{0};
  std::atomic<uint64_t> stalls_{0};
  std::atomic<uint64_t> stall_micros_{0};

  std::unique_ptr<WorkloadProfiler> profiler_;
};

}  // namespace laser
