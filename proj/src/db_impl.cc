#include "db_impl.h"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "util/file.h"

namespace laser {

void WriteBatch::Insert(Key key, std::span<const Value> row) {
  ops_.push_back({Op::kInsert, key, ColumnSet::Range(1, static_cast<int>(row.size())),
                  values_.size()});
  values_.insert(values_.end(), row.begin(), row.end());
}

void WriteBatch::Update(Key key, std::span<const ColumnValue> values) {
  std::vector<ColumnValue> sorted(values.begin(), values.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ColumnValue& a, const ColumnValue& b) { return a.column < b.column; });
  Rec r{Op::kUpdate, key, ColumnSet(), values_.size()};
  for (size_t i = 0; i < sorted.size(); i++) {
    // The last value given for a column wins.
    if (i + 1 < sorted.size() && sorted[i + 1].column == sorted[i].column) continue;
    if (sorted[i].column < 1 || sorted[i].column > kMaxColumns) {
      r.columns = ColumnSet(~0ull, ~0ull);  // rejected by the database
      continue;
    }
    r.columns.Add(sorted[i].column);
    values_.push_back(sorted[i].value);
  }
  ops_.push_back(r);
}

void WriteBatch::Delete(Key key) { ops_.push_back({Op::kDelete, key, ColumnSet(), values_.size()}); }

class QuerySink : public BlockReadSink {
 public:
  QuerySink(DBImpl* db, QueryTrace* trace) : db_(db), trace_(trace) {}
  void OnBlockRead(int level, int group) override {
    db_->CountBlockRead(level, group);
    if (trace_ != nullptr) trace_->blocks[level][group]++;
  }
  void Add(int level, int group, int n) {
    for (int i = 0; i < n; i++) OnBlockRead(level, group);
  }

 private:
  DBImpl* db_;
  QueryTrace* trace_;
};

namespace {

void InitTrace(const LayoutConfig& layout, QueryTrace* t) {
  if (t == nullptr) return;
  t->blocks.assign(layout.num_levels(), {});
  for (int i = 0; i < layout.num_levels(); i++) t->blocks[i].assign(layout.num_groups(i), 0);
  t->deepest_level = -1;
}

Status CheckProjection(const Schema& schema, const ColumnSet& p) {
  if (p.Empty()) return Status::InvalidArgument("empty projection");
  if (!p.IsSubsetOf(schema.AllColumns())) {
    return Status::InvalidArgument("projection outside schema: " + p.ToString());
  }
  return Status::OK();
}

void FillRow(const RowMerger& m, const ColumnSet& proj, RowResult* r) {
  r->projection = proj;
  r->present = m.values();
  r->values.assign(proj.Size(), 0);
  m.values().ForEach([&](ColumnId c) { r->values[proj.RankOf(c)] = m.value(c); });
}

uint64_t NowMicros() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Status DB::Open(const Options& options, const std::string& path, std::unique_ptr<DB>* db) {
  Status s = options.schema.Validate();
  if (s.ok()) s = options.params.Validate(options.schema);
  if (s.ok() && options.layout.L() != options.params.L) {
    s = Status::InvalidArgument("layout has " + std::to_string(options.layout.L()) +
                                " levels below level 0, params say " +
                                std::to_string(options.params.L));
  }
  if (s.ok()) s = ValidateLayout(options.layout, options.schema);
  if (!s.ok()) return s;
  auto impl = std::make_unique<DBImpl>(options, path);
  s = impl->Recover();
  if (!s.ok()) return s;
  *db = std::move(impl);
  return Status::OK();
}

DBImpl::DBImpl(const Options& options, std::string dir)
    : options_(options), dir_(std::move(dir)), busy_(MakeBusyMap(options.layout)) {
  memtable_bytes_ = options.memtable_bytes;
  if (memtable_bytes_ == 0) {
    double rows = double(options.params.B) * double(options.params.pg) / options.params.K;
    memtable_bytes_ = static_cast<size_t>(
        std::max(1.0, rows * (1 + options.schema.num_columns) * options.schema.dt_size));
  }
  for (int i = 0; i < options.layout.num_levels(); i++) {
    group_offset_.push_back(static_cast<int>(num_counters_));
    num_counters_ += options.layout.num_groups(i);
  }
  block_reads_.reset(new std::atomic<uint64_t>[num_counters_]);
  for (size_t i = 0; i < num_counters_; i++) block_reads_[i] = 0;
  if (options.enable_profiler) {
    profiler_ = std::make_unique<WorkloadProfiler>(options.schema.num_columns,
                                                   options.layout.num_levels());
  }
}

DBImpl::~DBImpl() {
  {
    std::lock_guard<std::mutex> l(mu_);
    shutting_down_ = true;
  }
  bg_cv_.notify_all();
  for (auto& t : threads_) t.join();
  if (wal_) wal_->Close();
}

void DBImpl::CountBlockRead(int level, int group) {
  block_reads_[group_offset_[level] + group].fetch_add(1, std::memory_order_relaxed);
}

BuildContext DBImpl::MakeBuildContext() {
  BuildContext ctx;
  ctx.dir = dir_;
  ctx.options = &options_;
  ctx.new_file_number = [this] {
    std::lock_guard<std::mutex> l(mu_);
    return versions_->NewFileNumber();
  };
  return ctx;
}

Status DBImpl::NewWal(SeqNo first_seq) {
  std::unique_ptr<WritableFile> f;
  Status s = WritableFile::Create(WalFileName(dir_, first_seq), &f);
  if (!s.ok()) return s;
  if (wal_) wal_->Close();
  wal_ = std::make_unique<LogWriter>(std::move(f));
  return Status::OK();
}

Status DBImpl::Recover() {
  Status s = CreateDirIfMissing(dir_);
  if (!s.ok()) return s;
  versions_ = std::make_unique<VersionSet>(dir_, options_.schema, options_.layout);
  bool exists = false;
  s = versions_->Recover(&exists);
  if (!s.ok()) return s;
  if (!exists && !options_.create_if_missing) {
    return Status::InvalidArgument("database does not exist: " + dir_);
  }
  if (exists && options_.error_if_exists) return Status::InvalidArgument("database exists: " + dir_);
  s = versions_->WriteSnapshot();
  if (!s.ok()) return s;

  std::vector<std::string> names, wals;
  s = ListDir(dir_, &names);
  if (!s.ok()) return s;
  for (const auto& n : names) {
    if (n.size() == 24 && n.compare(20, 4, ".wal") == 0) wals.push_back(n);
  }
  std::sort(wals.begin(), wals.end());

  const SeqNo flushed = versions_->flushed_seq();
  SeqNo max_seq = versions_->last_seq();
  BuildContext ctx = MakeBuildContext();
  auto mem = std::make_shared<MemTable>(options_.schema, flushed + 1);
  auto flush_mem = [&]() -> Status {
    FileRef f;
    Status fs = BuildLevel0(*mem, ctx, &f);
    if (!fs.ok()) return fs;
    VersionEdit edit;
    if (f) {
      edit.added.push_back(f);
      bytes_flushed_ += f->file_size;
      flushes_++;
    }
    edit.SetFlushedSeq(max_seq);
    versions_->set_last_seq(max_seq);
    std::lock_guard<std::mutex> l(mu_);
    fs = versions_->LogAndApply(&edit);
    mem = std::make_shared<MemTable>(options_.schema, max_seq + 1);
    return fs;
  };
  for (const auto& name : wals) {
    std::string data;
    s = ReadFileToString(dir_ + "/" + name, &data);
    if (!s.ok()) return s;
    LogReader reader(std::move(data));
    std::string_view rec;
    bool more = true;
    while (more) {
      switch (reader.Next(&rec)) {
        case LogReader::Result::kRecord: {
          OwnedEntry e;
          while (!rec.empty()) {
            if (!DecodeEntry(&rec, &e)) return Status::Corruption("bad wal entry in " + name);
            if (e.seq <= flushed) continue;
            mem->Add(e.view());
            max_seq = std::max(max_seq, e.seq);
          }
          if (mem->nominal_bytes() >= memtable_bytes_) {
            s = flush_mem();
            if (!s.ok()) return s;
          }
          break;
        }
        case LogReader::Result::kCorruption:
          return Status::Corruption("wal " + name + " damaged at offset " +
                                    std::to_string(reader.offset()));
        case LogReader::Result::kTornTail:
        case LogReader::Result::kEof:
          more = false;
          break;
      }
    }
  }
  if (!mem->Empty()) {
    s = flush_mem();
    if (!s.ok()) return s;
  }
  for (const auto& name : wals) RemoveFile(dir_ + "/" + name);

  std::unique_lock<std::mutex> l(mu_);
  last_seq_.store(max_seq);
  versions_->set_last_seq(max_seq);
  mem_ = std::make_shared<MemTable>(options_.schema, max_seq + 1);
  s = NewWal(max_seq + 1);
  if (!s.ok()) return s;
  versions_->DeleteOrphans();
  InstallSuperVersion();
  if (!options_.deterministic) {
    threads_.emplace_back([this] { FlushThread(); });
    for (int i = 0; i < std::max(1, options_.compaction_threads); i++) {
      threads_.emplace_back([this] { CompactionThread(); });
    }
  } else {
    s = CompactInline(l);
  }
  return s;
}

std::shared_ptr<const DBImpl::SuperVersion> DBImpl::GetSuperVersion() const {
  std::lock_guard<std::mutex> l(mu_);
  return sv_;
}

void DBImpl::InstallSuperVersion() {
  auto sv = std::make_shared<SuperVersion>();
  sv->mem = mem_;
  for (const auto& imm : imms_) sv->imms.push_back(imm.mem);
  sv->version = versions_->current();
  sv_ = std::move(sv);
}

Status DBImpl::Insert(const WriteOptions& o, Key key, std::span<const Value> row) {
  WriteBatch b;
  b.Insert(key, row);
  return Write(o, b);
}

Status DBImpl::Update(const WriteOptions& o, Key key, std::span<const ColumnValue> values) {
  WriteBatch b;
  b.Update(key, values);
  return Write(o, b);
}

Status DBImpl::Delete(const WriteOptions& o, Key key) {
  WriteBatch b;
  b.Delete(key);
  return Write(o, b);
}

void DBImpl::ProfileUpdate(Key key, const ColumnSet& proj) {
  auto sv = GetSuperVersion();
  const Version& v = *sv->version;
  // Locate the row with the in-memory bloom filters only, so profiling
  // adds no block reads.
  int found = -1;
  for (const auto& f : v.level0()) {
    if (f->reader->MayContain(key)) {
      found = 0;
      break;
    }
  }
  for (int i = 1; found < 0 && i <= v.L(); i++) {
    const auto& groups = options_.layout.groups(i);
    for (int g = 0; g < static_cast<int>(groups.size()); g++) {
      if (!groups[g].Intersects(proj)) continue;
      const FileMeta* f = v.FindFile(i, g, key);
      if (f != nullptr && f->reader->MayContain(key)) {
        found = i;
        break;
      }
    }
  }
  profiler_->RecordUpdate(std::max(found, 0), proj);
}

Status DBImpl::Write(const WriteOptions& o, const WriteBatch& batch) {
  const ColumnSet all = options_.schema.AllColumns();
  for (const auto& r : batch.ops_) {
    if (r.op == WriteBatch::Op::kInsert && r.columns != all) {
      return Status::InvalidArgument("insert needs exactly " +
                                     std::to_string(options_.schema.num_columns) + " values");
    }
    if (r.op == WriteBatch::Op::kUpdate && (r.columns.Empty() || !r.columns.IsSubsetOf(all))) {
      return Status::InvalidArgument("update columns outside schema or empty");
    }
  }
  if (batch.ops_.empty()) return Status::OK();
  if (profiler_ && o.profile) {
    for (const auto& r : batch.ops_) {
      if (r.op == WriteBatch::Op::kUpdate) {
        ProfileUpdate(r.key, r.columns);
      } else {
        profiler_->RecordInsert();
      }
    }
  }

  Writer w;
  w.batch = &batch;
  w.sync = o.sync || options_.sync_every_write;
  std::unique_lock<std::mutex> l(mu_);
  writers_.push_back(&w);
  while (!w.done && &w != writers_.front()) w.cv.wait(l);
  if (w.done) return w.status;

  Status s = MakeRoomForWrite(l, false);
  Writer* last = &w;
  if (s.ok()) {
    std::vector<Writer*> group;
    size_t ops = 0;
    bool sync = false;
    for (Writer* x : writers_) {
      if (x->batch == nullptr) break;
      if (x->sync && !w.sync) break;
      group.push_back(x);
      sync |= x->sync;
      last = x;
      ops += x->batch->Count();
      if (ops >= 4096) break;
    }
    const SeqNo first = last_seq_.load(std::memory_order_relaxed) + 1;
    MemTable* mem = mem_.get();
    LogWriter* wal = wal_.get();
    l.unlock();

    std::string rec;
    SeqNo seq = first;
    for (Writer* x : group) {
      const WriteBatch& b = *x->batch;
      for (const auto& r : b.ops_) {
        EntryView e;
        e.key = r.key;
        e.seq = seq++;
        e.kind = r.op == WriteBatch::Op::kInsert   ? EntryKind::kPut
                 : r.op == WriteBatch::Op::kUpdate ? EntryKind::kPartial
                                                   : EntryKind::kTombstone;
        e.present = r.columns;
        e.values = b.values_.data() + r.offset;
        EncodeEntry(e, &rec);
      }
    }
    s = wal->AddRecord(rec);
    if (s.ok()) s = sync ? wal->Sync() : wal->Flush();
    if (s.ok()) {
      std::string_view in(rec);
      OwnedEntry e;
      while (!in.empty() && DecodeEntry(&in, &e)) mem->Add(e.view());
    }
    l.lock();
    if (s.ok()) {
      last_seq_.store(seq - 1, std::memory_order_release);
    } else if (bg_error_.ok()) {
      bg_error_ = s;
    }
  }
  for (;;) {
    Writer* r = writers_.front();
    writers_.pop_front();
    if (r != &w) {
      r->status = s;
      r->done = true;
      r->cv.notify_one();
    }
    if (r == last) break;
  }
  if (!writers_.empty()) writers_.front()->cv.notify_one();
  return s;
}

void DBImpl::Stall(std::unique_lock<std::mutex>& l) {
  stalls_++;
  uint64_t start = NowMicros();
  bg_cv_.notify_all();
  done_cv_.wait(l);
  stall_micros_ += NowMicros() - start;
}

Status DBImpl::MakeRoomForWrite(std::unique_lock<std::mutex>& l, bool force) {
  const bool det = options_.deterministic;
  for (;;) {
    if (!bg_error_.ok()) return bg_error_;
    if (!det && versions_->current()->level0().size() >= size_t(2 * options_.params.K)) {
      Stall(l);
      continue;
    }
    if (!force && mem_->nominal_bytes() < memtable_bytes_) return Status::OK();
    if (force && mem_->Empty()) return Status::OK();
    if (!det && imms_.size() >= size_t(std::max(1, options_.max_immutable_memtables))) {
      Stall(l);
      continue;
    }
    Status s = SwitchMemTable();
    if (!s.ok()) return s;
    force = false;
    if (det) {
      s = FlushOldest(l);
      if (s.ok()) s = CompactInline(l);
      if (!s.ok()) return s;
    } else {
      bg_cv_.notify_all();
    }
  }
}

Status DBImpl::SwitchMemTable() {
  const SeqNo last = last_seq_.load();
  std::string old_wal = wal_->path();
  Status s = NewWal(last + 1);
  if (!s.ok()) return s;
  mem_->MarkImmutable();
  imms_.push_front({mem_, old_wal, last});
  mem_ = std::make_shared<MemTable>(options_.schema, last + 1);
  InstallSuperVersion();
  return Status::OK();
}

Status DBImpl::FlushOldest(std::unique_lock<std::mutex>& l) {
  flush_running_ = true;
  Imm imm = imms_.back();
  l.unlock();
  BuildContext ctx = MakeBuildContext();
  FileRef f;
  Status s = BuildLevel0(*imm.mem, ctx, &f);
  l.lock();
  if (s.ok()) {
    VersionEdit edit;
    if (f) edit.added.push_back(f);
    edit.SetFlushedSeq(imm.last_seq);
    versions_->set_last_seq(last_seq_.load());
    s = versions_->LogAndApply(&edit);
    if (s.ok()) {
      imms_.pop_back();
      InstallSuperVersion();
      RemoveFile(imm.wal_path);
      flushes_++;
      if (f) bytes_flushed_ += f->file_size;
    } else if (f) {
      RemoveFile(SstFileName(dir_, f->number));
    }
  }
  if (!s.ok() && bg_error_.ok()) bg_error_ = s;
  flush_running_ = false;
  done_cv_.notify_all();
  bg_cv_.notify_all();
  return s;
}

Status DBImpl::RunJob(std::unique_lock<std::mutex>& l, const CompactionJob& job) {
  running_jobs_++;
  l.unlock();
  BuildContext ctx = MakeBuildContext();
  CompactionResult result;
  Status s = RunCompaction(job, ctx, &result);
  l.lock();
  if (s.ok()) {
    VersionEdit edit;
    for (const auto& f : job.inputs) edit.deleted.push_back(f->number);
    for (const auto& run : job.child_inputs) {
      for (const auto& f : run) edit.deleted.push_back(f->number);
    }
    edit.added = result.outputs;
    versions_->set_last_seq(last_seq_.load());
    s = versions_->LogAndApply(&edit);
    if (s.ok()) {
      InstallSuperVersion();
      compactions_++;
      bytes_compacted_read_ += result.bytes_read;
      bytes_compacted_written_ += result.bytes_written;
    } else {
      for (const auto& f : result.outputs) {
        f->reader->MarkObsolete();
      }
    }
  }
  if (!s.ok() && bg_error_.ok()) bg_error_ = s;
  job.MarkBusy(&busy_, false);
  running_jobs_--;
  done_cv_.notify_all();
  bg_cv_.notify_all();
  return s;
}

Status DBImpl::CompactInline(std::unique_lock<std::mutex>& l) {
  CompactionJob job;
  while (bg_error_.ok() && PickCompaction(*versions_->current(), options_, busy_, &job)) {
    job.MarkBusy(&busy_, true);
    Status s = RunJob(l, job);
    if (!s.ok()) return s;
  }
  return bg_error_;
}

void DBImpl::FlushThread() {
  std::unique_lock<std::mutex> l(mu_);
  for (;;) {
    bg_cv_.wait(l, [&] { return shutting_down_ || (!imms_.empty() && bg_error_.ok()); });
    if (shutting_down_) break;
    FlushOldest(l);
  }
}

void DBImpl::CompactionThread() {
  std::unique_lock<std::mutex> l(mu_);
  for (;;) {
    CompactionJob job;
    bg_cv_.wait(l, [&] {
      return shutting_down_ ||
             (bg_error_.ok() && paused_ == 0 &&
              PickCompaction(*versions_->current(), options_, busy_, &job));
    });
    if (shutting_down_) break;
    job.MarkBusy(&busy_, true);
    RunJob(l, job);
  }
}

bool DBImpl::Idle() const {
  if (!imms_.empty() || flush_running_ || running_jobs_ > 0) return false;
  CompactionJob job;
  return !PickCompaction(*versions_->current(), options_, busy_, &job);
}

Status DBImpl::Flush() {
  Writer w;
  w.batch = nullptr;
  w.sync = false;
  std::unique_lock<std::mutex> l(mu_);
  writers_.push_back(&w);
  while (&w != writers_.front()) w.cv.wait(l);
  Status s = MakeRoomForWrite(l, true);
  writers_.pop_front();
  if (!writers_.empty()) writers_.front()->cv.notify_one();
  if (!s.ok()) return s;
  bg_cv_.notify_all();
  done_cv_.wait(l, [&] { return !bg_error_.ok() || imms_.empty(); });
  return bg_error_;
}

Status DBImpl::WaitForIdle() {
  std::unique_lock<std::mutex> l(mu_);
  if (options_.deterministic) return bg_error_;
  bg_cv_.notify_all();
  done_cv_.wait(l, [&] { return !bg_error_.ok() || Idle(); });
  return bg_error_;
}

Status DBImpl::CompactAll() {
  Status s = Flush();
  if (!s.ok()) return s;
  std::unique_lock<std::mutex> l(mu_);
  paused_++;
  done_cv_.wait(l, [&] { return running_jobs_ == 0; });
  for (int level = 0; level < options_.layout.L() && s.ok(); level++) {
    int groups = level == 0 ? 1 : options_.layout.num_groups(level);
    for (int g = 0; g < groups && s.ok(); g++) {
      CompactionJob job;
      if (!WholeRunJob(*versions_->current(), options_, level, g, &job)) continue;
      job.MarkBusy(&busy_, true);
      s = RunJob(l, job);
    }
  }
  paused_--;
  bg_cv_.notify_all();
  return s;
}

Status DBImpl::Read(const ReadOptions& o, Key key, const ColumnSet& projection,
                    RowResult* result) {
  Status s = CheckProjection(options_.schema, projection);
  if (!s.ok()) return s;
  auto sv = GetSuperVersion();
  const SeqNo snapshot = last_seq_.load(std::memory_order_acquire);
  InitTrace(options_.layout, o.trace);
  QuerySink sink(this, o.trace);
  const ColumnSet all = options_.schema.AllColumns();

  RowMerger m;
  m.Reset(projection);
  int deepest = -1;
  sv->mem->Get(key, snapshot, &m);
  for (size_t i = 0; i < sv->imms.size() && !m.Done(); i++) sv->imms[i]->Get(key, snapshot, &m);
  const Version& v = *sv->version;
  if (!m.Done()) {
    deepest = 0;
    for (const auto& f : v.level0()) {
      int reads;
      bool found;
      s = f->reader->Get(key, all, 0, &m, &reads, &found);
      sink.Add(0, 0, reads);
      if (!s.ok()) return s;
      if (m.Done()) break;
    }
  }
  for (int i = 1; i <= v.L() && !m.Done(); i++) {
    deepest = i;
    const auto& groups = options_.layout.groups(i);
    for (int g = 0; g < static_cast<int>(groups.size()) && !m.Done(); g++) {
      if (!groups[g].Intersects(m.unresolved())) continue;
      const FileMeta* f = v.FindFile(i, g, key);
      if (f == nullptr) continue;
      int reads;
      bool found;
      s = f->reader->Get(key, groups[g], i, &m, &reads, &found);
      sink.Add(i, g, reads);
      if (!s.ok()) return s;
    }
  }
  if (o.trace) o.trace->deepest_level = deepest;
  if (profiler_ && o.profile) profiler_->RecordRead(deepest, projection);
  FillRow(m, projection, result);
  if (m.values().Empty()) return Status::NotFound();
  return Status::OK();
}

class DBScanIterator : public ScanIterator {
 public:
  DBScanIterator(DBImpl* db, const ReadOptions& o, Key lo, Key hi, const ColumnSet& proj)
      : db_(db), proj_(proj), profile_(o.profile), sink_(db, o.trace) {
    const Options& opts = db->options_;
    InitTrace(opts.layout, o.trace);
    status_ = CheckProjection(opts.schema, proj);
    if (!status_.ok() || lo > hi) return;
    sv_ = db->GetSuperVersion();
    const SeqNo snapshot = db->last_seq_.load(std::memory_order_acquire);
    const ColumnSet all = opts.schema.AllColumns();
    std::vector<std::unique_ptr<MergeSource>> children;
    children.push_back(std::make_unique<MemTableSource>(sv_->mem, snapshot, all, hi));
    for (const auto& imm : sv_->imms) {
      children.push_back(std::make_unique<MemTableSource>(imm, snapshot, all, hi));
    }
    const Version& v = *sv_->version;
    for (const auto& f : v.level0()) {
      if (f->largest < lo || f->smallest > hi) continue;
      children.push_back(std::make_unique<SstRunSource>(std::vector<FileRef>{f}, all, 0, 0, lo,
                                                        hi, &sink_));
    }
    for (int i = 1; i <= v.L(); i++) {
      std::vector<std::unique_ptr<MergeSource>> groups;
      const auto& gs = opts.layout.groups(i);
      for (int g = 0; g < static_cast<int>(gs.size()); g++) {
        if (!gs[g].Intersects(proj)) continue;
        auto files = v.Overlapping(i, g, lo, hi);
        if (files.empty()) continue;
        groups.push_back(
            std::make_unique<SstRunSource>(std::move(files), gs[g], i, g, lo, hi, &sink_));
      }
      if (!groups.empty()) {
        children.push_back(std::make_unique<ColumnMergingIterator>(std::move(groups)));
      }
    }
    emitted_.assign(opts.layout.num_levels(), 0);
    iter_ = std::make_unique<LevelMergingIterator>(std::move(children));
    iter_->Seek(lo);
    Advance();
  }

  ~DBScanIterator() override {
    if (db_->profiler_ && profile_ && status_.ok()) db_->profiler_->RecordScan(proj_, emitted_);
  }

  bool Valid() const override { return valid_; }
  void Next() override { Advance(); }
  Key key() const override { return key_; }
  const RowResult& row() const override { return row_; }
  Status status() const override { return status_; }

 private:
  void Advance() {
    valid_ = false;
    if (!iter_) return;
    for (;;) {
      m_.Reset(proj_);
      if (!iter_->NextKey(&m_, &key_)) break;
      if (m_.values().Empty()) continue;
      FillRow(m_, proj_, &row_);
      int lvl = m_.first_value_level();
      if (lvl >= 0) emitted_[lvl]++;
      valid_ = true;
      return;
    }
    status_ = iter_->status();
  }

  DBImpl* db_;
  ColumnSet proj_;
  bool profile_;
  QuerySink sink_;
  std::shared_ptr<const DBImpl::SuperVersion> sv_;
  std::unique_ptr<LevelMergingIterator> iter_;
  RowMerger m_;
  RowResult row_;
  Key key_ = 0;
  bool valid_ = false;
  Status status_;
  std::vector<uint64_t> emitted_;
};

std::unique_ptr<ScanIterator> DBImpl::Scan(const ReadOptions& o, Key lo, Key hi,
                                           const ColumnSet& projection) {
  return std::make_unique<DBScanIterator>(this, o, lo, hi, projection);
}

Statistics DBImpl::GetStatistics() const {
  Statistics st;
  const LayoutConfig& layout = options_.layout;
  const double dt = options_.schema.dt_size;
  st.block_reads.resize(layout.num_levels());
  for (int i = 0; i < layout.num_levels(); i++) {
    for (int g = 0; g < layout.num_groups(i); g++) {
      st.block_reads[i].push_back(block_reads_[group_offset_[i] + g].load());
    }
  }
  st.bytes_flushed = bytes_flushed_;
  st.bytes_compacted_read = bytes_compacted_read_;
  st.bytes_compacted_written = bytes_compacted_written_;
  st.flushes = flushes_;
  st.compactions = compactions_;
  st.write_stalls = stalls_;
  st.write_stall_micros = stall_micros_;
  st.last_seq = last_seq_.load();
  auto sv = GetSuperVersion();
  const Version& v = *sv->version;
  for (int i = 0; i < layout.num_levels(); i++) {
    LevelSummary ls;
    ls.level = i;
    std::vector<std::pair<double, double>> ages;  // (age, weight)
    int ng = layout.num_groups(i);
    for (int g = 0; g < ng; g++) {
      GroupSummary gs;
      gs.columns = layout.groups(i)[g];
      const std::vector<FileRef>& files = i == 0 ? v.level0() : v.run(i, g);
      for (const auto& f : files) {
        gs.files++;
        gs.entries += f->num_entries;
        gs.values += f->value_count;
        gs.file_bytes += f->file_size;
        gs.nominal_bytes += f->NominalBytes(dt);
        const auto& samples = f->reader->props().seq_samples;
        for (SeqNo s : samples) {
          ages.emplace_back(double(st.last_seq - std::min(s, st.last_seq)),
                            double(f->num_entries) / samples.size());
        }
      }
      if (i > 0 && i < layout.L()) {
        gs.capacity_bytes = double(options_.params.LevelCapacity(i)) * (1 + gs.columns.Size()) * dt;
      }
      ls.files += gs.files;
      ls.entries += gs.entries;
      ls.file_bytes += gs.file_bytes;
      ls.nominal_bytes += gs.nominal_bytes;
      ls.capacity_bytes += gs.capacity_bytes;
      ls.groups.push_back(gs);
    }
    if (!ages.empty()) {
      std::sort(ages.begin(), ages.end());
      double total = 0;
      for (const auto& a : ages) total += a.second;
      auto quantile = [&](double q) {
        double acc = 0;
        for (const auto& a : ages) {
          acc += a.second;
          if (acc >= q * total) return a.first;
        }
        return ages.back().first;
      };
      ls.age_p10 = quantile(0.1);
      ls.age_median = quantile(0.5);
      ls.age_p90 = quantile(0.9);
    }
    st.levels.push_back(std::move(ls));
  }
  return st;
}

void DBImpl::ResetCounters() {
  for (size_t i = 0; i < num_counters_; i++) block_reads_[i] = 0;
  bytes_flushed_ = 0;
  bytes_compacted_read_ = 0;
  bytes_compacted_written_ = 0;
  flushes_ = 0;
  compactions_ = 0;
  stalls_ = 0;
  stall_micros_ = 0;
}

TraceStats DBImpl::GetProfile() const {
  if (!profiler_) return TraceStats();
  TraceStats t = profiler_->Snapshot();
  t.window_last_seq = last_seq_.load();
  return t;
}

void DBImpl::ResetProfile() {
  if (!profiler_) return;
  profiler_->Reset();
  profiler_->SetSeqWindow(last_seq_.load() + 1, 0);
}

std::vector<LiveFile> DBImpl::GetLiveFiles() const {
  std::vector<LiveFile> out;
  auto sv = GetSuperVersion();
  sv->version->ForEachFile([&](const FileRef& f) {
    out.push_back({f->number, f->level, f->group, f->columns, SstFileName(dir_, f->number),
                   f->num_entries, f->smallest, f->largest});
  });
  return out;
}

std::string Statistics::ToString() const {
  std::ostringstream os;
  os << "last_seq " << last_seq << " flushes " << flushes << " compactions " << compactions
     << " stalls " << write_stalls << "\n";
  os << "bytes flushed " << bytes_flushed << " compaction read " << bytes_compacted_read
     << " written " << bytes_compacted_written << "\n";
  for (const auto& l : levels) {
    os << "L" << l.level << ": files " << l.files << " entries " << l.entries << " bytes "
       << l.file_bytes << " nominal " << uint64_t(l.nominal_bytes);
    if (l.capacity_bytes > 0) os << " fill " << l.nominal_bytes / l.capacity_bytes;
    os << " age p50 " << l.age_median << " reads ";
    uint64_t r = 0;
    for (uint64_t b : block_reads[l.level]) r += b;
    os << r << "\n";
  }
  return os.str();
}

}  // namespace laser
