#include "version.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <unordered_map>

#include "util/coding.h"
#include "util/file.h"

namespace laser {

namespace {

enum Tag : uint32_t {
  kLastSeq = 1,
  kFlushedSeq = 2,
  kNextFile = 3,
  kLayout = 4,
  kAddFile = 5,
  kDeleteFile = 6,
};

const char kCurrent[] = "CURRENT";

bool GetLengthPrefixed(std::string_view* in, std::string* out) {
  uint64_t n;
  if (!GetVarint64(in, &n) || n > in->size()) return false;
  out->assign(in->data(), n);
  in->remove_prefix(n);
  return true;
}

bool NewestFirst(const FileRef& a, const FileRef& b) {
  if (a->max_seq != b->max_seq) return a->max_seq > b->max_seq;
  return a->number > b->number;
}

bool ByKey(const FileRef& a, const FileRef& b) { return a->smallest < b->smallest; }

}  // namespace

std::string SstFileName(const std::string& dir, uint64_t number) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/%06" PRIu64 ".sst", number);
  return dir + buf;
}

std::string WalFileName(const std::string& dir, SeqNo first_seq) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "/%020" PRIu64 ".wal", first_seq);
  return dir + buf;
}

std::string ManifestFileName(const std::string& dir, uint64_t number) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "/MANIFEST-%06" PRIu64, number);
  return dir + buf;
}

Version::Version(const LayoutConfig& layout) : runs_(layout.num_levels()) {
  for (int i = 1; i < layout.num_levels(); i++) runs_[i].resize(layout.num_groups(i));
}

const FileMeta* Version::FindFile(int level, int group, Key key) const {
  const auto& run = runs_[level][group];
  auto it = std::lower_bound(run.begin(), run.end(), key,
                             [](const FileRef& f, Key k) { return f->largest < k; });
  if (it == run.end() || (*it)->smallest > key) return nullptr;
  return it->get();
}

std::vector<FileRef> Version::Overlapping(int level, int group, Key lo, Key hi) const {
  const auto& run = runs_[level][group];
  auto first = std::lower_bound(run.begin(), run.end(), lo,
                                [](const FileRef& f, Key k) { return f->largest < k; });
  std::vector<FileRef> out;
  for (auto it = first; it != run.end() && (*it)->smallest <= hi; ++it) out.push_back(*it);
  return out;
}

uint64_t Version::NumFiles() const {
  uint64_t n = 0;
  ForEachFile([&](const FileRef&) { n++; });
  return n;
}

class VersionBuilder {
 public:
  VersionBuilder(const LayoutConfig& layout, const Version& base) : layout_(layout) {
    base.ForEachFile([&](const FileRef& f) { files_[f->number] = f; });
  }

  Status Apply(const VersionEdit& edit, bool mark_obsolete) {
    for (uint64_t n : edit.deleted) {
      auto it = files_.find(n);
      if (it == files_.end()) {
        return Status::Corruption("manifest deletes unknown file " + std::to_string(n));
      }
      if (mark_obsolete && it->second->reader) it->second->reader->MarkObsolete();
      files_.erase(it);
    }
    for (const auto& f : edit.added) {
      if (f->level < 0 || f->level >= layout_.num_levels()) {
        return Status::Corruption("file level out of range");
      }
      if (f->level > 0 && (f->group < 0 || f->group >= layout_.num_groups(f->level) ||
                           layout_.groups(f->level)[f->group] != f->columns)) {
        return Status::Corruption("file group does not match layout");
      }
      files_[f->number] = f;
    }
    return Status::OK();
  }

  std::shared_ptr<Version> Build() const {
    auto v = std::make_shared<Version>(layout_);
    for (const auto& [_, f] : files_) {
      if (f->level == 0) {
        v->level0_.push_back(f);
      } else {
        v->runs_[f->level][f->group].push_back(f);
      }
    }
    std::sort(v->level0_.begin(), v->level0_.end(), NewestFirst);
    for (auto& lvl : v->runs_) {
      for (auto& run : lvl) std::sort(run.begin(), run.end(), ByKey);
    }
    return v;
  }

 private:
  const LayoutConfig& layout_;
  std::unordered_map<uint64_t, FileRef> files_;
};

void VersionEdit::EncodeTo(std::string* dst) const {
  if (has_layout) {
    PutVarint64(dst, kLayout);
    PutVarint64(dst, num_columns);
    PutVarint64(dst, layout_text.size());
    dst->append(layout_text);
  }
  if (has_last_seq) {
    PutVarint64(dst, kLastSeq);
    PutVarint64(dst, last_seq);
  }
  if (has_flushed_seq) {
    PutVarint64(dst, kFlushedSeq);
    PutVarint64(dst, flushed_seq);
  }
  if (has_next_file) {
    PutVarint64(dst, kNextFile);
    PutVarint64(dst, next_file);
  }
  for (uint64_t n : deleted) {
    PutVarint64(dst, kDeleteFile);
    PutVarint64(dst, n);
  }
  for (const auto& f : added) {
    PutVarint64(dst, kAddFile);
    PutVarint64(dst, f->number);
    PutVarint64(dst, f->level);
    PutVarint64(dst, f->group);
    PutVarint64(dst, f->columns.lo());
    PutVarint64(dst, f->columns.hi());
    PutVarint64(dst, f->file_size);
    PutFixed64(dst, f->smallest);
    PutFixed64(dst, f->largest);
    PutVarint64(dst, f->min_seq);
    PutVarint64(dst, f->max_seq);
    PutVarint64(dst, f->num_entries);
    PutVarint64(dst, f->value_count);
  }
}

Status VersionEdit::DecodeFrom(std::string_view in) {
  *this = VersionEdit();
  auto bad = [](const char* what) { return Status::Corruption(std::string("manifest: ") + what); };
  while (!in.empty()) {
    uint64_t tag;
    if (!GetVarint64(&in, &tag)) return bad("tag");
    switch (tag) {
      case kLayout: {
        uint64_t c;
        if (!GetVarint64(&in, &c) || !GetLengthPrefixed(&in, &layout_text)) return bad("layout");
        num_columns = static_cast<int>(c);
        has_layout = true;
        break;
      }
      case kLastSeq:
        if (!GetVarint64(&in, &last_seq)) return bad("last seq");
        has_last_seq = true;
        break;
      case kFlushedSeq:
        if (!GetVarint64(&in, &flushed_seq)) return bad("flushed seq");
        has_flushed_seq = true;
        break;
      case kNextFile:
        if (!GetVarint64(&in, &next_file)) return bad("next file");
        has_next_file = true;
        break;
      case kDeleteFile: {
        uint64_t n;
        if (!GetVarint64(&in, &n)) return bad("deleted file");
        deleted.push_back(n);
        break;
      }
      case kAddFile: {
        auto f = std::make_shared<FileMeta>();
        uint64_t level, group, lo, hi;
        if (!GetVarint64(&in, &f->number) || !GetVarint64(&in, &level) ||
            !GetVarint64(&in, &group) || !GetVarint64(&in, &lo) || !GetVarint64(&in, &hi) ||
            !GetVarint64(&in, &f->file_size) || !GetFixed64(&in, &f->smallest) ||
            !GetFixed64(&in, &f->largest) || !GetVarint64(&in, &f->min_seq) ||
            !GetVarint64(&in, &f->max_seq) || !GetVarint64(&in, &f->num_entries) ||
            !GetVarint64(&in, &f->value_count)) {
          return bad("added file");
        }
        f->level = static_cast<int>(level);
        f->group = static_cast<int>(group);
        f->columns = ColumnSet(lo, hi);
        added.push_back(std::move(f));
        break;
      }
      default:
        return bad("unknown tag");
    }
  }
  return Status::OK();
}

VersionSet::VersionSet(std::string dir, const Schema& schema, const LayoutConfig& layout)
    : dir_(std::move(dir)),
      schema_(schema),
      layout_(layout),
      current_(std::make_shared<Version>(layout)) {}

VersionSet::~VersionSet() {
  if (manifest_) manifest_->Close();
}

Status VersionSet::Apply(const VersionEdit& edit, bool open_files) {
  if (open_files) {
    for (const auto& f : edit.added) {
      if (f->reader) continue;
      Status s = SstReader::Open(SstFileName(dir_, f->number), &f->reader);
      if (!s.ok()) return s;
    }
  }
  VersionBuilder b(layout_, *current_);
  Status s = b.Apply(edit, /*mark_obsolete=*/true);
  if (!s.ok()) return s;
  current_ = b.Build();
  if (edit.has_last_seq) last_seq_ = std::max(last_seq_, edit.last_seq);
  if (edit.has_flushed_seq) flushed_seq_ = std::max(flushed_seq_, edit.flushed_seq);
  if (edit.has_next_file) next_file_ = std::max(next_file_, edit.next_file);
  return Status::OK();
}

Status VersionSet::Recover(bool* exists) {
  std::string current;
  *exists = FileExists(dir_ + "/" + kCurrent);
  if (!*exists) return Status::OK();
  Status s = ReadFileToString(dir_ + "/" + kCurrent, &current);
  if (!s.ok()) return s;
  if (current.empty() || current.back() != '\n') return Status::Corruption("bad CURRENT");
  current.pop_back();
  std::string contents;
  s = ReadFileToString(dir_ + "/" + current, &contents);
  if (!s.ok()) return s;

  // Collect the final state first so that files deleted later in the log
  // are never opened.
  VersionBuilder b(layout_, Version(layout_));
  LogReader reader(std::move(contents));
  std::string_view rec;
  bool saw_layout = false;
  for (;;) {
    LogReader::Result r = reader.Next(&rec);
    if (r == LogReader::Result::kEof || r == LogReader::Result::kTornTail) break;
    if (r == LogReader::Result::kCorruption) return Status::Corruption("manifest record checksum");
    VersionEdit edit;
    s = edit.DecodeFrom(rec);
    if (!s.ok()) return s;
    if (edit.has_layout) {
      LayoutConfig stored;
      s = LayoutConfig::Parse(edit.layout_text, &stored);
      if (!s.ok()) return Status::Corruption("manifest layout: " + s.message());
      if (edit.num_columns != schema_.num_columns || !(stored == layout_)) {
        return Status::InvalidArgument("database was created with a different schema or layout");
      }
      saw_layout = true;
    }
    s = b.Apply(edit, /*mark_obsolete=*/false);
    if (!s.ok()) return s;
    if (edit.has_last_seq) last_seq_ = std::max(last_seq_, edit.last_seq);
    if (edit.has_flushed_seq) flushed_seq_ = std::max(flushed_seq_, edit.flushed_seq);
    if (edit.has_next_file) next_file_ = std::max(next_file_, edit.next_file);
  }
  if (!saw_layout) return Status::Corruption("manifest has no layout");
  auto v = b.Build();
  Status open_status;
  v->ForEachFile([&](const FileRef& f) {
    if (!open_status.ok()) return;
    open_status = SstReader::Open(SstFileName(dir_, f->number), &f->reader);
    next_file_ = std::max(next_file_, f->number + 1);
  });
  if (!open_status.ok()) return open_status;
  current_ = v;
  return Status::OK();
}

Status VersionSet::WriteSnapshot() {
  uint64_t number = NewFileNumber();
  std::string path = ManifestFileName(dir_, number);
  std::unique_ptr<WritableFile> file;
  Status s = WritableFile::Create(path, &file);
  if (!s.ok()) return s;
  auto log = std::make_unique<LogWriter>(std::move(file));
  VersionEdit edit;
  edit.has_layout = true;
  edit.layout_text = layout_.ToText();
  edit.num_columns = schema_.num_columns;
  edit.SetLastSeq(last_seq_);
  edit.SetFlushedSeq(flushed_seq_);
  edit.SetNextFile(next_file_);
  current_->ForEachFile([&](const FileRef& f) { edit.added.push_back(f); });
  std::string rec;
  edit.EncodeTo(&rec);
  s = log->AddRecord(rec);
  if (s.ok()) s = log->Sync();
  if (s.ok()) {
    std::string name = path.substr(dir_.size() + 1) + "\n";
    std::string tmp = dir_ + "/CURRENT.tmp";
    s = WriteStringToFileSync(tmp, name);
    if (s.ok()) s = RenameFile(tmp, dir_ + "/" + kCurrent);
    if (s.ok()) s = SyncDir(dir_);
  }
  if (!s.ok()) {
    log->Close();
    RemoveFile(path);
    return s;
  }
  if (manifest_) {
    manifest_->Close();
    RemoveFile(ManifestFileName(dir_, manifest_number_));
  }
  manifest_ = std::move(log);
  manifest_number_ = number;
  return Status::OK();
}

Status VersionSet::LogAndApply(VersionEdit* edit) {
  if (!manifest_) return Status::IOError("manifest not open");
  edit->SetNextFile(next_file_);
  if (!edit->has_last_seq) edit->SetLastSeq(last_seq_);
  std::string rec;
  edit->EncodeTo(&rec);
  Status s = manifest_->AddRecord(rec);
  if (s.ok()) s = manifest_->Sync();
  if (!s.ok()) return s;
  return Apply(*edit, /*open_files=*/true);
}

void VersionSet::DeleteOrphans() {
  std::vector<std::string> names;
  if (!ListDir(dir_, &names).ok()) return;
  std::unordered_map<uint64_t, bool> live;
  current_->ForEachFile([&](const FileRef& f) { live[f->number] = true; });
  for (const auto& name : names) {
    uint64_t n;
    char tail[8];
    if (std::sscanf(name.c_str(), "%" SCNu64 ".%7s", &n, tail) == 2 &&
        std::string(tail) == "sst") {
      if (!live.count(n)) RemoveFile(dir_ + "/" + name);
    } else if (name.rfind("MANIFEST-", 0) == 0) {
      if (name != ManifestFileName(dir_, manifest_number_).substr(dir_.size() + 1)) {
        RemoveFile(dir_ + "/" + name);
      }
    }
  }
}

}  // namespace laser
