#pragma once

#include <memory>
#include <queue>
#include <vector>

#include "entry.h"
#include "memtable.h"
#include "version.h"

namespace laser {

// One input of a merge. Yields keys in ascending order; for each key the
// caller applies every version at once.
class MergeSource {
 public:
  virtual ~MergeSource() = default;
  virtual void Seek(Key key) = 0;
  virtual bool Valid() const = 0;
  virtual Key key() const = 0;
  // Applies the versions of key() newest first and moves to the next key.
  virtual void ApplyAndNext(RowMerger* merger) = 0;
  virtual Status status() const { return Status::OK(); }
};

class MemTableSource : public MergeSource {
 public:
  MemTableSource(std::shared_ptr<MemTable> mem, SeqNo snapshot, const ColumnSet& scope,
                 Key hi = ~Key{0});
  void Seek(Key key) override { it_.Seek(key); }
  bool Valid() const override { return it_.Valid() && it_.entry().key <= hi_; }
  Key key() const override { return it_.entry().key; }
  void ApplyAndNext(RowMerger* merger) override;

 private:
  std::shared_ptr<MemTable> mem_;
  MemTable::Iterator it_;
  ColumnSet scope_;
  Key hi_;
};

// A sorted run of SSTs (one level-0 file, or one group run of a deeper
// level) restricted to [lo, hi]. Files are opened as the scan reaches them.
class SstRunSource : public MergeSource {
 public:
  SstRunSource(std::vector<FileRef> files, const ColumnSet& scope, int level, int group, Key lo,
               Key hi, BlockReadSink* sink);
  void Seek(Key key) override;
  bool Valid() const override { return iter_ != nullptr && iter_->Valid(); }
  Key key() const override { return iter_->entry().key; }
  void ApplyAndNext(RowMerger* merger) override;
  Status status() const override { return status_; }

  // Entry at the current position, for callers that copy entries verbatim.
  EntryView entry() const { return iter_->entry(); }
  void NextEntry();

 private:
  void OpenFile(size_t i, Key seek);
  void SkipExhausted();

  std::vector<FileRef> files_;
  ColumnSet scope_;
  int level_, group_;
  Key lo_, hi_;
  BlockReadSink* sink_;
  size_t file_idx_ = 0;
  std::unique_ptr<SstIterator> iter_;
  Status status_;
};

// Stitches the group runs of one level. Groups are disjoint, so the
// versions of a key in different groups never shadow each other.
class ColumnMergingIterator : public MergeSource {
 public:
  explicit ColumnMergingIterator(std::vector<std::unique_ptr<MergeSource>> groups);
  void Seek(Key key) override;
  bool Valid() const override { return valid_; }
  Key key() const override { return key_; }
  void ApplyAndNext(RowMerger* merger) override;
  Status status() const override;

 private:
  void FindMin();

  std::vector<std::unique_ptr<MergeSource>> groups_;
  bool valid_ = false;
  Key key_ = 0;
};

// Merges sources given newest first (memtables, level-0 runs, then levels
// in order) into one stream of resolved keys.
class LevelMergingIterator {
 public:
  explicit LevelMergingIterator(std::vector<std::unique_ptr<MergeSource>> children);
  void Seek(Key key);
  // Resolves the next key into `merger`, which the caller has Reset.
  // Returns false at the end.
  bool NextKey(RowMerger* merger, Key* key);
  Status status() const;

 private:
  struct HeapItem {
    Key key;
    size_t child;
    bool operator>(const HeapItem& o) const {
      return key != o.key ? key > o.key : child > o.child;
    }
  };

  std::vector<std::unique_ptr<MergeSource>> children_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
  std::vector<size_t> current_;
};

}  // namespace laser
