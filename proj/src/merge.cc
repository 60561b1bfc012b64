#include "merge.h"

#include <algorithm>

namespace laser {

MemTableSource::MemTableSource(std::shared_ptr<MemTable> mem, SeqNo snapshot,
                               const ColumnSet& scope, Key hi)
    : mem_(std::move(mem)), it_(mem_.get(), snapshot), scope_(scope), hi_(hi) {}

void MemTableSource::ApplyAndNext(RowMerger* merger) {
  Key k = it_.entry().key;
  do {
    merger->Apply(it_.entry(), scope_, -1);
    it_.Next();
  } while (it_.Valid() && it_.entry().key == k);
}

SstRunSource::SstRunSource(std::vector<FileRef> files, const ColumnSet& scope, int level,
                           int group, Key lo, Key hi, BlockReadSink* sink)
    : files_(std::move(files)),
      scope_(scope),
      level_(level),
      group_(group),
      lo_(lo),
      hi_(hi),
      sink_(sink) {}

void SstRunSource::OpenFile(size_t i, Key seek) {
  file_idx_ = i;
  iter_.reset();
  if (i >= files_.size() || files_[i]->smallest > hi_) return;
  iter_ = std::make_unique<SstIterator>(files_[i]->reader, lo_, hi_, level_, group_, sink_);
  iter_->Seek(seek);
  if (!iter_->status().ok()) status_ = iter_->status();
}

void SstRunSource::SkipExhausted() {
  while (iter_ != nullptr && !iter_->Valid()) {
    if (!iter_->status().ok()) {
      status_ = iter_->status();
      iter_.reset();
      return;
    }
    OpenFile(file_idx_ + 1, lo_);
  }
}

void SstRunSource::Seek(Key key) {
  key = std::max(key, lo_);
  auto it = std::lower_bound(files_.begin(), files_.end(), key,
                             [](const FileRef& f, Key k) { return f->largest < k; });
  OpenFile(it - files_.begin(), key);
  SkipExhausted();
}

void SstRunSource::NextEntry() {
  iter_->Next();
  SkipExhausted();
}

void SstRunSource::ApplyAndNext(RowMerger* merger) {
  Key k = iter_->entry().key;
  do {
    merger->Apply(iter_->entry(), scope_, level_);
    NextEntry();
  } while (Valid() && key() == k);
}

ColumnMergingIterator::ColumnMergingIterator(std::vector<std::unique_ptr<MergeSource>> groups)
    : groups_(std::move(groups)) {}

void ColumnMergingIterator::FindMin() {
  valid_ = false;
  for (const auto& g : groups_) {
    if (g->Valid() && (!valid_ || g->key() < key_)) {
      key_ = g->key();
      valid_ = true;
    }
  }
}

void ColumnMergingIterator::Seek(Key key) {
  for (auto& g : groups_) g->Seek(key);
  FindMin();
}

void ColumnMergingIterator::ApplyAndNext(RowMerger* merger) {
  for (auto& g : groups_) {
    if (g->Valid() && g->key() == key_) g->ApplyAndNext(merger);
  }
  FindMin();
}

Status ColumnMergingIterator::status() const {
  for (const auto& g : groups_) {
    Status s = g->status();
    if (!s.ok()) return s;
  }
  return Status::OK();
}

LevelMergingIterator::LevelMergingIterator(std::vector<std::unique_ptr<MergeSource>> children)
    : children_(std::move(children)) {}

void LevelMergingIterator::Seek(Key key) {
  heap_ = {};
  for (size_t i = 0; i < children_.size(); i++) {
    children_[i]->Seek(key);
    if (children_[i]->Valid()) heap_.push({children_[i]->key(), i});
  }
}

bool LevelMergingIterator::NextKey(RowMerger* merger, Key* key) {
  if (heap_.empty()) return false;
  *key = heap_.top().key;
  // The heap orders equal keys by child index, i.e. newest first.
  current_.clear();
  while (!heap_.empty() && heap_.top().key == *key) {
    current_.push_back(heap_.top().child);
    heap_.pop();
  }
  for (size_t c : current_) {
    children_[c]->ApplyAndNext(merger);
    if (children_[c]->Valid()) heap_.push({children_[c]->key(), c});
  }
  return true;
}

Status LevelMergingIterator::status() const {
  for (const auto& c : children_) {
    Status s = c->status();
    if (!s.ok()) return s;
  }
  return Status::OK();
}

}  // namespace laser
