#pragma once

// File layout:
//   [data block + crc]* [index + crc] [bloom + crc] [props + crc] [footer]
// Index, bloom and props are loaded on open and stay in memory; data blocks
// are read on demand and each read is reported to a BlockReadSink.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "block.h"
#include "bloom.h"
#include "entry.h"
#include "laser/status.h"
#include "util/file.h"

namespace laser {

// Receives one call per data block read from disk.
class BlockReadSink {
 public:
  virtual ~BlockReadSink() = default;
  virtual void OnBlockRead(int level, int group) = 0;
};

struct SstIndexEntry {
  Key first_key = 0;
  Key last_key = 0;
  uint64_t offset = 0;
  uint32_t size = 0;  // excluding the crc
  uint32_t entries = 0;
};

struct SstProps {
  Key smallest = 0;
  Key largest = 0;
  SeqNo min_seq = 0;
  SeqNo max_seq = 0;
  uint64_t num_entries = 0;
  uint64_t num_keys = 0;  // distinct keys
  uint64_t num_tombstones = 0;
  uint64_t value_count = 0;
  // Evenly spaced quantiles of the entry seqs, ascending.
  std::vector<SeqNo> seq_samples;
};

struct SstBuildOptions {
  ColumnSet group;
  int entries_per_block = 1;
  int block_bytes = 4096;
  int bloom_bits_per_key = 10;
  int max_seq_samples = 64;
};

class SstBuilder {
 public:
  SstBuilder(std::string path, const SstBuildOptions& options);
  ~SstBuilder();
  SstBuilder(const SstBuilder&) = delete;
  SstBuilder& operator=(const SstBuilder&) = delete;

  Status Open();
  // Entries must arrive in (key asc, seq desc) order with present ⊆ group.
  Status Add(const EntryView& e);
  // Writes the metadata blocks and footer and syncs the file.
  Status Finish();
  // Deletes the partial file.
  void Abandon();

  uint64_t num_entries() const { return props_.num_entries; }
  uint64_t FileSize() const;
  const SstProps& props() const { return props_; }
  const std::string& path() const { return path_; }

 private:
  Status FlushBlock();
  Status WriteMeta(const std::string& contents, uint64_t* offset, uint32_t* size);

  std::string path_;
  SstBuildOptions options_;
  std::unique_ptr<WritableFile> file_;
  BlockBuilder block_;
  Key block_first_ = 0;
  Key block_last_ = 0;
  std::vector<SstIndexEntry> index_;
  BloomBuilder bloom_;
  std::vector<SeqNo> seqs_;
  SstProps props_;
  bool has_last_ = false;
  Key last_key_ = 0;
  bool finished_ = false;
};

class SstReader {
 public:
  static constexpr uint64_t kMagic = 0x4c41534552535354ull;
  static constexpr uint32_t kFormatVersion = 1;

  static Status Open(const std::string& path, std::shared_ptr<SstReader>* out);
  ~SstReader();

  const ColumnSet& group() const { return group_; }
  const SstProps& props() const { return props_; }
  uint64_t file_size() const { return file_->size(); }
  size_t num_blocks() const { return index_.size(); }
  const SstIndexEntry& index(size_t i) const { return index_[i]; }
  const std::string& path() const { return path_; }

  bool MayContain(Key key) const;
  // First block whose last key is >= key; num_blocks() if none.
  size_t FindBlock(Key key) const;
  // Reads, verifies and decodes one data block.
  Status ReadBlock(size_t i, DecodedBlock* out) const;

  // Applies every version of `key` to `merger` (newest first) using `scope`
  // as the writer scope. Consults the bloom filter first. A key may
  // straddle blocks, in which case each block touched is counted.
  Status Get(Key key, const ColumnSet& scope, int level, RowMerger* merger,
             int* blocks_read, bool* found) const;

  // The file is deleted when the last reference goes away.
  void MarkObsolete() { obsolete_.store(true); }

 private:
  SstReader() = default;

  std::string path_;
  std::unique_ptr<RandomAccessFile> file_;
  ColumnSet group_;
  std::vector<SstIndexEntry> index_;
  std::string bloom_;
  SstProps props_;
  std::atomic<bool> obsolete_{false};
};

// Iterates the entries of one SST with lo <= key <= hi, reading only the
// blocks that overlap the range.
class SstIterator {
 public:
  SstIterator(std::shared_ptr<SstReader> sst, Key lo, Key hi, int level, int group,
              BlockReadSink* sink);
  // Positions at the first entry >= max(key, lo).
  void Seek(Key key);
  bool Valid() const { return valid_; }
  void Next();
  EntryView entry() const { return block_.at(pos_); }
  const Status& status() const { return status_; }

 private:
  bool LoadBlock(size_t i);
  void SkipBlocks();

  std::shared_ptr<SstReader> sst_;
  Key lo_, hi_;
  int level_, group_;
  BlockReadSink* sink_;
  DecodedBlock block_;
  size_t block_idx_ = 0;
  bool block_loaded_ = false;
  size_t pos_ = 0;
  bool valid_ = false;
  Status status_;
};

}  // namespace laser
