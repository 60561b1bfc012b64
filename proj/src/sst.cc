#include "sst.h"

#include <algorithm>

#include "util/coding.h"
#include "util/crc.h"

namespace laser {

namespace {

constexpr size_t kFooterSize = 76;
constexpr uint8_t kCodecNone = 0;

std::string EncodeIndex(const std::vector<SstIndexEntry>& index) {
  std::string out;
  PutFixed32(&out, static_cast<uint32_t>(index.size()));
  for (const auto& e : index) {
    PutFixed64(&out, e.first_key);
    PutFixed64(&out, e.last_key);
    PutFixed64(&out, e.offset);
    PutFixed32(&out, e.size);
    PutFixed32(&out, e.entries);
  }
  return out;
}

bool DecodeIndex(std::string_view in, std::vector<SstIndexEntry>* index) {
  uint32_t n;
  if (!GetFixed32(&in, &n) || in.size() != size_t{n} * 32) return false;
  index->resize(n);
  for (auto& e : *index) {
    GetFixed64(&in, &e.first_key);
    GetFixed64(&in, &e.last_key);
    GetFixed64(&in, &e.offset);
    GetFixed32(&in, &e.size);
    GetFixed32(&in, &e.entries);
  }
  return true;
}

std::string EncodeProps(const SstProps& p) {
  std::string out;
  PutFixed64(&out, p.smallest);
  PutFixed64(&out, p.largest);
  PutVarint64(&out, p.min_seq);
  PutVarint64(&out, p.max_seq);
  PutVarint64(&out, p.num_entries);
  PutVarint64(&out, p.num_keys);
  PutVarint64(&out, p.num_tombstones);
  PutVarint64(&out, p.value_count);
  PutVarint64(&out, p.seq_samples.size());
  for (SeqNo s : p.seq_samples) PutVarint64(&out, s);
  return out;
}

bool DecodeProps(std::string_view in, SstProps* p) {
  uint64_t n;
  if (!GetFixed64(&in, &p->smallest) || !GetFixed64(&in, &p->largest) ||
      !GetVarint64(&in, &p->min_seq) || !GetVarint64(&in, &p->max_seq) ||
      !GetVarint64(&in, &p->num_entries) || !GetVarint64(&in, &p->num_keys) ||
      !GetVarint64(&in, &p->num_tombstones) || !GetVarint64(&in, &p->value_count) ||
      !GetVarint64(&in, &n) || n > in.size()) {
    return false;
  }
  p->seq_samples.resize(n);
  for (auto& s : p->seq_samples) {
    if (!GetVarint64(&in, &s)) return false;
  }
  return in.empty();
}

Status ReadChecked(const RandomAccessFile& file, uint64_t offset, uint32_t size,
                   std::string* out) {
  out->resize(size + 4);
  Status s = file.Read(offset, size + 4, out->data());
  if (!s.ok()) return s;
  if (Crc32(out->data(), size) != DecodeFixed32(out->data() + size)) {
    return Status::Corruption("block checksum mismatch");
  }
  out->resize(size);
  return Status::OK();
}

}  // namespace

SstBuilder::SstBuilder(std::string path, const SstBuildOptions& options)
    : path_(std::move(path)),
      options_(options),
      block_(options.group),
      bloom_(options.bloom_bits_per_key) {}

SstBuilder::~SstBuilder() {
  if (file_ != nullptr && !finished_) Abandon();
}

Status SstBuilder::Open() { return WritableFile::Create(path_, &file_); }

uint64_t SstBuilder::FileSize() const {
  return (file_ ? file_->size() : 0) + block_.CurrentSize();
}

Status SstBuilder::Add(const EntryView& e) {
  if (!block_.empty() &&
      (block_.count() >= options_.entries_per_block ||
       block_.SizeWith(e) > static_cast<size_t>(options_.block_bytes))) {
    Status s = FlushBlock();
    if (!s.ok()) return s;
  }
  if (block_.empty()) block_first_ = e.key;
  block_.Add(e);
  block_last_ = e.key;
  if (props_.num_entries == 0) {
    props_.smallest = e.key;
    props_.min_seq = e.seq;
    props_.max_seq = e.seq;
  }
  props_.largest = e.key;
  props_.min_seq = std::min(props_.min_seq, e.seq);
  props_.max_seq = std::max(props_.max_seq, e.seq);
  props_.num_entries++;
  if (e.kind == EntryKind::kTombstone) {
    props_.num_tombstones++;
  } else {
    props_.value_count += e.present.Size();
  }
  if (!has_last_ || e.key != last_key_) {
    props_.num_keys++;
    bloom_.AddKey(e.key);
  }
  has_last_ = true;
  last_key_ = e.key;
  seqs_.push_back(e.seq);
  return Status::OK();
}

Status SstBuilder::FlushBlock() {
  SstIndexEntry ie;
  ie.first_key = block_first_;
  ie.last_key = block_last_;
  ie.entries = static_cast<uint32_t>(block_.count());
  ie.offset = file_->size();
  std::string contents = block_.Finish();
  ie.size = static_cast<uint32_t>(contents.size());
  PutFixed32(&contents, Crc32(contents.data(), ie.size));
  index_.push_back(ie);
  return file_->Append(contents);
}

Status SstBuilder::WriteMeta(const std::string& contents, uint64_t* offset, uint32_t* size) {
  *offset = file_->size();
  *size = static_cast<uint32_t>(contents.size());
  Status s = file_->Append(contents);
  if (!s.ok()) return s;
  std::string crc;
  PutFixed32(&crc, Crc32(contents.data(), contents.size()));
  return file_->Append(crc);
}

Status SstBuilder::Finish() {
  Status s;
  if (!block_.empty()) s = FlushBlock();
  if (!s.ok()) return s;

  if (!seqs_.empty()) {
    size_t n = std::min<size_t>(options_.max_seq_samples, seqs_.size());
    std::sort(seqs_.begin(), seqs_.end());
    for (size_t i = 0; i < n; i++) {
      // Midpoints of n equal-count buckets.
      props_.seq_samples.push_back(seqs_[(2 * i + 1) * seqs_.size() / (2 * n)]);
    }
  }

  uint64_t index_off, bloom_off, props_off;
  uint32_t index_size, bloom_size, props_size;
  s = WriteMeta(EncodeIndex(index_), &index_off, &index_size);
  if (s.ok()) s = WriteMeta(bloom_.Finish(), &bloom_off, &bloom_size);
  if (s.ok()) s = WriteMeta(EncodeProps(props_), &props_off, &props_size);
  if (!s.ok()) return s;

  std::string footer;
  PutFixed64(&footer, index_off);
  PutFixed32(&footer, index_size);
  PutFixed64(&footer, bloom_off);
  PutFixed32(&footer, bloom_size);
  PutFixed64(&footer, props_off);
  PutFixed32(&footer, props_size);
  PutFixed64(&footer, props_.num_entries);
  PutFixed64(&footer, options_.group.lo());
  PutFixed64(&footer, options_.group.hi());
  PutFixed32(&footer, SstReader::kFormatVersion);
  footer.push_back(static_cast<char>(kCodecNone));
  footer.append(3, '\0');
  PutFixed64(&footer, SstReader::kMagic);
  s = file_->Append(footer);
  if (s.ok()) s = file_->Sync();
  if (s.ok()) s = file_->Close();
  if (s.ok()) finished_ = true;
  return s;
}

void SstBuilder::Abandon() {
  if (file_ != nullptr) file_->Close();
  file_.reset();
  RemoveFile(path_);
  finished_ = true;
}

Status SstReader::Open(const std::string& path, std::shared_ptr<SstReader>* out) {
  std::shared_ptr<SstReader> r(new SstReader());
  r->path_ = path;
  Status s = RandomAccessFile::Open(path, &r->file_);
  if (!s.ok()) return s;
  if (r->file_->size() < kFooterSize) return Status::Corruption("sst too short: " + path);
  char footer[kFooterSize];
  s = r->file_->Read(r->file_->size() - kFooterSize, kFooterSize, footer);
  if (!s.ok()) return s;
  std::string_view f(footer, kFooterSize);
  uint64_t index_off, bloom_off, props_off, entries, lo, hi, magic;
  uint32_t index_size, bloom_size, props_size, version, codec;
  GetFixed64(&f, &index_off);
  GetFixed32(&f, &index_size);
  GetFixed64(&f, &bloom_off);
  GetFixed32(&f, &bloom_size);
  GetFixed64(&f, &props_off);
  GetFixed32(&f, &props_size);
  GetFixed64(&f, &entries);
  GetFixed64(&f, &lo);
  GetFixed64(&f, &hi);
  GetFixed32(&f, &version);
  GetFixed32(&f, &codec);
  GetFixed64(&f, &magic);
  if (magic != kMagic) return Status::Corruption("bad sst magic: " + path);
  if (version != kFormatVersion || (codec & 0xff) != kCodecNone) {
    return Status::NotSupported("sst format: " + path);
  }
  r->group_ = ColumnSet(lo, hi);
  std::string buf;
  s = ReadChecked(*r->file_, index_off, index_size, &buf);
  if (!s.ok()) return s;
  if (!DecodeIndex(buf, &r->index_)) return Status::Corruption("bad sst index: " + path);
  s = ReadChecked(*r->file_, bloom_off, bloom_size, &r->bloom_);
  if (!s.ok()) return s;
  s = ReadChecked(*r->file_, props_off, props_size, &buf);
  if (!s.ok()) return s;
  if (!DecodeProps(buf, &r->props_) || r->props_.num_entries != entries) {
    return Status::Corruption("bad sst props: " + path);
  }
  *out = std::move(r);
  return Status::OK();
}

SstReader::~SstReader() {
  file_.reset();
  if (obsolete_.load()) RemoveFile(path_);
}

bool SstReader::MayContain(Key key) const {
  if (props_.num_entries == 0 || key < props_.smallest || key > props_.largest) return false;
  return BloomMayContain(bloom_, key);
}

size_t SstReader::FindBlock(Key key) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), key,
                             [](const SstIndexEntry& e, Key k) { return e.last_key < k; });
  return it - index_.begin();
}

Status SstReader::ReadBlock(size_t i, DecodedBlock* out) const {
  const SstIndexEntry& ie = index_[i];
  std::string buf;
  Status s = ReadChecked(*file_, ie.offset, ie.size, &buf);
  if (!s.ok()) return Status::Corruption(s.message() + ": " + path_);
  return DecodeBlock(buf, group_, out);
}

Status SstReader::Get(Key key, const ColumnSet& scope, int level, RowMerger* merger,
                      int* blocks_read, bool* found) const {
  *blocks_read = 0;
  *found = false;
  if (!MayContain(key)) return Status::OK();
  DecodedBlock block;
  for (size_t b = FindBlock(key); b < index_.size() && index_[b].first_key <= key; b++) {
    Status s = ReadBlock(b, &block);
    ++*blocks_read;
    if (!s.ok()) return s;
    size_t i = block.LowerBound(key);
    for (; i < block.size() && block.keys[i] == key; i++) {
      *found = true;
      merger->Apply(block.at(i), scope, level);
      if (merger->Done()) return Status::OK();
    }
    if (i < block.size()) break;
  }
  return Status::OK();
}

SstIterator::SstIterator(std::shared_ptr<SstReader> sst, Key lo, Key hi, int level, int group,
                         BlockReadSink* sink)
    : sst_(std::move(sst)), lo_(lo), hi_(hi), level_(level), group_(group), sink_(sink) {}

bool SstIterator::LoadBlock(size_t i) {
  block_idx_ = i;
  block_loaded_ = false;
  if (i >= sst_->num_blocks() || sst_->index(i).first_key > hi_) return false;
  if (sink_ != nullptr) sink_->OnBlockRead(level_, group_);
  status_ = sst_->ReadBlock(i, &block_);
  if (!status_.ok()) return false;
  block_loaded_ = true;
  return true;
}

void SstIterator::Seek(Key key) {
  key = std::max(key, lo_);
  valid_ = false;
  if (key > hi_) return;
  size_t b = sst_->FindBlock(key);
  if (!(block_loaded_ && block_idx_ == b)) {
    if (!LoadBlock(b)) return;
  }
  pos_ = block_.LowerBound(key);
  SkipBlocks();
}

void SstIterator::Next() {
  pos_++;
  SkipBlocks();
}

void SstIterator::SkipBlocks() {
  while (pos_ >= block_.size()) {
    if (!LoadBlock(block_idx_ + 1)) {
      valid_ = false;
      return;
    }
    pos_ = 0;
  }
  valid_ = block_.keys[pos_] <= hi_;
}

}  // namespace laser
