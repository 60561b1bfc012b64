#include "log.h"

#include "util/coding.h"
#include "util/crc.h"

namespace laser {

Status LogWriter::AddRecord(const std::string& payload) {
  char header[8];
  uint32_t len = static_cast<uint32_t>(payload.size());
  uint32_t crc = Crc32(payload.data(), payload.size());
  std::memcpy(header, &len, 4);
  std::memcpy(header + 4, &crc, 4);
  Status s = file_->Append(header, 8);
  if (s.ok()) s = file_->Append(payload);
  return s;
}

LogReader::Result LogReader::Next(std::string_view* payload) {
  const uint64_t n = data_.size();
  if (pos_ == n) return Result::kEof;
  if (n - pos_ < 8) return Result::kTornTail;
  uint32_t len = DecodeFixed32(data_.data() + pos_);
  uint32_t crc = DecodeFixed32(data_.data() + pos_ + 4);
  if (n - pos_ - 8 < len) return Result::kTornTail;
  const char* p = data_.data() + pos_ + 8;
  if (Crc32(p, len) != crc) {
    // A bad record that is the last thing in the file was being written
    // when the process died.
    return pos_ + 8 + len == n ? Result::kTornTail : Result::kCorruption;
  }
  *payload = std::string_view(p, len);
  pos_ += 8 + len;
  valid_end_ = pos_;
  return Result::kRecord;
}

}  // namespace laser
