#pragma once

// Record framing shared by the WAL and the manifest:
//   [u32 length][u32 crc32(payload)][payload]

#include <memory>
#include <string>

#include "laser/status.h"
#include "util/file.h"

namespace laser {

class LogWriter {
 public:
  explicit LogWriter(std::unique_ptr<WritableFile> file) : file_(std::move(file)) {}
  // Buffers the record; Flush() or Sync() makes it visible to the OS/disk.
  Status AddRecord(const std::string& payload);
  Status Flush() { return file_->Flush(); }
  Status Sync() { return file_->Sync(); }
  Status Close() { return file_->Close(); }
  uint64_t size() const { return file_->size(); }
  const std::string& path() const { return file_->path(); }

 private:
  std::unique_ptr<WritableFile> file_;
};

// Reads a whole log file. A damaged record that reaches the end of the file
// is a torn tail; damage followed by more data is corruption.
class LogReader {
 public:
  enum class Result { kRecord, kEof, kTornTail, kCorruption };

  explicit LogReader(std::string contents) : data_(std::move(contents)) {}
  Result Next(std::string_view* payload);
  uint64_t offset() const { return pos_; }
  // Offset where the valid prefix ends (useful to truncate a torn tail).
  uint64_t valid_end() const { return valid_end_; }

 private:
  std::string data_;
  uint64_t pos_ = 0;
  uint64_t valid_end_ = 0;
};

}  // namespace laser
