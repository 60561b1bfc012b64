#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "laser/status.h"

namespace laser {

class WritableFile {
 public:
  WritableFile() = default;
  ~WritableFile();
  WritableFile(const WritableFile&) = delete;
  WritableFile& operator=(const WritableFile&) = delete;

  static Status Create(const std::string& path, std::unique_ptr<WritableFile>* out);

  // Buffered; Flush() hands the bytes to the OS.
  Status Append(const char* data, size_t n);
  Status Append(const std::string& s) { return Append(s.data(), s.size()); }
  Status Flush();
  Status Sync();
  Status Close();
  uint64_t size() const { return size_; }
  const std::string& path() const { return path_; }

 private:
  int fd_ = -1;
  std::string path_;
  std::string buf_;
  uint64_t size_ = 0;
};

class RandomAccessFile {
 public:
  ~RandomAccessFile();
  static Status Open(const std::string& path, std::unique_ptr<RandomAccessFile>* out);
  Status Read(uint64_t offset, size_t n, char* scratch) const;
  uint64_t size() const { return size_; }

 private:
  int fd_ = -1;
  uint64_t size_ = 0;
  std::string path_;
};

Status ReadFileToString(const std::string& path, std::string* out);
Status WriteStringToFileSync(const std::string& path, const std::string& data);
Status RenameFile(const std::string& from, const std::string& to);
Status SyncDir(const std::string& dir);
Status ListDir(const std::string& dir, std::vector<std::string>* names);
Status CreateDirIfMissing(const std::string& dir);
bool FileExists(const std::string& path);
void RemoveFile(const std::string& path);
Status TruncateFile(const std::string& path, uint64_t size);

}  // namespace laser
