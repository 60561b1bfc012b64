#include "util/file.h"

#include <dirent.h>
#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace laser {

namespace {
Status ErrnoStatus(const std::string& ctx, int err) {
  return Status::IOError(ctx + ": " + std::strerror(err));
}
constexpr size_t kWriteBuffer = 64 << 10;
}  // namespace

WritableFile::~WritableFile() { Close(); }

Status WritableFile::Create(const std::string& path, std::unique_ptr<WritableFile>* out) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) return ErrnoStatus(path, errno);
  auto f = std::make_unique<WritableFile>();
  f->fd_ = fd;
  f->path_ = path;
  *out = std::move(f);
  return Status::OK();
}

Status WritableFile::Append(const char* data, size_t n) {
  size_ += n;
  if (buf_.size() + n > kWriteBuffer) {
    Status s = Flush();
    if (!s.ok()) return s;
    if (n > kWriteBuffer) {
      while (n > 0) {
        ssize_t w = ::write(fd_, data, n);
        if (w < 0) {
          if (errno == EINTR) continue;
          return ErrnoStatus(path_, errno);
        }
        data += w;
        n -= w;
      }
      return Status::OK();
    }
  }
  buf_.append(data, n);
  return Status::OK();
}

Status WritableFile::Flush() {
  const char* p = buf_.data();
  size_t n = buf_.size();
  while (n > 0) {
    ssize_t w = ::write(fd_, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      return ErrnoStatus(path_, errno);
    }
    p += w;
    n -= w;
  }
  buf_.clear();
  return Status::OK();
}

Status WritableFile::Sync() {
  Status s = Flush();
  if (!s.ok()) return s;
  if (::fdatasync(fd_) != 0) return ErrnoStatus(path_, errno);
  return Status::OK();
}

Status WritableFile::Close() {
  if (fd_ < 0) return Status::OK();
  Status s = Flush();
  ::close(fd_);
  fd_ = -1;
  return s;
}

RandomAccessFile::~RandomAccessFile() {
  if (fd_ >= 0) ::close(fd_);
}

Status RandomAccessFile::Open(const std::string& path, std::unique_ptr<RandomAccessFile>* out) {
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) return ErrnoStatus(path, errno);
  struct stat st;
  if (::fstat(fd, &st) != 0) {
    int e = errno;
    ::close(fd);
    return ErrnoStatus(path, e);
  }
  auto f = std::make_unique<RandomAccessFile>();
  f->fd_ = fd;
  f->size_ = st.st_size;
  f->path_ = path;
  *out = std::move(f);
  return Status::OK();
}

Status RandomAccessFile::Read(uint64_t offset, size_t n, char* scratch) const {
  size_t done = 0;
  while (done < n) {
    ssize_t r = ::pread(fd_, scratch + done, n - done, offset + done);
    if (r < 0) {
      if (errno == EINTR) continue;
      return ErrnoStatus(path_, errno);
    }
    if (r == 0) return Status::Corruption(path_ + ": short read");
    done += r;
  }
  return Status::OK();
}

Status ReadFileToString(const std::string& path, std::string* out) {
  std::unique_ptr<RandomAccessFile> f;
  Status s = RandomAccessFile::Open(path, &f);
  if (!s.ok()) return s;
  out->resize(f->size());
  if (f->size() == 0) return Status::OK();
  return f->Read(0, f->size(), out->data());
}

Status WriteStringToFileSync(const std::string& path, const std::string& data) {
  std::unique_ptr<WritableFile> f;
  Status s = WritableFile::Create(path, &f);
  if (s.ok()) s = f->Append(data);
  if (s.ok()) s = f->Sync();
  if (s.ok()) s = f->Close();
  return s;
}

Status RenameFile(const std::string& from, const std::string& to) {
  if (::rename(from.c_str(), to.c_str()) != 0) return ErrnoStatus(from, errno);
  return Status::OK();
}

Status SyncDir(const std::string& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return ErrnoStatus(dir, errno);
  ::fsync(fd);
  ::close(fd);
  return Status::OK();
}

Status ListDir(const std::string& dir, std::vector<std::string>* names) {
  names->clear();
  DIR* d = ::opendir(dir.c_str());
  if (d == nullptr) return ErrnoStatus(dir, errno);
  while (struct dirent* e = ::readdir(d)) {
    std::string n = e->d_name;
    if (n != "." && n != "..") names->push_back(n);
  }
  ::closedir(d);
  return Status::OK();
}

Status CreateDirIfMissing(const std::string& dir) {
  if (::mkdir(dir.c_str(), 0755) != 0 && errno != EEXIST) return ErrnoStatus(dir, errno);
  return Status::OK();
}

bool FileExists(const std::string& path) { return ::access(path.c_str(), F_OK) == 0; }

void RemoveFile(const std::string& path) { ::unlink(path.c_str()); }

Status TruncateFile(const std::string& path, uint64_t size) {
  if (::truncate(path.c_str(), static_cast<off_t>(size)) != 0) return ErrnoStatus(path, errno);
  return Status::OK();
}

}  // namespace laser
