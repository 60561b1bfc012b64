#include "laser/status.h"

namespace laser {

std::string Status::ToString() const {
  const char* name = "OK";
  switch (code_) {
    case Code::kOk:
      return "OK";
    case Code::kNotFound:
      name = "NotFound";
      break;
    case Code::kCorruption:
      name = "Corruption";
      break;
    case Code::kInvalidArgument:
      name = "Invalid argument";
      break;
    case Code::kIOError:
      name = "IO error";
      break;
    case Code::kBusy:
      name = "Busy";
      break;
    case Code::kNotSupported:
      name = "Not supported";
      break;
  }
  std::string r = name;
  if (!msg_.empty()) {
    r += ": ";
    r += msg_;
  }
  return r;
}

}  // namespace laser
