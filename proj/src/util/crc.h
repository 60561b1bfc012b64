#pragma once

#include <cstddef>
#include <cstdint>

namespace laser {

uint32_t Crc32(const char* data, size_t n);

}  // namespace laser
