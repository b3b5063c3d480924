#pragma once

namespace molcomm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace molcomm
