#pragma once

namespace ndcglab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ndcglab
