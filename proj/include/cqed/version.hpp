#pragma once

namespace cqed {

inline constexpr const char* version = "0.1.0";

} // namespace cqed
