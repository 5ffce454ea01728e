#pragma once

#include <string_view>

namespace uavmec {

/// `git describe` of the source tree at configure time ("unknown" outside git).
std::string_view git_describe();

}  // namespace uavmec
