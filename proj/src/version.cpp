#include "uavmec/version.hpp"

namespace uavmec {

std::string_view git_describe() { return UAVMEC_GIT_DESCRIBE; }

}  // namespace uavmec
