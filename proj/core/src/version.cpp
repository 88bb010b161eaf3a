#include "scslab/version.hpp"

namespace scslab {

const char* version() noexcept { return SCSLAB_VERSION; }

}  // namespace scslab
