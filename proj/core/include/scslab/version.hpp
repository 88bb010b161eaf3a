#pragma once

namespace scslab {

/// Library version string, e.g. "0.3.0".
const char* version() noexcept;

}  // namespace scslab
