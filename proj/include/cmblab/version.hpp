#pragma once

namespace cmblab {

inline constexpr const char* version_string = "0.1.0";

}  // namespace cmblab
