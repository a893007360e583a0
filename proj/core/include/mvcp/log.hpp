#pragma once

#include <string_view>

namespace mvcp {

// Warnings go to stderr unless silenced (tests, benchmarks).
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);
bool warnings_enabled();

}  // namespace mvcp
