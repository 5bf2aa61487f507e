#pragma once
// Minimal warning sink. Library code never writes to stderr directly; the
// handler is swappable so tests can capture warnings and the CLI can route
// them through its own formatting.

#include <functional>
#include <string>
#include <string_view>

namespace capkit {

using WarningHandler = std::function<void(std::string_view)>;

// Replaces the process-wide warning handler. Passing an empty function
// restores the default (write to stderr with a "capkit: warning:" prefix).
void set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace capkit
