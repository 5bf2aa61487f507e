#include "capkit/logging.hpp"

#include <iostream>
#include <mutex>

namespace capkit {

namespace {

std::mutex g_mutex;
WarningHandler g_handler;

}  // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    g_handler = std::move(handler);
}

void warn(std::string_view message) {
    WarningHandler handler;
    {
        std::lock_guard lock(g_mutex);
        handler = g_handler;
    }
    if (handler) {
        handler(message);
    } else {
        std::cerr << "capkit: warning: " << message << "\n";
    }
}

}  // namespace capkit
