#pragma once

#include <sstream>
#include <string>

namespace sonic::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

/// Current level, read once from SONIC_ANNULUS_LOG (error|info|debug).
Level level();

void write(Level lvl, const std::string& message);

template <typename... Args>
void info(Args&&... args) {
    if (level() < Level::Info) return;
    std::ostringstream os;
    (os << ... << args);
    write(Level::Info, os.str());
}

template <typename... Args>
void debug(Args&&... args) {
    if (level() < Level::Debug) return;
    std::ostringstream os;
    (os << ... << args);
    write(Level::Debug, os.str());
}

template <typename... Args>
void error(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    write(Level::Error, os.str());
}

}  // namespace sonic::log
