#include "sonic/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace sonic::log {

Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("SONIC_ANNULUS_LOG");
        if (!env) return Level::Error;
        const std::string s(env);
        if (s == "debug") return Level::Debug;
        if (s == "info") return Level::Info;
        return Level::Error;
    }();
    return lvl;
}

void write(Level lvl, const std::string& message) {
    static std::mutex mu;
    const char* tag = lvl == Level::Error ? "error" : (lvl == Level::Info ? "info" : "debug");
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[sonic-annulus " << tag << "] " << message << '\n';
}

}  // namespace sonic::log
