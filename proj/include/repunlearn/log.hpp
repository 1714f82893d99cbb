// Stderr logging, level from REPUNLEARN_LOG (error|warn|info|debug).
#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace repunlearn::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level threshold() {
    static const Level level = [] {
        const char* env = std::getenv("REPUNLEARN_LOG");
        if (env == nullptr) return Level::Warn;
        const std::string s(env);
        if (s == "error") return Level::Error;
        if (s == "warn") return Level::Warn;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return level;
}

template <typename... Args>
void emit(Level level, const char* tag, Args&&... args) {
    if (level > threshold()) return;
    std::ostringstream ss;
    ss << "[" << tag << "] ";
    (ss << ... << std::forward<Args>(args));
    std::cerr << ss.str() << "\n";
}

template <typename... Args>
void error(Args&&... args) {
    emit(Level::Error, "error", std::forward<Args>(args)...);
}

template <typename... Args>
void warn(Args&&... args) {
    emit(Level::Warn, "warn", std::forward<Args>(args)...);
}

template <typename... Args>
void info(Args&&... args) {
    emit(Level::Info, "info", std::forward<Args>(args)...);
}

template <typename... Args>
void debug(Args&&... args) {
    emit(Level::Debug, "debug", std::forward<Args>(args)...);
}

}  // namespace repunlearn::log
