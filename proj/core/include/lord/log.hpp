#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace lord::log {

using Sink = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& mutex() {
    static std::mutex m;
    return m;
}
inline Sink& sink() {
    static Sink s = [](const std::string& msg) { std::cerr << msg << '\n'; };
    return s;
}
}  // namespace detail

// Replaces the warning sink; pass nullptr to restore stderr.
inline void set_sink(Sink s) {
    std::lock_guard<std::mutex> lock(detail::mutex());
    if (s)
        detail::sink() = std::move(s);
    else
        detail::sink() = [](const std::string& msg) { std::cerr << msg << '\n'; };
}

inline void warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(detail::mutex());
    detail::sink()("warning: " + msg);
}

}  // namespace lord::log
