#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qnetsim {

enum class LogLevel { debug, info, warn, error, off };

std::optional<LogLevel> parse_log_level(std::string_view name) noexcept;

/// Structured event log. Every line reads `ts | who | event | detail`, where
/// ts is virtual time. Lines go to stderr at or above the stderr level and
/// into an in-memory transcript at or above the transcript level.
class EventLog {
public:
    explicit EventLog(std::function<double()> clock);
    ~EventLog();
    EventLog(const EventLog&) = delete;
    EventLog& operator=(const EventLog&) = delete;

    /// Level picked up by logs created afterwards (default warn).
    static void set_default_stderr_level(LogLevel level);
    static LogLevel default_stderr_level();

    void set_stderr_level(LogLevel level);
    void set_transcript_level(LogLevel level);
    bool enabled(LogLevel level) const;

    void log(LogLevel level, std::string_view who, std::string_view event, std::string_view detail);
    void debug(std::string_view who, std::string_view event, std::string_view detail) {
        log(LogLevel::debug, who, event, detail);
    }
    void info(std::string_view who, std::string_view event, std::string_view detail) {
        log(LogLevel::info, who, event, detail);
    }
    void warn(std::string_view who, std::string_view event, std::string_view detail) {
        log(LogLevel::warn, who, event, detail);
    }

    std::vector<std::string> transcript() const;
    void clear_transcript();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace qnetsim
