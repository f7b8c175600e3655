#include "qnetsim/core/log.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

#include <fmt/format.h>
#include <spdlog/logger.h>
#include <spdlog/sinks/base_sink.h>
#include <spdlog/sinks/stdout_sinks.h>

namespace qnetsim {

namespace {

std::atomic<LogLevel> g_default_stderr_level{LogLevel::warn};

spdlog::level::level_enum to_spdlog(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return spdlog::level::debug;
        case LogLevel::info: return spdlog::level::info;
        case LogLevel::warn: return spdlog::level::warn;
        case LogLevel::error: return spdlog::level::err;
        case LogLevel::off: return spdlog::level::off;
    }
    return spdlog::level::off;
}

// Keeps formatted lines in memory for ScenarioResult transcripts.
class TranscriptSink final : public spdlog::sinks::base_sink<std::mutex> {
public:
    std::vector<std::string> lines() {
        std::lock_guard lock(mutex_);
        return lines_;
    }
    void clear() {
        std::lock_guard lock(mutex_);
        lines_.clear();
    }

protected:
    void sink_it_(const spdlog::details::log_msg& msg) override {
        lines_.emplace_back(msg.payload.data(), msg.payload.size());
    }
    void flush_() override {}

private:
    std::vector<std::string> lines_;
};

}  // namespace

std::optional<LogLevel> parse_log_level(std::string_view name) noexcept {
    if (name == "debug") return LogLevel::debug;
    if (name == "info") return LogLevel::info;
    if (name == "warn" || name == "warning") return LogLevel::warn;
    if (name == "error") return LogLevel::error;
    if (name == "off") return LogLevel::off;
    return std::nullopt;
}

struct EventLog::Impl {
    std::function<double()> clock;
    std::shared_ptr<spdlog::sinks::stderr_sink_mt> console;
    std::shared_ptr<TranscriptSink> transcript;
    std::unique_ptr<spdlog::logger> logger;

    void refresh_level() {
        logger->set_level(std::min(console->level(), transcript->level()));
    }
};

EventLog::EventLog(std::function<double()> clock) : impl_(std::make_unique<Impl>()) {
    impl_->clock = std::move(clock);
    impl_->console = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    impl_->console->set_pattern("%v");
    impl_->console->set_level(to_spdlog(default_stderr_level()));
    impl_->transcript = std::make_shared<TranscriptSink>();
    impl_->transcript->set_pattern("%v");
    impl_->transcript->set_level(spdlog::level::info);
    spdlog::sinks_init_list sinks = {impl_->console, impl_->transcript};
    impl_->logger = std::make_unique<spdlog::logger>("qnetsim", sinks);
    impl_->refresh_level();
}

EventLog::~EventLog() = default;

void EventLog::set_default_stderr_level(LogLevel level) { g_default_stderr_level = level; }
LogLevel EventLog::default_stderr_level() { return g_default_stderr_level.load(); }

void EventLog::set_stderr_level(LogLevel level) {
    impl_->console->set_level(to_spdlog(level));
    impl_->refresh_level();
}

void EventLog::set_transcript_level(LogLevel level) {
    impl_->transcript->set_level(to_spdlog(level));
    impl_->refresh_level();
}

bool EventLog::enabled(LogLevel level) const { return impl_->logger->should_log(to_spdlog(level)); }

void EventLog::log(LogLevel level, std::string_view who, std::string_view event, std::string_view detail) {
    const auto lvl = to_spdlog(level);
    if (!impl_->logger->should_log(lvl)) return;
    impl_->logger->log(lvl, "{:.3f} | {} | {} | {}", impl_->clock(), who, event, detail);
}

std::vector<std::string> EventLog::transcript() const { return impl_->transcript->lines(); }

void EventLog::clear_transcript() { impl_->transcript->clear(); }

}  // namespace qnetsim
