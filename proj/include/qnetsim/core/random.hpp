#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace qnetsim {

/// 64-bit FNV-1a; stable across platforms, used to derive substream seeds.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Generates 32-character lowercase hex IDs (128 random bits) from a seeded
/// generator. Identical seeds replay identical ID sequences.
class IdGenerator {
public:
    explicit IdGenerator(std::uint64_t seed = 0);

    std::string next();

private:
    std::mutex mutex_;
    std::mt19937_64 engine_;
};

/// Named independent random substreams derived from one master seed.
///
/// Each stream is seeded from (seed, name) only, so the draws seen by one
/// host never depend on how many draws other hosts made before it.
class RandomStreams {
public:
    explicit RandomStreams(std::uint64_t seed = 0);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform double in [0, 1).
    double uniform(const std::string& stream);
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(const std::string& stream, std::uint64_t n);
    int bit(const std::string& stream) { return static_cast<int>(below(stream, 2)); }

private:
    struct Stream {
        std::mutex mutex;
        std::mt19937_64 engine;
    };

    Stream& stream(const std::string& name);

    std::uint64_t seed_;
    std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Stream>> streams_;
};

}  // namespace qnetsim
