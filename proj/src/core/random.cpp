#include "qnetsim/core/random.hpp"

#include <cstdio>

namespace qnetsim {

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

IdGenerator::IdGenerator(std::uint64_t seed) : engine_(make_engine(seed, fnv1a64("qnetsim/ids"))) {}

std::string IdGenerator::next() {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    {
        std::lock_guard lock(mutex_);
        hi = engine_();
        lo = engine_();
    }
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return std::string(buf, 32);
}

RandomStreams::RandomStreams(std::uint64_t seed) : seed_(seed) {}

RandomStreams::Stream& RandomStreams::stream(const std::string& name) {
    std::lock_guard lock(mutex_);
    auto& slot = streams_[name];
    if (!slot) {
        slot = std::make_unique<Stream>();
        slot->engine = make_engine(seed_, fnv1a64(name));
    }
    return *slot;
}

double RandomStreams::uniform(const std::string& name) {
    auto& s = stream(name);
    std::lock_guard lock(s.mutex);
    // 53 random mantissa bits, independent of the standard library's
    // distribution implementations.
    return static_cast<double>(s.engine() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStreams::below(const std::string& name, std::uint64_t n) {
    auto& s = stream(name);
    std::lock_guard lock(s.mutex);
    // Rejection sampling keeps the draw unbiased and portable.
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} / n) * n;
    for (;;) {
        const std::uint64_t v = s.engine();
        if (n == 0) return 0;
        if (v < limit) return v % n;
    }
}

}  // namespace qnetsim
