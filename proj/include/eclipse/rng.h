#pragma once

#include <cstdint>
#include <utility>

namespace eclipse {

// Stream purposes. Separating the purpose in the key guarantees that e.g. the
// primary-ray jitter and the secondary-sample pattern of the same pixel never
// share random numbers.
enum class StreamPurpose : uint64_t {
    Primary = 1,
    EnvSamples = 2,
    MaterialSamples = 3,
    RenderA = 4,
    RenderB = 5,
    BatchSelect = 6,
    Init = 7,
    Test = 99,
};

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Counter-based random stream. The sequence is a pure function of the key, so
// identical keys give bit-identical sequences regardless of which thread draws
// them or in what order pixels are processed.
class RandomStream {
 public:
    RandomStream(uint64_t seed, uint64_t frame, uint64_t pixel, uint64_t pass,
                 StreamPurpose purpose)
        : key_(mixKey(seed, frame, pixel, pass, static_cast<uint64_t>(purpose))) {}

    explicit RandomStream(uint64_t key) : key_(key) {}

    uint64_t nextU64() { return detail::splitmix64(key_ ^ (counter_++ * 0x9e3779b97f4a7c15ULL)); }

    // Uniform in [0, 1), 53-bit resolution.
    double next() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

    std::pair<double, double> next2() {
        double a = next();
        double b = next();
        return {a, b};
    }

    // Uniform integer in [0, n).
    uint64_t nextBelow(uint64_t n) { return nextU64() % n; }

    // Derive an independent sub-stream (used for per-sample decorrelation).
    RandomStream fork(uint64_t tag) const {
        return RandomStream(detail::splitmix64(key_ ^ detail::splitmix64(tag + 0x632be59bd9b4e019ULL)));
    }

 private:
    static uint64_t mixKey(uint64_t a, uint64_t b, uint64_t c, uint64_t d, uint64_t e) {
        uint64_t k = detail::splitmix64(a);
        k = detail::splitmix64(k ^ detail::splitmix64(b + 0x1000001b3ULL));
        k = detail::splitmix64(k ^ detail::splitmix64(c + 0x100000001b3ULL));
        k = detail::splitmix64(k ^ detail::splitmix64(d + 0xcbf29ce484222325ULL));
        k = detail::splitmix64(k ^ detail::splitmix64(e + 0x14650fb0739d0383ULL));
        return k;
    }

    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace eclipse
