#pragma once

#include <cstdint>
#include <vector>

namespace mpoly {

// Counter-based generator: output depends only on (key, counter), so any
// sub-stream can be replayed independently of call order.  stream() derives
// a child key without advancing this generator.
class Rng {
  public:
    explicit Rng(std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + golden * ++counter_); }

    Rng stream(std::uint64_t id) const {
        return Rng(mix(key_ ^ mix(id + golden)));
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // uniform in {0, ..., n-1}; n = 0 yields 0
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    std::vector<double> uniform_vector(std::size_t len, double lo, double hi) {
        std::vector<double> v(len);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

  private:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace mpoly
