#ifndef SPINLAB_RNG_HPP
#define SPINLAB_RNG_HPP

#include <cstdint>

namespace spinlab {

// Deterministic counter-free random stream (splitmix64). Cheap to derive
// per-trial substreams from, which keeps sharded Monte Carlo runs canonical:
// trial i always sees the same numbers no matter how work is split.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : base_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0,1), 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // index k uniform in [0,n)
    int next_index(int n) {
        int k = static_cast<int>(next_double() * n);
        return k < n ? k : n - 1;
    }

    // Independent substream; depends only on the seed this stream was built
    // with, not on how many numbers were drawn from it.
    RandomStream derive(std::uint64_t index) const {
        std::uint64_t z = base_ ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return RandomStream(z ^ (z >> 31));
    }

    std::uint64_t seed() const { return base_; }

  private:
    std::uint64_t base_;
    std::uint64_t state_;
};

} // namespace spinlab

#endif
