#pragma once

#include <cstdint>
#include <random>

namespace potts {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// A reproducible random stream identified by (master_seed, stream_id).
/// Distinct stream ids hash to unrelated engine seeds, so replicas can be
/// run in any order (or in parallel) and still reproduce bit-for-bit.
class SeededStream {
public:
    SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id),
          engine_seed_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL))),
          engine_(engine_seed_) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    /// The derived seed handed to the engine; recorded per replica in run logs.
    std::uint64_t engine_seed() const { return engine_seed_; }

    /// Child stream; the id is mixed so (s, a).child(b) differs from (s, b).child(a).
    SeededStream child(std::uint64_t sub_id) const {
        return SeededStream(master_seed_, splitmix64(stream_id_ * 0x9e3779b97f4a7c15ULL + sub_id + 1));
    }

    /// Uniform double in [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t engine_seed_;
    std::mt19937_64 engine_;
};

}  // namespace potts
