#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace platecharge {

/// Deterministic random stream for one (seed, key...) cell of a campaign.
/// The key is hashed, so the stream of a cell does not depend on the order in
/// which cells are visited.
class Substream {
public:
    Substream(std::uint64_t seed, std::initializer_list<std::string_view> key) : engine_(derive(seed, key)) {}

    /// Standard normal draw.
    double normal() { return normal_(engine_); }

    static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::string_view> key) {
        // FNV-1a over the key parts (with a separator), folded into the seed.
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::string_view part : key) {
            for (unsigned char c : part) {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            h ^= 0x1f;
            h *= 0x100000001b3ULL;
        }
        return splitmix64(seed ^ splitmix64(h));
    }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace platecharge
