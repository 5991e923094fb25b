#pragma once

#include <array>
#include <cstdint>

namespace vulnfwd {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011). Stateless:
/// each (counter, key) block maps to four 32-bit words, so per-path streams
/// can be generated in any order on any number of threads.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0;;) {
            const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
            if (++round == 10) break;
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

/// Stream of uniforms/normals for one simulation path. Draw i of path p under
/// seed k is a pure function of (k, p, i); two doubles per Philox block.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) : path_(path) {
        key_ = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    }

    /// i-th uniform draw of this path, strictly inside (0, 1).
    double uniform(std::uint64_t i) const {
        const std::uint64_t blk = i >> 1;
        const Philox4x32::Counter ctr = {std::uint32_t(path_), std::uint32_t(path_ >> 32),
                                         std::uint32_t(blk), std::uint32_t(blk >> 32)};
        const auto words = Philox4x32::block(ctr, key_);
        const int lane = int(i & 1) * 2;
        const std::uint64_t bits =
            (std::uint64_t(words[lane]) << 32) | std::uint64_t(words[lane + 1]);
        return (double(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// i-th standard normal draw (inverse-CDF of the i-th uniform).
    double normal(std::uint64_t i) const;

private:
    std::uint64_t path_;
    Philox4x32::Key key_;
};

}  // namespace vulnfwd
