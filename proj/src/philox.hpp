#pragma once

// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the stream for a
// sample is addressed by (key = seed, counter = sample id, draw index).

#include <array>
#include <cstdint>

namespace gwmm::detail {

class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  // Uniform in the open interval (0,1) on the 2^-53 lattice shifted by half a step,
  // so 1 - u is exact.
  double uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_u64() {
    if (pos_ >= 8) refill();
    std::uint64_t lo = out_[pos_++];
    std::uint64_t hi = out_[pos_++];
    return (hi << 32) | lo;
  }

  std::uint64_t blocks_used() const { return block_; }

 private:
  static constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  static constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

  // Two consecutive blocks per refill; the rounds interleave for throughput.
  void refill() {
    const std::uint64_t b1 = block_ + 1;
    std::uint32_t a0 = static_cast<std::uint32_t>(block_), a1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t b0 = static_cast<std::uint32_t>(b1), bb1 = static_cast<std::uint32_t>(b1 >> 32);
    std::uint32_t a2 = static_cast<std::uint32_t>(stream_), a3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t b2 = a2, b3 = a3;
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t pa0 = static_cast<std::uint64_t>(M0) * a0, pa1 = static_cast<std::uint64_t>(M1) * a2;
      const std::uint64_t pb0 = static_cast<std::uint64_t>(M0) * b0, pb1 = static_cast<std::uint64_t>(M1) * b2;
      a0 = static_cast<std::uint32_t>(pa1 >> 32) ^ a1 ^ k0;
      a2 = static_cast<std::uint32_t>(pa0 >> 32) ^ a3 ^ k1;
      a1 = static_cast<std::uint32_t>(pa1);
      a3 = static_cast<std::uint32_t>(pa0);
      b0 = static_cast<std::uint32_t>(pb1 >> 32) ^ bb1 ^ k0;
      b2 = static_cast<std::uint32_t>(pb0 >> 32) ^ b3 ^ k1;
      bb1 = static_cast<std::uint32_t>(pb1);
      b3 = static_cast<std::uint32_t>(pb0);
      k0 += W0;
      k1 += W1;
    }
    out_ = {a0, a1, a2, a3, b0, bb1, b2, b3};
    pos_ = 0;
    block_ += 2;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 8> out_{};
  int pos_ = 8;
};

}  // namespace gwmm::detail
