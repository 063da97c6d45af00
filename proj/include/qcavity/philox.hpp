#pragma once

#include <cstdint>

namespace qcavity {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The output
// block is a pure function of (key, counter), so every trajectory gets an
// independent, scheduling-invariant stream: key <- master seed, high counter
// words <- trajectory index, low counter words <- draw index.
struct Philox4x32 {
  using u32 = std::uint32_t;
  using u64 = std::uint64_t;
  struct Block {
    u32 x[4];
  };

  static Block generate(u32 c0, u32 c1, u32 c2, u32 c3, u32 k0, u32 k1) {
    for (int r = 0; r < 10; ++r) {
      const u64 p0 = u64(0xD2511F53u) * c0;
      const u64 p1 = u64(0xCD9E8D57u) * c2;
      const u32 n0 = u32(p1 >> 32) ^ c1 ^ k0;
      const u32 n1 = u32(p1);
      const u32 n2 = u32(p0 >> 32) ^ c3 ^ k1;
      const u32 n3 = u32(p0);
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return {{c0, c1, c2, c3}};
  }
};

// Uniform [0,1) stream for one (seed, stream_id) pair; 53-bit mantissas from
// pairs of 32-bit words, two doubles per generated block.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
      : k0_(static_cast<std::uint32_t>(seed)),
        k1_(static_cast<std::uint32_t>(seed >> 32)),
        s0_(static_cast<std::uint32_t>(stream_id)),
        s1_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  double uniform() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const auto b = Philox4x32::generate(static_cast<std::uint32_t>(draw_),
                                        static_cast<std::uint32_t>(draw_ >> 32), s0_, s1_,
                                        k0_, k1_);
    ++draw_;
    const auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
      const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
      return static_cast<double>(u >> 11) * 0x1.0p-53;
    };
    spare_ = to_unit(b.x[2], b.x[3]);
    cached_ = true;
    return to_unit(b.x[0], b.x[1]);
  }

 private:
  std::uint32_t k0_, k1_, s0_, s1_;
  std::uint64_t draw_ = 0;
  double spare_ = 0.0;
  bool cached_ = false;
};

}  // namespace qcavity
