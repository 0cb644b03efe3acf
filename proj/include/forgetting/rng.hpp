#pragma once

#include <array>
#include <cstdint>

namespace forgetting {

// Philox4x32-10 counter-based block cipher (Salmon et al.), used as the
// project's only randomness source. Being counter-based, any (key, counter)
// pair can be evaluated independently, which is what makes per-replicate
// streams reproducible under any scheduling.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round != 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// Deterministic stream of uniform doubles in the open interval (0,1).
//
// Stream identity is (seed, stream_index): the seed is the Philox key and the
// stream index occupies the high half of the 128-bit counter, so distinct
// indices can never collide regardless of how many values are drawn. Values
// are built from 52 random bits as (v + 0.5) * 2^-52, hence never exactly
// 0 or 1 and every value is exact in double precision.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream_index)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_{static_cast<std::uint32_t>(stream_index),
                static_cast<std::uint32_t>(stream_index >> 32)} {}

  double next() {
    if (pending_ == 0) refill();
    return buffer_[--pending_];
  }

 private:
  void refill() {
    const auto words = Philox4x32::block(
        {static_cast<std::uint32_t>(block_),
         static_cast<std::uint32_t>(block_ >> 32), stream_[0], stream_[1]},
        key_);
    ++block_;
    buffer_[1] = to_unit(words[0], words[1]);
    buffer_[0] = to_unit(words[2], words[3]);
    pending_ = 2;
  }

  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        ((std::uint64_t{hi} << 32) | lo) >> 12;  // top 52 bits
    return (static_cast<double>(bits) + 0.5) * 0x1p-52;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buffer_{};
  int pending_ = 0;
};

// Standard normal draws via Box-Muller on a UniformStream. Used by the
// Brownian-path reference sampler; deterministic per (seed, stream_index).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_index)
      : uniforms_(seed, stream_index) {}

  double next();

 private:
  UniformStream uniforms_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace forgetting
