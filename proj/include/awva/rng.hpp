#pragma once

#include <array>
#include <cstdint>

namespace awva {

/// Philox4x32-10 counter-based block cipher (Salmon et al. constants).
/// Stateless: output depends only on (counter, key), which is what makes
/// every draw in the toolkit addressable and reproducible under any
/// parallel schedule.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& ctr,
                                        const std::array<std::uint32_t, 2>& key);

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double normal_icdf(double p);

/// 53-bit uniform in the open interval (0,1) from two 32-bit words.
inline double u01_from_bits(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

/// A splittable random stream keyed by (master seed, stream id).  Draws are
/// addressed by (domain, index): one Philox block yields two doubles.  The
/// same (seed, stream, domain, index) always yields the same numbers, on any
/// thread, in any order.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream with an independent key; derive(a) != derive(b) for a != b.
  RandomStream derive(std::uint64_t substream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  /// 64-bit key fingerprint recorded in outputs for reproducibility.
  std::uint64_t fingerprint() const;

  const std::array<std::uint32_t, 2>& key() const { return key_; }

  void uniform_pair(std::uint64_t domain, std::uint64_t index, double& u1, double& u2) const;
  double uniform(std::uint64_t domain, std::uint64_t index) const;
  double normal(std::uint64_t domain, std::uint64_t index) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
};

/// Sequential draws within one domain of a stream.
class StreamCursor {
public:
  StreamCursor(const RandomStream& stream, std::uint64_t domain)
      : stream_(&stream), domain_(domain) {}

  double u01();
  double normal() { return u01_to_normal(u01()); }

private:
  static double u01_to_normal(double u);
  const RandomStream* stream_;
  std::uint64_t domain_;
  std::uint64_t index_ = 0;
  double pending_ = 0.0;
  bool has_pending_ = false;
};

}  // namespace awva
