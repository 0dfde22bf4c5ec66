#pragma once

#include <cstdint>
#include <random>

namespace ngkl {

/// Deterministic random stream identified by (seed, stream).
///
/// Two streams with the same identifiers produce the same sequence. Child
/// streams for sub-tasks are obtained with derive(), which depends only on the
/// parent's identifiers, never on how many numbers the parent has produced.
/// A stream is owned by one task at a time, so it is move-only.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) noexcept = default;
  RngStream& operator=(RngStream&&) noexcept = default;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  [[nodiscard]] RngStream derive(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ngkl
