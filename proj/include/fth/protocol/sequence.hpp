#pragma once

#include <cstdint>

namespace fth::protocol {

enum class Acceptance { Keep, DropStale };

// Last kept sequence number of one (peer, type) stream.
struct SequenceState {
  std::uint32_t last = 0;
  bool seen = false;
};

// Serial-number comparison over 32 bits: `a` is newer than `b` when the
// forward distance from b to a is in (0, 2^31).
constexpr bool seq_newer(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::int32_t>(a - b) > 0;
}

// Keeps the first frame of a stream and any frame newer than the last kept
// one; updates `state` on keep.
Acceptance accept(SequenceState& state, std::uint32_t seq);

}  // namespace fth::protocol
