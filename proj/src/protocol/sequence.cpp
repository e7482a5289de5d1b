#include "fth/protocol/sequence.hpp"

namespace fth::protocol {

Acceptance accept(SequenceState& state, std::uint32_t seq) {
  if (state.seen && !seq_newer(seq, state.last)) return Acceptance::DropStale;
  state.last = seq;
  state.seen = true;
  return Acceptance::Keep;
}

}  // namespace fth::protocol
