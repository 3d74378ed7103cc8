#pragma once

// Hypergraph peeling shared by the fuse and xor filters. Each cell keeps a
// counter and an xor of the hashes mapped to it; a cell with counter 1 holds
// exactly the hash of its only occupant.

#include <cstdint>
#include <span>
#include <vector>

namespace binfuse {

struct PeelEntry {
  std::uint64_t hash;
  std::uint32_t location;
};

struct PeelingState {
  std::vector<std::uint32_t> cell_count;
  std::vector<std::uint64_t> cell_mask;
  std::vector<std::uint32_t> queue;  // Q: candidate singleton locations
  std::vector<PeelEntry> order;      // P: (hash, location) in peel order

  void reset(std::size_t cells, std::size_t keys) {
    cell_count.assign(cells, 0);
    cell_mask.assign(cells, 0);
    queue.clear();
    queue.reserve(cells);
    order.clear();
    order.reserve(keys);
  }
};

namespace detail {

/// Runs one peeling pass. `locate(hash)` returns a range of distinct cells.
/// Hashes are inserted in the given order, so callers that pre-sort them get
/// forward-moving counter updates.
template <class Locate>
bool peel(std::span<const std::uint64_t> hashes, std::size_t cells, PeelingState& state,
          Locate&& locate) {
  state.reset(cells, hashes.size());
  auto* count = state.cell_count.data();
  auto* mask = state.cell_mask.data();
  for (const std::uint64_t h : hashes) {
    for (const std::uint32_t loc : locate(h)) {
      ++count[loc];
      mask[loc] ^= h;
    }
  }
  for (std::uint32_t i = 0; i < cells; ++i) {
    if (count[i] == 1) state.queue.push_back(i);
  }
  while (!state.queue.empty()) {
    const std::uint32_t i = state.queue.back();
    state.queue.pop_back();
    if (count[i] != 1) continue;
    const std::uint64_t h = mask[i];
    state.order.push_back({h, i});
    for (const std::uint32_t loc : locate(h)) {
      --count[loc];
      mask[loc] ^= h;
      if (count[loc] == 1) state.queue.push_back(loc);
    }
  }
  return state.order.size() == hashes.size();
}

/// Unwinds the peel order so that the xor of every key's cells equals its
/// fingerprint. Cells are written once, after every read that depends on them.
template <class Fingerprint, class Locate, class Fold>
void assign(std::span<const PeelEntry> order, std::span<Fingerprint> table, Locate&& locate,
            Fold&& fold) {
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::uint64_t value = fold(it->hash);
    for (const std::uint32_t loc : locate(it->hash)) {
      if (loc != it->location) value ^= table[loc];
    }
    table[it->location] = static_cast<Fingerprint>(value);
  }
}

}  // namespace detail
}  // namespace binfuse
