#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace card {

using NodeId = std::uint32_t;

/// Node sequence where consecutive entries are linked; front is the origin.
using Path = std::vector<NodeId>;

/// Dense node-membership set, sized to the network.
using NodeSet = boost::dynamic_bitset<std::uint64_t>;

using Rng = std::mt19937_64;

/// Mixes a base seed with stream coordinates into an independent sub-seed.
/// Every random draw in a run is taken from an engine seeded this way so that
/// results do not depend on evaluation order or thread count.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

inline Rng make_rng(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    return Rng(derive_seed(base, a, b, c));
}

/// Number of hops in a path (nodes - 1); an empty path has zero hops.
inline int hop_count(const Path& p) { return p.empty() ? 0 : static_cast<int>(p.size()) - 1; }

} // namespace card
