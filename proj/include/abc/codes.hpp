#pragma once

#include <cstdint>
#include <vector>

#include "abc/cmatrix.hpp"

namespace abc {

// Per-user bipolar spreading sequences. Chips stay exact +-1 integers;
// the 1/sqrt(G) symbol normalization is applied by the signal model.
struct CodeSet {
  enum class Family { gold, ovsf };
  Family family;
  std::size_t gain;   // G chips per symbol
  std::size_t users;  // K
  std::vector<std::vector<int>> chips;  // K rows of length G, entries +-1
};

// Unit-modulus complex per-chip scrambling, entries in {(+-1 +-j)/sqrt(2)}.
struct ScramblingSequence {
  std::size_t gain;
  std::vector<cd> values;
};

// Gold family from a fixed preferred pair of degree-5 or degree-6
// m-sequences (G = 31 or 63). Balanced members are preferred; member
// selection is a seeded shuffle, so output is deterministic per seed.
CodeSet gen_gold(int degree, std::size_t users, std::uint64_t seed);

// First K rows of the order-G Walsh-Hadamard construction.
CodeSet gen_ovsf(std::size_t gain, std::size_t users);

// G i.i.d. uniform draws from the QPSK-like scrambling alphabet.
ScramblingSequence gen_scrambling(std::size_t gain, std::uint64_t seed);

// Block-diagonal per-user signature: user i's code repeated once per
// symbol slot. (G*symbols) x symbols, unnormalized +-1 chips.
CMatrix signature_block(const CodeSet& codes, std::size_t user,
                        std::size_t symbols);

}  // namespace abc
