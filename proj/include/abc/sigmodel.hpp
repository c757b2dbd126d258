#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abc/cmatrix.hpp"
#include "abc/codes.hpp"

namespace abc {

// Multipath profile: complex path gains with strictly increasing integer
// chip delays. Gains are held fixed over a frame.
struct ChannelProfile {
  std::vector<cd> gains;
  std::vector<int> delays;

  std::size_t paths() const { return gains.size(); }
  int max_delay() const;
  double energy() const;  // sum |alpha_l|^2
  void validate(std::size_t gain) const;
};

// Current-symbol and previous-symbol-tail signature matrices of the
// two-tap block model, both G1 x K.
struct SignaturePair {
  CMatrix h0;
  CMatrix h1;
  std::size_t g1 = 0;

  CMatrix stacked() const;  // [h0 h1], G1 x 2K
};

// Unit-power QPSK symbols plus the underlying Gray-mapped bits.
struct SymbolFrame {
  std::size_t users = 0;
  std::size_t symbols = 0;
  std::vector<std::uint8_t> bits;  // K x 2M, row-major (user-major)
  CMatrix values;                  // K x M

  std::uint8_t bit(std::size_t user, std::size_t idx) const {
    return bits[user * 2 * symbols + idx];
  }
};

// Chip-rate received blocks r_n, one per symbol slot.
struct ReceivedFrame {
  std::size_t window = 0;  // G1
  std::vector<std::vector<cd>> blocks;
  double noise_var = 0.0;  // q per complex dimension
};

// Gray map between a bit pair and a QPSK point, both directions.
cd qpsk_point(std::uint8_t b0, std::uint8_t b1);

// Assemble h0/h1 by superposing delayed scaled codes; scrambling (when
// present) multiplies the chips before the channel.
SignaturePair build_signatures(const CodeSet& codes, const ChannelProfile& chan,
                               const ScramblingSequence* scramble = nullptr);

// i.i.d. uniform bits, unit-power QPSK, deterministic per seed.
SymbolFrame gen_frame(std::size_t users, std::size_t symbols,
                      std::uint64_t seed);

// r_n = H0 b_n + H1 b_{n-1} + n_n with b_0 = 0. snr_db = +inf disables
// noise; otherwise q = sum|alpha|^2 / 10^(snr/10).
ReceivedFrame transmit(const SymbolFrame& frame, const SignaturePair& sig,
                       const ChannelProfile& chan, double snr_db,
                       std::uint64_t seed);

// Text dump used by the CLI: one block per line, "re,im" pairs.
void dump_frame(const ReceivedFrame& rx, std::ostream& os);

}  // namespace abc
