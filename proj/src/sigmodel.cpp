#include "abc/sigmodel.hpp"

#include <cmath>
#include <iostream>
#include <ostream>
#include <random>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

int ChannelProfile::max_delay() const {
  int d = 0;
  for (int x : delays) d = std::max(d, x);
  return d;
}

double ChannelProfile::energy() const {
  double e = 0.0;
  for (const cd& g : gains) e += std::norm(g);
  return e;
}

void ChannelProfile::validate(std::size_t gain) const {
  if (gains.empty() || gains.size() != delays.size())
    throw config_error("ChannelProfile: gains/delays size mismatch or empty");
  for (std::size_t l = 0; l < delays.size(); ++l) {
    if (delays[l] < 0 ||
        static_cast<std::size_t>(delays[l]) >= gain) {
      std::ostringstream os;
      os << "ChannelProfile: delay " << delays[l]
         << " outside [0, G) with G=" << gain;
      throw config_error(os.str());
    }
    if (l > 0 && delays[l] <= delays[l - 1])
      throw config_error("ChannelProfile: delays must be strictly increasing");
  }
  bool any = false;
  for (const cd& g : gains)
    if (g != cd{0.0, 0.0}) any = true;
  if (!any) throw config_error("ChannelProfile: all path gains are zero");
}

CMatrix SignaturePair::stacked() const {
  const std::size_t k = h0.cols();
  CMatrix m(g1, 2 * k);
  for (std::size_t i = 0; i < g1; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      m(i, j) = h0(i, j);
      m(i, k + j) = h1(i, j);
    }
  }
  return m;
}

cd qpsk_point(std::uint8_t b0, std::uint8_t b1) {
  static const double a = 1.0 / std::sqrt(2.0);
  return {b0 ? -a : a, b1 ? -a : a};
}

SignaturePair build_signatures(const CodeSet& codes, const ChannelProfile& chan,
                               const ScramblingSequence* scramble) {
  const std::size_t g = codes.gain;
  chan.validate(g);
  if (scramble && scramble->gain != g)
    throw config_error("build_signatures: scrambling gain mismatch");

  const std::size_t g1 = g + static_cast<std::size_t>(chan.max_delay());
  const std::size_t k = codes.users;
  const double norm = 1.0 / std::sqrt(static_cast<double>(g));

  SignaturePair sig;
  sig.g1 = g1;
  sig.h0 = CMatrix(g1, k);
  sig.h1 = CMatrix(g1, k);

  std::vector<cd> chip(g);
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t t = 0; t < g; ++t) {
      chip[t] = static_cast<double>(codes.chips[u][t]) * norm;
      if (scramble) chip[t] *= scramble->values[t];
    }
    for (std::size_t l = 0; l < chan.paths(); ++l) {
      const cd a = chan.gains[l];
      const std::size_t d = static_cast<std::size_t>(chan.delays[l]);
      // Current symbol: chips land at window positions d..d+G-1.
      for (std::size_t t = 0; t < g; ++t) sig.h0(d + t, u) += a * chip[t];
      // Previous symbol tail: last d chips wrap into positions 0..d-1.
      for (std::size_t p = 0; p < d; ++p)
        sig.h1(p, u) += a * chip[g - d + p];
    }
  }

  // AS1 diagnostic: [h0 h1] should have full column rank.
  if (2 * k <= g1) {
    const CMatrix hh = sig.stacked();
    EigResult eig = hermitian_eig(hh.adjoint() * hh);
    const double tol = rank_tolerance(g1, 2 * k, eig.values.front());
    if (eig.values.back() <= tol)
      std::cerr << "warning: [h0 h1] is column-rank deficient "
                   "(two-tap model assumption violated)\n";
  }
  return sig;
}

SymbolFrame gen_frame(std::size_t users, std::size_t symbols,
                      std::uint64_t seed) {
  if (users < 1 || symbols < 1)
    throw config_error("gen_frame: users and symbols must be >= 1");
  SymbolFrame f;
  f.users = users;
  f.symbols = symbols;
  f.bits.resize(users * 2 * symbols);
  f.values = CMatrix(users, symbols);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t m = 0; m < symbols; ++m) {
      const std::uint8_t b0 = static_cast<std::uint8_t>(bit(rng));
      const std::uint8_t b1 = static_cast<std::uint8_t>(bit(rng));
      f.bits[u * 2 * symbols + 2 * m] = b0;
      f.bits[u * 2 * symbols + 2 * m + 1] = b1;
      f.values(u, m) = qpsk_point(b0, b1);
    }
  }
  return f;
}

ReceivedFrame transmit(const SymbolFrame& frame, const SignaturePair& sig,
                       const ChannelProfile& chan, double snr_db,
                       std::uint64_t seed) {
  if (frame.users != sig.h0.cols())
    throw config_error("transmit: frame/signature user count mismatch");
  const std::size_t g1 = sig.g1;
  const std::size_t m = frame.symbols;
  const std::size_t k = frame.users;

  ReceivedFrame rx;
  rx.window = g1;
  rx.blocks.assign(m, std::vector<cd>(g1, cd{0.0, 0.0}));

  const bool noiseless = std::isinf(snr_db);
  rx.noise_var =
      noiseless ? 0.0 : chan.energy() * std::pow(10.0, -snr_db / 10.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double nstd = std::sqrt(rx.noise_var / 2.0);

  for (std::size_t n = 0; n < m; ++n) {
    auto& r = rx.blocks[n];
    // r = h0 * b_n + h1 * b_{n-1}
    for (std::size_t i = 0; i < g1; ++i) {
      cd acc = 0.0;
      for (std::size_t u = 0; u < k; ++u) acc += sig.h0(i, u) * frame.values(u, n);
      if (n > 0)
        for (std::size_t u = 0; u < k; ++u)
          acc += sig.h1(i, u) * frame.values(u, n - 1);
      r[i] = acc;
    }
    if (!noiseless)
      for (std::size_t i = 0; i < g1; ++i)
        r[i] += cd{nstd * gauss(rng), nstd * gauss(rng)};
  }
  return rx;
}

void dump_frame(const ReceivedFrame& rx, std::ostream& os) {
  for (const auto& block : rx.blocks) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) os << ' ';
      os << block[i].real() << ',' << block[i].imag();
    }
    os << '\n';
  }
}

}  // namespace abc
