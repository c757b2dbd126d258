#include <cmath>
#include <limits>
#include <sstream>

#include "abc/codes.hpp"
#include "abc/errors.hpp"
#include "abc/sigmodel.hpp"
#include "doctest.h"

using abc::cd;
using abc::ChannelProfile;
using abc::CMatrix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelProfile single_path() {
  ChannelProfile c;
  c.gains = {cd{1.0, 0.0}};
  c.delays = {0};
  return c;
}

ChannelProfile five_path() {
  ChannelProfile c;
  c.gains = {{0.3684, 0.5364}, {0.1982, 0.0187}, {0.0237, 0.5683},
             {0.1112, 0.0835}, {0.2203, 0.2756}};
  c.delays = {0, 1, 2, 3, 4};
  return c;
}

}  // namespace

TEST_CASE("qpsk map round-trips and is unit power") {
  const double a = 1.0 / std::sqrt(2.0);
  CHECK(abc::qpsk_point(0, 0) == cd{a, a});
  CHECK(abc::qpsk_point(1, 1) == cd{-a, -a});
  CHECK(abc::qpsk_point(1, 0) == cd{-a, a});
  CHECK(abc::qpsk_point(0, 1) == cd{a, -a});
  for (int b0 : {0, 1})
    for (int b1 : {0, 1})
      CHECK(std::abs(std::abs(abc::qpsk_point(b0, b1)) - 1.0) < 1e-15);
}

TEST_CASE("single path delay 0 gives h0 = code/sqrt(G), h1 = 0") {
  const abc::CodeSet codes = abc::gen_ovsf(8, 2);
  const abc::SignaturePair sig = abc::build_signatures(codes, single_path());
  REQUIRE(sig.g1 == 8);
  const double s = 1.0 / std::sqrt(8.0);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t t = 0; t < 8; ++t) {
      CHECK(sig.h0(t, k) == cd{codes.chips[k][t] * s, 0.0});
      CHECK(sig.h1(t, k) == cd{0.0, 0.0});
    }
}

TEST_CASE("two-path tail lands in h1 at the documented support") {
  ChannelProfile chan;
  chan.gains = {cd{1.0, 0.0}, cd{0.5, -0.25}};
  chan.delays = {0, 1};
  const abc::CodeSet codes = abc::gen_ovsf(8, 1);
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  REQUIRE(sig.g1 == 9);
  // delay-1 path: one tail chip (the last chip of the previous symbol)
  std::size_t nonzero = 0;
  for (std::size_t t = 0; t < 9; ++t)
    if (std::abs(sig.h1(t, 0)) > 0.0) {
      ++nonzero;
      CHECK(t == 0);
      CHECK(std::abs(sig.h1(t, 0) -
                     chan.gains[1] * (codes.chips[0][7] / std::sqrt(8.0))) <
            1e-15);
    }
  CHECK(nonzero == 1);
}

TEST_CASE("signature energy tracks channel energy") {
  // Shifted code copies are only near-orthogonal, so per-column energy
  // carries small cross-path terms around the exact channel energy.
  const abc::CodeSet codes = abc::gen_gold(6, 10, 1);
  const ChannelProfile chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  double mean = 0.0;
  for (std::size_t k = 0; k < codes.users; ++k) {
    double e = 0.0;
    for (std::size_t t = 0; t < sig.g1; ++t)
      e += std::norm(sig.h0(t, k)) + std::norm(sig.h1(t, k));
    CHECK(e == doctest::Approx(chan.energy()).epsilon(0.15));
    mean += e;
  }
  mean /= static_cast<double>(codes.users);
  CHECK(mean == doctest::Approx(chan.energy()).epsilon(0.05));
}

TEST_CASE("all-ones scrambling is a no-op") {
  const abc::CodeSet codes = abc::gen_gold(5, 4, 2);
  abc::ScramblingSequence ones;
  ones.gain = 31;
  ones.values.assign(31, cd{1.0, 0.0});
  const abc::SignaturePair a = abc::build_signatures(codes, five_path());
  const abc::SignaturePair b = abc::build_signatures(codes, five_path(), &ones);
  for (std::size_t t = 0; t < a.g1; ++t)
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(a.h0(t, k) == b.h0(t, k));
      CHECK(a.h1(t, k) == b.h1(t, k));
    }
}

TEST_CASE("channel profile validation") {
  ChannelProfile bad;
  bad.gains = {cd{1.0, 0.0}, cd{0.5, 0.0}};
  bad.delays = {2, 1};
  CHECK_THROWS_AS(bad.validate(8), abc::config_error);
  bad.delays = {0, 9};
  CHECK_THROWS_AS(bad.validate(8), abc::config_error);
  ChannelProfile zero;
  zero.gains = {cd{0.0, 0.0}};
  zero.delays = {0};
  CHECK_THROWS_AS(zero.validate(8), abc::config_error);
}

TEST_CASE("gen_frame is deterministic and decorrelated across users") {
  const abc::SymbolFrame a = abc::gen_frame(2, 10000, 5);
  const abc::SymbolFrame b = abc::gen_frame(2, 10000, 5);
  CHECK(a.bits == b.bits);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t m = 0; m < 4; ++m)
      CHECK(a.values(u, m) == b.values(u, m));
  cd rho = 0.0;
  for (std::size_t m = 0; m < 10000; ++m)
    rho += std::conj(a.values(0, m)) * a.values(1, m);
  CHECK(std::abs(rho) / 10000.0 < 0.05);
}

TEST_CASE("noise-free transmit reproduces the two-tap model exactly") {
  const abc::CodeSet codes = abc::gen_gold(5, 3, 7);
  const ChannelProfile chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(3, 50, 11);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 13);
  REQUIRE(rx.blocks.size() == 50);
  CHECK(rx.noise_var == 0.0);
  for (std::size_t n = 0; n < 50; ++n) {
    std::vector<cd> expect(sig.g1, cd{0.0, 0.0});
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t t = 0; t < sig.g1; ++t) {
        expect[t] += sig.h0(t, k) * frame.values(k, n);
        if (n > 0) expect[t] += sig.h1(t, k) * frame.values(k, n - 1);
      }
    for (std::size_t t = 0; t < sig.g1; ++t)
      CHECK(std::abs(rx.blocks[n][t] - expect[t]) < 1e-12);
  }
}

TEST_CASE("noise variance tracks the SNR definition") {
  const abc::CodeSet codes = abc::gen_gold(6, 1, 3);
  const ChannelProfile chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(1, 2000, 17);
  const abc::ReceivedFrame noisy = abc::transmit(frame, sig, chan, 0.0, 19);
  const abc::ReceivedFrame clean = abc::transmit(frame, sig, chan, kInf, 19);
  const double q = chan.energy();
  CHECK(noisy.noise_var == doctest::Approx(q).epsilon(1e-12));
  double var = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < noisy.blocks.size(); ++n)
    for (std::size_t t = 0; t < sig.g1; ++t) {
      var += std::norm(noisy.blocks[n][t] - clean.blocks[n][t]);
      ++count;
    }
  var /= static_cast<double>(count);
  CHECK(var == doctest::Approx(q).epsilon(0.03));
}

TEST_CASE("mean received energy approaches K times channel energy") {
  const abc::CodeSet codes = abc::gen_gold(6, 10, 23);
  const ChannelProfile chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(10, 3000, 29);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 31);
  double e = 0.0;
  for (const auto& blk : rx.blocks)
    for (cd v : blk) e += std::norm(v);
  e /= static_cast<double>(rx.blocks.size());
  CHECK(e == doctest::Approx(10.0 * chan.energy()).epsilon(0.05));
}

TEST_CASE("dump_frame writes one block per line") {
  const abc::CodeSet codes = abc::gen_ovsf(4, 1);
  const abc::SignaturePair sig = abc::build_signatures(codes, single_path());
  const abc::SymbolFrame frame = abc::gen_frame(1, 3, 1);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, single_path(), kInf, 2);
  std::ostringstream os;
  abc::dump_frame(rx, os);
  const std::string text = os.str();
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 3);
  CHECK(text.find(',') != std::string::npos);
}
