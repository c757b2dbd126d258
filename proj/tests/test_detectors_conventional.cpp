#include <cmath>
#include <limits>

#include "abc/codes.hpp"
#include "abc/detectors_conventional.hpp"
#include "abc/errors.hpp"
#include "abc/preproc.hpp"
#include "abc/sigmodel.hpp"
#include "doctest.h"

using abc::cd;
using abc::CMatrix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

abc::ChannelProfile unit_channel() {
  abc::ChannelProfile c;
  c.gains = {cd{1.0, 0.0}};
  c.delays = {0};
  return c;
}

abc::ChannelProfile five_path() {
  abc::ChannelProfile c;
  c.gains = {{0.3684, 0.5364}, {0.1982, 0.0187}, {0.0237, 0.5683},
             {0.1112, 0.0835}, {0.2203, 0.2756}};
  c.delays = {0, 1, 2, 3, 4};
  return c;
}

}  // namespace

TEST_CASE("matched filter recovers symbols under orthogonal codes") {
  const abc::CodeSet codes = abc::gen_ovsf(16, 8);
  const auto chan = unit_channel();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(8, 30, 3);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 5);
  for (std::size_t u = 0; u < 8; ++u) {
    const auto y = abc::mf_detect(codes, u, rx);
    REQUIRE(y.size() == 30);
    for (std::size_t n = 0; n < 30; ++n)
      CHECK(std::abs(y[n] - frame.values(u, n)) < 1e-12);
  }
}

TEST_CASE("Rake on a single unit path equals the matched filter bit-exactly") {
  const abc::CodeSet codes = abc::gen_gold(5, 6, 7);
  const auto chan = unit_channel();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(6, 100, 9);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, 10.0, 11);
  for (std::size_t u = 0; u < 6; ++u) {
    const auto mf = abc::mf_detect(codes, u, rx);
    const auto rk = abc::rake_detect(codes, u, chan, rx);
    REQUIRE(mf.size() == rk.size());
    for (std::size_t n = 0; n < mf.size(); ++n) CHECK(mf[n] == rk[n]);
  }
}

TEST_CASE("Rake combining approximates energy-weighted symbols") {
  // Single user so MAI is absent; self-shift correlation is the only
  // residual term.
  abc::ChannelProfile chan;
  chan.gains = {cd{0.8, 0.0}, cd{0.0, 0.6}};
  chan.delays = {0, 3};
  const abc::CodeSet codes = abc::gen_gold(6, 1, 13);
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(1, 60, 15);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 17);
  const auto y = abc::rake_detect(codes, 0, chan, rx);
  const double energy = chan.energy();
  std::size_t hits = 0;
  for (std::size_t n = 1; n < y.size(); ++n)
    if (std::abs(y[n] - energy * frame.values(0, n)) < 0.35) ++hits;
  CHECK(hits == y.size() - 1);
}

TEST_CASE("reference channel Rake decisions are error-free for a lone user") {
  const abc::CodeSet codes = abc::gen_gold(6, 1, 19);
  const auto chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(1, 200, 21);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 23);
  const auto y = abc::rake_detect(codes, 0, chan, rx);
  for (std::size_t n = 0; n < y.size(); ++n) {
    CHECK((y[n].real() < 0.0) == (frame.values(0, n).real() < 0.0));
    CHECK((y[n].imag() < 0.0) == (frame.values(0, n).imag() < 0.0));
  }
}

TEST_CASE("LMMSE with near-zero noise acts as a zero-forcing detector") {
  const abc::CodeSet codes = abc::gen_gold(5, 3, 25);
  const auto chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const CMatrix r_cov = abc::exact_covariance(sig, 1e-9);
  const abc::SymbolFrame frame = abc::gen_frame(3, 40, 27);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, kInf, 29);
  for (std::size_t u = 0; u < 3; ++u) {
    const auto y = abc::lmmse_detect(sig, u, r_cov, rx);
    for (std::size_t n = 1; n < y.size(); ++n) {
      // output = c*b_{u,n} + MAI; with near-zero q the MAI vanishes and
      // the scale approaches a positive constant per user
      const cd ratio = y[n] / frame.values(u, n);
      const cd ratio0 = y[1] / frame.values(u, 1);
      CHECK(std::abs(ratio - ratio0) < 1e-6);
    }
  }
}

TEST_CASE("eigen LMMSE untruncated matches direct LMMSE") {
  const abc::CodeSet codes = abc::gen_gold(5, 4, 31);
  const auto chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(4, 300, 33);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, 15.0, 35);
  const CMatrix r_cov = abc::sample_covariance(rx.blocks);
  const abc::EigResult eig = abc::hermitian_eig(r_cov);
  for (std::size_t u = 0; u < 4; ++u) {
    const auto direct = abc::lmmse_detect(sig, u, r_cov, rx);
    const auto eigen = abc::lmmse_eigen_detect(sig, u, eig, sig.g1, rx);
    for (std::size_t n = 0; n < direct.size(); ++n)
      CHECK(std::abs(direct[n] - eigen[n]) < 1e-8);
  }
}

TEST_CASE("truncated eigen LMMSE stays close to direct at high SNR") {
  const abc::CodeSet codes = abc::gen_gold(5, 4, 37);
  const auto chan = five_path();
  const abc::SignaturePair sig = abc::build_signatures(codes, chan);
  const abc::SymbolFrame frame = abc::gen_frame(4, 2000, 39);
  const abc::ReceivedFrame rx = abc::transmit(frame, sig, chan, 25.0, 41);
  const CMatrix r_cov = abc::sample_covariance(rx.blocks);
  const abc::EigResult eig = abc::hermitian_eig(r_cov);
  double mse = 0.0;
  std::size_t count = 0;
  for (std::size_t u = 0; u < 4; ++u) {
    const auto direct = abc::lmmse_detect(sig, u, r_cov, rx);
    const auto trunc = abc::lmmse_eigen_detect(sig, u, eig, 8, rx);
    for (std::size_t n = 0; n < direct.size(); ++n) {
      mse += std::norm(direct[n] - trunc[n]);
      ++count;
    }
  }
  // Discarded subspace tail plus finite-sample covariance noise leave a
  // small residual even at 25 dB.
  CHECK(mse / static_cast<double>(count) < 0.05);
}

TEST_CASE("rake_combine rejects fingers past the block") {
  abc::ChannelProfile chan;
  chan.gains = {cd{1.0, 0.0}};
  chan.delays = {4};
  std::vector<cd> block(8, cd{1.0, 0.0});
  std::vector<cd> out;
  CHECK_THROWS_AS(abc::rake_combine(chan, block, 8, out), abc::config_error);
}

TEST_CASE("effective_chips applies scrambling elementwise") {
  const abc::CodeSet codes = abc::gen_ovsf(4, 2);
  const abc::ScramblingSequence scr = abc::gen_scrambling(4, 5);
  const auto plain = abc::effective_chips(codes, 1);
  const auto mixed = abc::effective_chips(codes, 1, &scr);
  for (std::size_t t = 0; t < 4; ++t)
    CHECK(std::abs(mixed[t] - plain[t] * scr.values[t]) < 1e-15);
}
