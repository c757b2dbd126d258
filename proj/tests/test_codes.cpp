#include <cmath>
#include <cstdlib>
#include <set>

#include "abc/codes.hpp"
#include "abc/errors.hpp"
#include "doctest.h"

using abc::cd;
using abc::CodeSet;

namespace {

int cyclic_corr(const std::vector<int>& a, const std::vector<int>& b,
                std::size_t shift) {
  const std::size_t g = a.size();
  int s = 0;
  for (std::size_t i = 0; i < g; ++i) s += a[i] * b[(i + shift) % g];
  return s;
}

}  // namespace

TEST_CASE("OVSF codes are exactly orthogonal") {
  const CodeSet c = abc::gen_ovsf(64, 64);
  REQUIRE(c.chips.size() == 64);
  for (std::size_t i = 0; i < 64; ++i) {
    REQUIRE(c.chips[i].size() == 64);
    for (std::size_t j = 0; j < 64; ++j) {
      int dot = 0;
      for (std::size_t t = 0; t < 64; ++t) dot += c.chips[i][t] * c.chips[j][t];
      CHECK(dot == (i == j ? 64 : 0));
    }
  }
}

TEST_CASE("OVSF chips are +-1 and the first code is all ones") {
  const CodeSet c = abc::gen_ovsf(8, 8);
  for (const auto& row : c.chips)
    for (int v : row) CHECK(std::abs(v) == 1);
  for (int v : c.chips[0]) CHECK(v == 1);
}

TEST_CASE("Gold degree-6 correlations are three-valued") {
  const CodeSet c = abc::gen_gold(6, 33, 1);
  REQUIRE(c.gain == 63);
  const std::set<int> allowed = {-1, -17, 15};
  for (std::size_t u = 0; u < c.users; ++u)
    for (std::size_t v = 0; v < c.users; ++v)
      for (std::size_t s = 0; s < 63; ++s) {
        if (u == v && s == 0) continue;
        const int corr = cyclic_corr(c.chips[u], c.chips[v], s);
        CHECK(allowed.count(corr) == 1);
      }
}

TEST_CASE("Gold degree-5 correlations are three-valued") {
  const CodeSet c = abc::gen_gold(5, 20, 3);
  REQUIRE(c.gain == 31);
  const std::set<int> allowed = {-1, -9, 7};
  for (std::size_t u = 0; u < c.users; ++u)
    for (std::size_t v = 0; v < c.users; ++v)
      for (std::size_t s = 0; s < 31; ++s) {
        if (u == v && s == 0) continue;
        CHECK(allowed.count(cyclic_corr(c.chips[u], c.chips[v], s)) == 1);
      }
}

TEST_CASE("balanced Gold members are selected first") {
  // 2^(m-1) + 1 members of the degree-6 family are balanced; any
  // selection up to that count must consist of balanced codes only.
  const CodeSet c = abc::gen_gold(6, 30, 5);
  for (const auto& row : c.chips) {
    int sum = 0;
    for (int v : row) sum += v;
    CHECK(std::abs(sum) == 1);
  }
}

TEST_CASE("Gold selection is deterministic per seed and distinct") {
  const CodeSet a = abc::gen_gold(6, 50, 9);
  const CodeSet b = abc::gen_gold(6, 50, 9);
  const CodeSet d = abc::gen_gold(6, 50, 10);
  CHECK(a.chips == b.chips);
  CHECK(a.chips != d.chips);
  // members pairwise distinct
  std::set<std::vector<int>> uniq(a.chips.begin(), a.chips.end());
  CHECK(uniq.size() == a.chips.size());
}

TEST_CASE("code generators reject invalid requests") {
  CHECK_THROWS_AS(abc::gen_gold(4, 5, 1), abc::config_error);
  CHECK_THROWS_AS(abc::gen_gold(6, 66, 1), abc::config_error);  // family = 65
  CHECK_THROWS_AS(abc::gen_ovsf(48, 5), abc::config_error);
  CHECK_THROWS_AS(abc::gen_ovsf(16, 17), abc::config_error);
}

TEST_CASE("scrambling sequence draws from the unit-modulus alphabet") {
  const abc::ScramblingSequence s = abc::gen_scrambling(64, 4);
  REQUIRE(s.values.size() == 64);
  const double a = 1.0 / std::sqrt(2.0);
  for (cd v : s.values) {
    CHECK(std::abs(std::abs(v.real()) - a) < 1e-15);
    CHECK(std::abs(std::abs(v.imag()) - a) < 1e-15);
  }
  const abc::ScramblingSequence t = abc::gen_scrambling(64, 4);
  CHECK(s.values == t.values);
}

TEST_CASE("signature_block repeats the code along the diagonal") {
  const CodeSet c = abc::gen_ovsf(4, 2);
  const abc::CMatrix m = abc::signature_block(c, 1, 3);
  REQUIRE(m.rows() == 12);
  REQUIRE(m.cols() == 3);
  for (std::size_t col = 0; col < 3; ++col)
    for (std::size_t r = 0; r < 12; ++r) {
      const bool in_band = r >= 4 * col && r < 4 * (col + 1);
      if (in_band)
        CHECK(m(r, col) == cd{static_cast<double>(c.chips[1][r - 4 * col]), 0.0});
      else
        CHECK(m(r, col) == cd{0.0, 0.0});
    }
}
