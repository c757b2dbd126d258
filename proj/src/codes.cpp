#include "abc/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

namespace {

// m-sequence from the primitive polynomial given by its exponent mask
// (bit e set <=> coefficient of x^e is 1). Fibonacci LFSR, all-ones seed.
std::vector<int> msequence(int degree, unsigned poly_mask) {
  const std::size_t period = (1u << degree) - 1;
  std::vector<int> bits(period);
  std::vector<int> state(degree, 1);
  for (std::size_t n = 0; n < period; ++n) {
    bits[n] = state[0];
    int fb = 0;
    for (int e = 1; e <= degree; ++e)
      if (poly_mask & (1u << e)) fb ^= state[degree - e];
    for (int i = 0; i + 1 < degree; ++i) state[i] = state[i + 1];
    state[degree - 1] = fb;
  }
  return bits;
}

std::vector<int> bipolar_xor_shift(const std::vector<int>& u,
                                   const std::vector<int>& v,
                                   std::size_t shift) {
  const std::size_t n = u.size();
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int b = u[i] ^ v[(i + shift) % n];
    out[i] = b ? -1 : 1;  // 0 -> +1, 1 -> -1
  }
  return out;
}

bool balanced(const std::vector<int>& chips) {
  return std::abs(std::accumulate(chips.begin(), chips.end(), 0)) == 1;
}

}  // namespace

CodeSet gen_gold(int degree, std::size_t users, std::uint64_t seed) {
  // Preferred pairs: degree 5 (x^5+x^2+1, x^5+x^4+x^3+x^2+1),
  // degree 6 (x^6+x+1, x^6+x^5+x^2+x+1).
  unsigned pa, pb;
  if (degree == 5) {
    pa = (1u << 5) | (1u << 2) | 1u;
    pb = (1u << 5) | (1u << 4) | (1u << 3) | (1u << 2) | 1u;
  } else if (degree == 6) {
    pa = (1u << 6) | (1u << 1) | 1u;
    pb = (1u << 6) | (1u << 5) | (1u << 2) | (1u << 1) | 1u;
  } else {
    std::ostringstream os;
    os << "gen_gold: unsupported degree " << degree << " (need 5 or 6)";
    throw config_error(os.str());
  }
  const std::size_t gain = (std::size_t{1} << degree) - 1;
  const std::size_t family_size = gain + 2;  // u, v, u^shift(v) x gain
  if (users > family_size) {
    std::ostringstream os;
    os << "gen_gold: " << users << " users exceed family size " << family_size;
    throw config_error(os.str());
  }

  const std::vector<int> u = msequence(degree, pa);
  const std::vector<int> v = msequence(degree, pb);

  std::vector<std::vector<int>> family;
  family.reserve(family_size);
  std::vector<int> ub(gain), vb(gain);
  for (std::size_t i = 0; i < gain; ++i) {
    ub[i] = u[i] ? -1 : 1;
    vb[i] = v[i] ? -1 : 1;
  }
  family.push_back(ub);
  family.push_back(vb);
  for (std::size_t t = 0; t < gain; ++t)
    family.push_back(bipolar_xor_shift(u, v, t));

  // Balanced members first, seeded shuffle within each partition.
  std::vector<std::size_t> bal, unbal;
  for (std::size_t i = 0; i < family.size(); ++i)
    (balanced(family[i]) ? bal : unbal).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(bal.begin(), bal.end(), rng);
  std::shuffle(unbal.begin(), unbal.end(), rng);
  std::vector<std::size_t> order = bal;
  order.insert(order.end(), unbal.begin(), unbal.end());

  CodeSet cs;
  cs.family = CodeSet::Family::gold;
  cs.gain = gain;
  cs.users = users;
  for (std::size_t k = 0; k < users; ++k) cs.chips.push_back(family[order[k]]);
  return cs;
}

CodeSet gen_ovsf(std::size_t gain, std::size_t users) {
  if (gain == 0 || (gain & (gain - 1)) != 0)
    throw config_error("gen_ovsf: gain must be a power of two");
  if (users > gain)
    throw config_error("gen_ovsf: more users than spreading gain");
  // Walsh-Hadamard by the [C;C],[C;-C] doubling; row i entry j is
  // (-1)^popcount(i & j).
  CodeSet cs;
  cs.family = CodeSet::Family::ovsf;
  cs.gain = gain;
  cs.users = users;
  for (std::size_t i = 0; i < users; ++i) {
    std::vector<int> row(gain);
    for (std::size_t j = 0; j < gain; ++j)
      row[j] = (std::popcount(i & j) & 1) ? -1 : 1;
    cs.chips.push_back(std::move(row));
  }
  return cs;
}

ScramblingSequence gen_scrambling(std::size_t gain, std::uint64_t seed) {
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  static const cd alphabet[4] = {{inv_sqrt2, inv_sqrt2},
                                 {inv_sqrt2, -inv_sqrt2},
                                 {-inv_sqrt2, inv_sqrt2},
                                 {-inv_sqrt2, -inv_sqrt2}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  ScramblingSequence s;
  s.gain = gain;
  s.values.resize(gain);
  for (std::size_t i = 0; i < gain; ++i) s.values[i] = alphabet[pick(rng)];
  return s;
}

CMatrix signature_block(const CodeSet& codes, std::size_t user,
                        std::size_t symbols) {
  if (user >= codes.users) {
    std::ostringstream os;
    os << "signature_block: user index " << user << " out of range (K="
       << codes.users << ")";
    throw config_error(os.str());
  }
  const std::size_t g = codes.gain;
  CMatrix s(g * symbols, symbols);
  for (std::size_t m = 0; m < symbols; ++m)
    for (std::size_t t = 0; t < g; ++t)
      s(m * g + t, m) = static_cast<double>(codes.chips[user][t]);
  return s;
}

}  // namespace abc
