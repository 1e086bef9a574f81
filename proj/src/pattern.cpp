#include "xnet/pattern.hpp"

#include <algorithm>

namespace xnet {

namespace {

HopMatrix col_swapped(const HopMatrix& m) {
  return {{{m[0][1], m[0][0]}, {m[1][1], m[1][0]}}};
}

int letter_rank(char c) {
  switch (c) {
    case 'P':
      return 0;
    case 'Z':
      return 1;
    case 'S':
      return 2;
    case 'X':
      return 3;
    default:
      return 4;
  }
}

}  // namespace

HopMatrix letter_matrix(char letter) {
  switch (letter) {
    case 'P':
      return {{{1, 0}, {0, 1}}};
    case 'Z':
      return {{{1, 1}, {0, 1}}};
    case 'S':
      return {{{1, 0}, {1, 1}}};
    case 'X':
      return {{{1, 1}, {1, 1}}};
    default:
      throw PatternError(std::string("unknown letter '") + letter + "'");
  }
}

HopPattern classify_hop(const HopMatrix& m) {
  for (int r = 0; r < 2; ++r)
    if (m[r][0] + m[r][1] == 0)
      throw PatternError("hop has an empty transmit row");
  for (int c = 0; c < 2; ++c)
    if (m[0][c] + m[1][c] == 0)
      throw PatternError("hop has an empty receive column");
  for (const char letter : {'P', 'Z', 'S', 'X'}) {
    if (m == letter_matrix(letter)) return {letter, false, m};
    if (m == col_swapped(letter_matrix(letter))) return {letter, true, m};
  }
  throw PatternError("unreachable: unclassifiable 2x2 hop");
}

PatternString pattern_word(const LayeredNetwork& net) {
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    if (net.layers[l] != 2)
      throw PatternError("layer " + std::to_string(l) +
                         " has width != 2; no pattern word");
  PatternString out;
  for (int h = 0; h < net.hop_count(); ++h) {
    HopMatrix m{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m[i][j] = net.has_edge(h, i, j) ? 1 : 0;
    out.word.push_back(classify_hop(m).letter);
  }
  return out;
}

bool letter_less(char a, char b) { return letter_rank(a) < letter_rank(b); }

bool word_less(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return letter_less(a[i], b[i]);
  }
  return a.size() < b.size();
}

std::vector<std::string> swap_orbit(const std::string& word) {
  const int L = static_cast<int>(word.size());
  std::vector<HopMatrix> base;
  base.reserve(L);
  for (const char c : word) base.push_back(letter_matrix(c));

  std::vector<std::string> out;
  for (unsigned mask = 0; mask < (1u << (L + 1)); ++mask) {
    std::string image;
    image.reserve(L);
    bool valid = true;
    for (int h = 0; h < L && valid; ++h) {
      const bool swap_in = (mask >> h) & 1u;
      const bool swap_out = (mask >> (h + 1)) & 1u;
      HopMatrix m{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          m[i][j] = base[h][swap_in ? 1 - i : i][swap_out ? 1 - j : j];
      bool matched = false;
      for (const char letter : {'P', 'Z', 'S', 'X'}) {
        if (m == letter_matrix(letter)) {
          image.push_back(letter);
          matched = true;
          break;
        }
      }
      valid = matched;  // images landing on a mirror matrix have no letter
    }
    if (valid) out.push_back(image);
  }
  std::sort(out.begin(), out.end(), word_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PatternString canonicalize(const PatternString& word) {
  std::string stripped;
  for (const char c : word.word) {
    if (c == 'P') continue;
    if (c != 'Z' && c != 'S' && c != 'X')
      throw PatternError(std::string("unknown letter '") + c + "' in word");
    stripped.push_back(c);
  }
  if (stripped.empty()) return {"P"};
  // Deleting a parallel hop only relabels the chain, so the orbit of the
  // stripped word is the orbit of the original.
  const auto orbit = swap_orbit(stripped);
  return {orbit.front()};
}

}  // namespace xnet
