#ifndef FGCORE_WORDS_HPP
#define FGCORE_WORDS_HPP

// Elements of the free group F_n as freely reduced words.
//
// Text format: the first n lowercase letters name the generators, the
// matching uppercase letters their inverses. "aBA" is a b^-1 a^-1. The
// empty string and "1" both denote the identity.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgcore/errors.hpp"

namespace fgcore {

inline constexpr unsigned kMaxAlphabetRank = 26;

struct Letter {
  std::uint32_t generator = 0;
  std::int8_t sign = 1;

  constexpr Letter inverse() const { return {generator, static_cast<std::int8_t>(-sign)}; }
  constexpr bool cancels(const Letter& other) const {
    return generator == other.generator && sign == -other.sign;
  }
  /// Dense code in [0, 2n): 2*generator for a, 2*generator+1 for A.
  constexpr unsigned code() const { return 2 * generator + (sign < 0 ? 1u : 0u); }
  static constexpr Letter from_code(unsigned c) {
    return {c / 2, static_cast<std::int8_t>(c % 2 == 0 ? 1 : -1)};
  }

  friend constexpr bool operator==(const Letter&, const Letter&) = default;
  friend constexpr auto operator<=>(const Letter& a, const Letter& b) {
    return a.code() <=> b.code();
  }
};

class Word {
 public:
  explicit Word(unsigned alphabet_rank = 2) : rank_(alphabet_rank) { check_rank(rank_); }

  /// Freely reduces `letters`. Reduction is a stack pass, so the result does
  /// not depend on the order in which cancellations are found.
  static Word reduce(unsigned alphabet_rank, std::span<const Letter> letters) {
    Word w(alphabet_rank);
    w.letters_.reserve(letters.size());
    for (const Letter& l : letters) {
      if (l.generator >= alphabet_rank || (l.sign != 1 && l.sign != -1)) {
        throw ParseError("letter outside alphabet of rank " + std::to_string(alphabet_rank));
      }
      w.push(l);
    }
    return w;
  }

  static Word parse(std::string_view text, unsigned alphabet_rank) {
    check_rank(alphabet_rank);
    if (text == "1") return Word(alphabet_rank);
    std::vector<Letter> raw;
    raw.reserve(text.size());
    for (char ch : text) {
      const auto uc = static_cast<unsigned char>(ch);
      if (!std::isalpha(uc)) {
        throw ParseError("malformed word '" + std::string(text) + "': unexpected character '" +
                         std::string(1, ch) + "'");
      }
      const bool upper = std::isupper(uc) != 0;
      const unsigned gen = static_cast<unsigned>(std::tolower(uc) - 'a');
      if (gen >= alphabet_rank) {
        throw ParseError("symbol '" + std::string(1, ch) + "' outside alphabet of rank " +
                         std::to_string(alphabet_rank));
      }
      raw.push_back({gen, static_cast<std::int8_t>(upper ? -1 : 1)});
    }
    return reduce(alphabet_rank, raw);
  }

  unsigned alphabet_rank() const { return rank_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const {
    Word w(rank_);
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inverse());
    return w;
  }

  std::string str() const {
    if (letters_.empty()) return "1";
    std::string s;
    s.reserve(letters_.size());
    for (const Letter& l : letters_) {
      const char base = l.sign > 0 ? 'a' : 'A';
      s.push_back(static_cast<char>(base + l.generator));
    }
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;
  /// Shortlex order: length first, then letter codes.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                  b.letters_.begin(), b.letters_.end());
  }

 private:
  static void check_rank(unsigned n) {
    if (n < 1 || n > kMaxAlphabetRank) {
      throw ParseError("alphabet rank must be in [1, 26], got " + std::to_string(n));
    }
  }

  void push(const Letter& l) {
    if (!letters_.empty() && letters_.back().cancels(l)) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }

  friend Word concat(const Word& lhs, const Word& rhs);

  unsigned rank_;
  std::vector<Letter> letters_;
};

inline Word parse_word(std::string_view text, unsigned alphabet_rank) {
  return Word::parse(text, alphabet_rank);
}

inline Word invert(const Word& w) { return w.inverse(); }

inline Word concat(const Word& lhs, const Word& rhs) {
  if (lhs.rank_ != rhs.rank_) throw AlphabetMismatch(lhs.rank_, rhs.rank_);
  Word out = lhs;
  out.letters_.reserve(lhs.length() + rhs.length());
  for (const Letter& l : rhs.letters_) out.push(l);
  return out;
}

/// Splits a comma-separated generator list. Surrounding blanks are ignored.
inline std::vector<Word> parse_word_list(std::string_view text, unsigned alphabet_rank) {
  std::vector<Word> out;
  if (text.find_first_not_of(" \t") == std::string_view::npos) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string_view piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start);
    const auto first = piece.find_first_not_of(" \t");
    const auto last = piece.find_last_not_of(" \t");
    if (first == std::string_view::npos) throw ParseError("empty entry in word list '" + std::string(text) + "'");
    out.push_back(Word::parse(piece.substr(first, last - first + 1), alphabet_rank));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CyclicDecomposition {
  Word conjugator;  // c in w = c u c^-1
  Word core;        // u, cyclically reduced
};

inline CyclicDecomposition cyclic_decompose(const Word& w) {
  const auto letters = w.letters();
  std::size_t lo = 0;
  std::size_t hi = letters.size();
  while (hi - lo >= 2 && letters[lo].cancels(letters[hi - 1])) {
    ++lo;
    --hi;
  }
  return {Word::reduce(w.alphabet_rank(), letters.subspan(0, lo)),
          Word::reduce(w.alphabet_rank(), letters.subspan(lo, hi - lo))};
}

/// The shortest r with w = r^e for some e >= 1. Identity maps to identity.
inline Word primitive_root(const Word& w) {
  if (w.empty()) return w;
  auto [c, u] = cyclic_decompose(w);
  const auto letters = u.letters();
  const std::size_t len = letters.size();
  std::size_t period = len;
  for (std::size_t p = 1; p < len; ++p) {
    if (len % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < len && ok; ++i) ok = letters[i] == letters[i - p];
    if (ok) {
      period = p;
      break;
    }
  }
  const Word r = Word::reduce(w.alphabet_rank(), letters.subspan(0, period));
  return concat(concat(c, r), c.inverse());
}

}  // namespace fgcore

#endif  // FGCORE_WORDS_HPP
