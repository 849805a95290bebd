#pragma once

// Words, Dehn reduction and canonical conjugacy classes for the genus-g
// surface group  < a1,b1,...,ag,bg | [a1,b1]...[ag,bg] >.
//
// Letters are encoded as small integers: generator i -> 2i, its inverse -> 2i+1,
// so inversion is ^1. Serialization uses a1 b1 A1 B1 ... with capitals for
// inverses, concatenated without spaces.

#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "currents/common.hpp"

namespace currents {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

inline Letter inverse(Letter x) { return x ^ 1; }

inline Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inverse(*it));
  return out;
}

inline Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && out.back() == inverse(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return free_reduce(out);
}

inline std::string letter_name(Letter x) {
  unsigned gen = x >> 1;
  char base = (gen % 2 == 0) ? 'a' : 'b';
  if (x & 1) base = char(base - 'a' + 'A');
  return std::string(1, base) + std::to_string(gen / 2 + 1);
}

inline std::string word_to_string(const Word& w) {
  std::string s;
  for (Letter x : w) s += letter_name(x);
  return s;
}

inline Word word_from_string(const std::string& s, unsigned genus) {
  Word w;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    bool inv = (c >= 'A' && c <= 'Z');
    char low = inv ? char(c - 'A' + 'a') : c;
    if (low != 'a' && low != 'b') throw ValidationError("bad letter '" + std::string(1, c) + "' in word");
    ++i;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) throw ValidationError("missing generator index in word");
    unsigned idx = std::stoul(s.substr(i, j - i));
    if (idx < 1 || idx > genus) throw ValidationError("generator index out of range in word");
    Letter x = Letter(2 * (2 * (idx - 1) + (low == 'b' ? 1 : 0)) + (inv ? 1 : 0));
    w.push_back(x);
    i = j;
  }
  return w;
}

// ---------------------------------------------------------------------------

class GroupPresentation {
 public:
  explicit GroupPresentation(unsigned genus) : genus_(genus) {
    if (genus < 2) throw ValidationError("genus must be >= 2");
    for (unsigned i = 0; i < genus; ++i) {
      Letter a = Letter(4 * i), b = Letter(4 * i + 2);
      relator_.push_back(a);
      relator_.push_back(b);
      relator_.push_back(inverse(a));
      relator_.push_back(inverse(b));
    }
    build_tables();
  }

  unsigned genus() const { return genus_; }
  unsigned alphabet() const { return 4 * genus_; }
  const Word& relator() const { return relator_; }

  // Replace subwords longer than half the relator until none remain.
  Word dehn_reduce(Word w) const {
    w = free_reduce(w);
    const unsigned plen = 2 * genus_ + 1;
    bool changed = true;
    while (changed) {
      changed = false;
      if (w.size() < plen) break;
      for (std::size_t pos = 0; pos + plen <= w.size(); ++pos) {
        auto it = long_table_.find(pack(w, pos, plen));
        if (it == long_table_.end()) continue;
        Word out(w.begin(), w.begin() + pos);
        out.insert(out.end(), it->second.begin(), it->second.end());
        out.insert(out.end(), w.begin() + pos + plen, w.end());
        w = free_reduce(out);
        changed = true;
        break;
      }
    }
    return w;
  }

  // All same-length geodesic representatives reachable by exactly-half relator
  // swaps, with further reduction applied if a swap exposes one.
  std::vector<Word> geodesic_orbit(Word w) const {
    w = dehn_reduce(w);
    while (true) {
      std::set<Word> seen;
      std::vector<Word> stack{w};
      seen.insert(w);
      std::optional<Word> shorter;
      const unsigned hlen = 2 * genus_;
      while (!stack.empty() && !shorter) {
        Word cur = stack.back();
        stack.pop_back();
        if (cur.size() < hlen) continue;
        for (std::size_t pos = 0; pos + hlen <= cur.size() && !shorter; ++pos) {
          auto it = half_table_.find(pack(cur, pos, hlen));
          if (it == half_table_.end()) continue;
          Word out(cur.begin(), cur.begin() + pos);
          out.insert(out.end(), it->second.begin(), it->second.end());
          out.insert(out.end(), cur.begin() + pos + hlen, cur.end());
          out = dehn_reduce(out);
          if (out.size() < w.size()) {
            shorter = out;
          } else if (seen.insert(out).second) {
            stack.push_back(out);
          }
        }
      }
      if (!shorter) return std::vector<Word>(seen.begin(), seen.end());
      w = *shorter;
    }
  }

  // Geodesic word length of the element represented by w.
  std::size_t geodesic_length(const Word& w) const { return geodesic_orbit(w).front().size(); }

  // Lexicographically least geodesic representative; a normal form for elements.
  Word element_normal_form(const Word& w) const {
    auto orbit = geodesic_orbit(w);
    return *std::min_element(orbit.begin(), orbit.end());
  }

  // Cyclic word reduced so no rotation admits free or Dehn reduction.
  Word cyclic_reduce(Word w) const {
    while (true) {
      w = dehn_reduce(w);
      if (w.size() >= 2 && w.front() == inverse(w.back())) {
        w.erase(w.begin());
        w.pop_back();
        continue;
      }
      // Dehn patterns across the wrap
      const unsigned plen = 2 * genus_ + 1;
      if (w.size() >= plen) {
        bool hit = false;
        Word dbl = w;
        dbl.insert(dbl.end(), w.begin(), w.end());
        for (std::size_t pos = 1; pos < w.size() && !hit; ++pos) {
          if (pos + plen <= w.size()) continue;  // non-wrapping handled by dehn_reduce
          if (pos + plen > dbl.size()) break;
          auto it = long_table_.find(pack(dbl, pos, plen));
          if (it == long_table_.end()) continue;
          // rotate so the match is at the front, then replace
          Word rot(w.begin() + pos, w.end());
          rot.insert(rot.end(), w.begin(), w.begin() + pos);
          Word out(it->second);
          out.insert(out.end(), rot.begin() + plen, rot.end());
          w = free_reduce(out);
          hit = true;
        }
        if (hit) continue;
      }
      return w;
    }
  }

  const std::unordered_map<std::uint64_t, Word>& half_table() const { return half_table_; }

  std::uint64_t pack(const Word& w, std::size_t pos, std::size_t len) const {
    std::uint64_t key = 1;
    for (std::size_t i = 0; i < len; ++i) key = key * alphabet() + w[pos + i];
    return key;
  }

 private:
  void build_tables() {
    auto add_rotations = [&](const Word& r) {
      const std::size_t n = r.size();
      Word dbl = r;
      dbl.insert(dbl.end(), r.begin(), r.end());
      for (std::size_t k = 0; k < n; ++k) {
        Word rot(dbl.begin() + k, dbl.begin() + k + n);
        // long pattern: first 2g+1 letters; replacement: inverse of the rest
        Word head(rot.begin(), rot.begin() + (2 * genus_ + 1));
        Word tail(rot.begin() + (2 * genus_ + 1), rot.end());
        long_table_[pack(head, 0, head.size())] = inverse(tail);
        // exactly half: first 2g letters; replacement: inverse of the other half
        Word h1(rot.begin(), rot.begin() + 2 * genus_);
        Word h2(rot.begin() + 2 * genus_, rot.end());
        half_table_[pack(h1, 0, h1.size())] = inverse(h2);
      }
    };
    add_rotations(relator_);
    add_rotations(inverse(relator_));
  }

  unsigned genus_;
  Word relator_;
  std::unordered_map<std::uint64_t, Word> long_table_;  // length 2g+1 -> length 2g-1
  std::unordered_map<std::uint64_t, Word> half_table_;  // length 2g   -> length 2g
};

// ---------------------------------------------------------------------------

namespace detail {

inline Word least_rotation_or_inverse(const Word& w) {
  Word best = w;
  Word cur = w;
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  Word iv = inverse(w);
  for (std::size_t k = 0; k <= w.size(); ++k) {
    if (iv < best) best = iv;
    std::rotate(iv.begin(), iv.begin() + 1, iv.end());
  }
  return best;
}

}  // namespace detail

// Canonical representative of an unoriented conjugacy class.
class ConjClass {
 public:
  ConjClass() = default;

  const Word& word() const { return word_; }
  std::size_t length() const { return word_.size(); }
  std::string str() const { return word_to_string(word_); }
  bool operator==(const ConjClass& o) const { return word_ == o.word_; }
  bool operator!=(const ConjClass& o) const { return word_ != o.word_; }
  bool operator<(const ConjClass& o) const {
    if (word_.size() != o.word_.size()) return word_.size() < o.word_.size();
    return word_ < o.word_;
  }

  static ConjClass from_canonical(Word w) {
    ConjClass c;
    c.word_ = std::move(w);
    return c;
  }

 private:
  Word word_;
};

// Minimum over the closure of the cyclic word under rotation, inversion and
// exactly-half relator swaps. Dehn's conjugacy algorithm for surface groups
// identifies conjugate cyclic geodesics under exactly these moves.
inline ConjClass cyclic_canonical(const Word& input, const GroupPresentation& p) {
  Word w = p.cyclic_reduce(input);
  if (w.empty()) throw TrivialWordError();
  while (true) {
    std::set<Word> seen;
    Word start = detail::least_rotation_or_inverse(w);
    std::vector<Word> stack{start};
    seen.insert(start);
    std::optional<Word> shorter;
    const unsigned hlen = 2 * p.genus();
    while (!stack.empty() && !shorter) {
      Word cur = stack.back();
      stack.pop_back();
      if (cur.size() >= hlen) {
        Word dbl = cur;
        dbl.insert(dbl.end(), cur.begin(), cur.end());
        for (std::size_t pos = 0; pos < cur.size() && !shorter; ++pos) {
          auto it = p.half_table().find(p.pack(dbl, pos, hlen));
          if (it == p.half_table().end()) continue;
          Word out(it->second);
          out.insert(out.end(), dbl.begin() + pos + hlen, dbl.begin() + pos + cur.size());
          out = p.cyclic_reduce(out);
          if (out.size() < cur.size()) {
            shorter = out;
          } else {
            Word norm = detail::least_rotation_or_inverse(out);
            if (seen.insert(norm).second) stack.push_back(norm);
          }
        }
      }
    }
    if (!shorter) return ConjClass::from_canonical(*seen.begin());
    w = *shorter;
  }
}

inline bool is_conjugate(const Word& w1, const Word& w2, const GroupPresentation& p) {
  Word r1 = p.cyclic_reduce(w1), r2 = p.cyclic_reduce(w2);
  if (r1.empty() || r2.empty()) return r1.empty() && r2.empty();
  return cyclic_canonical(r1, p) == cyclic_canonical(r2, p);
}

// (root, power): smallest class d and k >= 1 with c = d^k.
inline std::pair<ConjClass, unsigned> primitive_root(const ConjClass& c, const GroupPresentation& p) {
  const Word& w = c.word();
  const std::size_t n = w.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0) continue;
    Word root(w.begin(), w.begin() + period);
    Word pw;
    for (std::size_t k = 0; k < n / period; ++k) pw.insert(pw.end(), root.begin(), root.end());
    if (cyclic_canonical(pw, p) == c) return {cyclic_canonical(root, p), unsigned(n / period)};
  }
  return {c, 1};
}

struct EnumerationOptions {
  std::size_t budget_classes = 4'000'000;
};

// All unoriented conjugacy classes with a representative of word length <= L,
// deterministic and sorted. The identity is excluded.
inline std::vector<ConjClass> enumerate_conjugacy(const GroupPresentation& p, unsigned L,
                                                  const EnumerationOptions& opt = {}) {
  const unsigned A = p.alphabet();
  std::vector<std::vector<Word>> partial(A);
  // parallel over the first letter, deterministic merge by letter index;
  // a word is kept only if cyclically reduced and least among its rotations
  // and inverse, so each cyclic class is canonicalized once
  parallel_for(A, [&](std::size_t first) {
    std::vector<Word>& local = partial[first];
    Word w{Letter(first)};
    std::function<void()> rec = [&]() {
      if (w.front() != inverse(w.back()) && w == detail::least_rotation_or_inverse(w))
        local.push_back(w);
      if (w.size() == L) return;
      for (Letter x = 0; x < A; ++x) {
        if (x == inverse(w.back())) continue;
        w.push_back(x);
        rec();
        w.pop_back();
      }
    };
    rec();
  });
  // canonicalize (parallel over chunks), then dedup
  std::vector<Word> raw;
  for (auto& v : partial) {
    raw.insert(raw.end(), v.begin(), v.end());
    v.clear();
  }
  std::vector<Word> canon(raw.size());
  parallel_for(raw.size(), [&](std::size_t i) { canon[i] = cyclic_canonical(raw[i], p).word(); });
  std::sort(canon.begin(), canon.end(), [](const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  if (canon.size() > opt.budget_classes)
    throw BudgetError("class budget exceeded: " + std::to_string(canon.size()) + " > " +
                      std::to_string(opt.budget_classes));
  std::vector<ConjClass> out;
  out.reserve(canon.size());
  for (auto& w : canon) out.push_back(ConjClass::from_canonical(std::move(w)));
  return out;
}

// Freely reduced words of length <= L (group elements with repetition by word).
template <typename F>
inline void for_each_reduced_word(const GroupPresentation& p, unsigned L, F&& visit) {
  const unsigned A = p.alphabet();
  Word w;
  std::function<void()> rec = [&]() {
    if (!w.empty()) visit(const_cast<const Word&>(w));
    if (w.size() == L) return;
    for (Letter x = 0; x < A; ++x) {
      if (!w.empty() && x == inverse(w.back())) continue;
      w.push_back(x);
      rec();
      w.pop_back();
    }
  };
  rec();
}

}  // namespace currents
