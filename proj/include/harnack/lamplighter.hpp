#ifndef HARNACK_LAMPLIGHTER_HPP
#define HARNACK_LAMPLIGHTER_HPP

// States of the lamplighter graph Z wr Z_2 with the switch-then-walk edge set:
// the four neighbours of (n, xi) are (n +- 1, xi with lamp n set to k), k = 0, 1.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harnack/errors.hpp"

namespace harnack {

/// Lamplighter position plus the finite set of lit lamps (sorted, unique).
struct LampState {
  int position = 0;
  std::vector<int> lamps;

  LampState() = default;
  LampState(int pos, std::vector<int> lit) : position(pos), lamps(std::move(lit)) {
    std::sort(lamps.begin(), lamps.end());
    lamps.erase(std::unique(lamps.begin(), lamps.end()), lamps.end());
  }

  [[nodiscard]] bool lit(int site) const {
    return std::binary_search(lamps.begin(), lamps.end(), site);
  }

  /// Same state with lamp `site` forced to `on`.
  [[nodiscard]] LampState with_lamp(int site, bool on) const {
    LampState out = *this;
    const auto it = std::lower_bound(out.lamps.begin(), out.lamps.end(), site);
    const bool present = it != out.lamps.end() && *it == site;
    if (on && !present) out.lamps.insert(it, site);
    if (!on && present) out.lamps.erase(it);
    return out;
  }

  friend bool operator==(const LampState&, const LampState&) = default;
};

/// "n|i,j,k" e.g. "0|" for the identity, "3|-1,0,2".
inline std::string to_label(const LampState& s) {
  std::string out = std::to_string(s.position) + "|";
  for (std::size_t i = 0; i < s.lamps.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.lamps[i]);
  }
  return out;
}

inline LampState parse_lamp_state(const std::string& label) {
  const auto bar = label.find('|');
  if (bar == std::string::npos) throw precondition_error("lamp state label needs 'n|lamps'");
  try {
    LampState s;
    s.position = std::stoi(label.substr(0, bar));
    std::size_t start = bar + 1;
    while (start < label.size()) {
      auto comma = label.find(',', start);
      if (comma == std::string::npos) comma = label.size();
      s.lamps.push_back(std::stoi(label.substr(start, comma - start)));
      start = comma + 1;
    }
    return LampState(s.position, std::move(s.lamps));
  } catch (const std::logic_error&) {
    throw precondition_error("bad lamp state label '" + label + "'");
  }
}

/// The four neighbours, ordered (k=0,-1), (k=0,+1), (k=1,-1), (k=1,+1).
inline std::vector<LampState> lamp_neighbors(const LampState& s) {
  std::vector<LampState> out;
  out.reserve(4);
  for (int k = 0; k < 2; ++k) {
    const LampState switched = s.with_lamp(s.position, k == 1);
    for (int step : {-1, 1}) {
      LampState t = switched;
      t.position += step;
      out.push_back(std::move(t));
    }
  }
  return out;
}

/// Word-metric distance from the identity (0, all lamps off) given the extent
/// of the lit set.
///
/// A path to (x, xi) is a walk on Z from 0 to x that departs every lit site
/// (a lamp is set on leaving its site). With L = min(0, x, lit) and
/// H = max(0, x, lit) the two candidate tours are left-first
/// (-L + (H-L) + (H-x)) and right-first (H + (H-L) + (x-L)). A tour whose last
/// arrival at x is also its first visit cannot have set lamp x, and then
/// costs two more steps. For x >= 0 and lit extent [-a, b] around the origin
/// this reduces to 2a + b + |b - x| except when x = b is lit.
inline long lamp_distance_from_extent(long x, bool any_lit, long min_lit, long max_lit, bool x_lit) {
  long lo = std::min(0L, x);
  long hi = std::max(0L, x);
  if (any_lit) {
    lo = std::min(lo, min_lit);
    hi = std::max(hi, max_lit);
  }
  const long left_first = -lo + (hi - lo) + (hi - x);
  const long right_first = hi + (hi - lo) + (x - lo);
  const bool left_ok = !x_lit || x < hi || (x == 0 && left_first > 0);
  const bool right_ok = !x_lit || x > lo || (x == 0 && right_first > 0);
  return std::min(left_first + (left_ok ? 0 : 2), right_first + (right_ok ? 0 : 2));
}

inline long lamp_distance(const LampState& s) {
  const bool any = !s.lamps.empty();
  return lamp_distance_from_extent(s.position, any, any ? s.lamps.front() : 0,
                                   any ? s.lamps.back() : 0, s.lit(s.position));
}

/// Lamp configuration on the window [-half_width, half_width] packed into
/// 64-bit words, with O(words) extent queries. Used by the simulators.
class LampWindow {
public:
  explicit LampWindow(int half_width)
      : half_width_(half_width), words_((2 * static_cast<std::size_t>(half_width) + 1 + 63) / 64, 0) {}

  [[nodiscard]] int half_width() const { return half_width_; }
  [[nodiscard]] bool in_window(int site) const { return site >= -half_width_ && site <= half_width_; }

  [[nodiscard]] bool get(int site) const {
    if (!in_window(site)) return false;
    const auto i = index(site);
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  /// Returns true when the lamp changed.
  bool set(int site, bool on) {
    if (!in_window(site)) throw cap_exceeded("lamp site " + std::to_string(site) + " outside window");
    const auto i = index(site);
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    const bool was = (words_[i / 64] & mask) != 0;
    if (on) words_[i / 64] |= mask;
    else words_[i / 64] &= ~mask;
    return was != on;
  }

  [[nodiscard]] std::optional<int> min_lit() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return site(w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w])));
    return std::nullopt;
  }

  [[nodiscard]] std::optional<int> max_lit() const {
    for (std::size_t w = words_.size(); w-- > 0;)
      if (words_[w]) return site(w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(words_[w])));
    return std::nullopt;
  }

  [[nodiscard]] long distance_with_position(int x) const {
    const auto lo = min_lit();
    if (!lo) return lamp_distance_from_extent(x, false, 0, 0, false);
    return lamp_distance_from_extent(x, true, *lo, *max_lit(), get(x));
  }

  [[nodiscard]] std::vector<int> lit_sites() const {
    std::vector<int> out;
    for (int s = -half_width_; s <= half_width_; ++s)
      if (get(s)) out.push_back(s);
    return out;
  }

  [[nodiscard]] const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const LampWindow&, const LampWindow&) = default;

private:
  [[nodiscard]] std::size_t index(int s) const { return static_cast<std::size_t>(s + half_width_); }
  [[nodiscard]] int site(std::size_t i) const { return static_cast<int>(i) - half_width_; }

  int half_width_;
  std::vector<std::uint64_t> words_;
};

inline LampWindow to_window(const LampState& s, int half_width) {
  LampWindow w(half_width);
  for (int site : s.lamps) w.set(site, true);
  return w;
}

} // namespace harnack

#endif
