#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "zeq/common.hpp"

namespace zeq {

/// Closed interval of integers; lo > hi means empty.
struct Iv {
  Int lo = 0;
  Int hi = -1;

  bool empty() const { return lo > hi; }
  bool contains(Int n) const { return n >= lo && n <= hi; }

  static Iv meet(const Iv& a, const Iv& b) { return Iv{std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

  bool operator==(const Iv& o) const {
    if (empty() && o.empty()) return true;
    return lo == o.lo && hi == o.hi;
  }
};

/// Finite integer window on which dense evaluation happens.
/// Nat-mode windows have lo == 0; int-mode windows straddle 0.
struct Window {
  Int lo = 0;
  Int hi = 0;

  Window() = default;
  Window(Int l, Int h) : lo(l), hi(h) {
    if (hi < lo) throw Error("window upper bound below lower bound");
    if (lo > 0 || hi < 0) throw Error("window must contain 0");
    if (size() > (Int(1) << 26)) throw Error("window too large");
  }

  static Window nat(Int hi) { return Window(0, hi); }
  static Window natDigits(Int d) {
    if (d < 1) throw Error("digit cap must be >= 1");
    return Window(0, pow7(d) - 1);
  }
  static Window intDigits(Int d) {
    if (d < 1) throw Error("digit cap must be >= 1");
    return Window(-(pow7(d) - 1), pow7(d) - 1);
  }

  bool natMode() const { return lo == 0; }
  Int size() const { return hi - lo + 1; }
  bool contains(Int n) const { return n >= lo && n <= hi; }
  Iv full() const { return Iv{lo, hi}; }

  /// Largest D with 7^D - 1 <= hi.
  Int digitCap() const {
    Int d = 0;
    while (pow7(d + 1) - 1 <= hi) ++d;
    return d;
  }

  bool operator==(const Window& o) const { return lo == o.lo && hi == o.hi; }
};

/// Dense bit-vector over a window plus the sub-interval on which the
/// value is certified to agree with the infinite-set semantics.
class WindowSet {
 public:
  WindowSet() = default;
  explicit WindowSet(const Window& w)
      : win_(w), bits_(static_cast<std::size_t>((w.size() + 63) / 64), 0), horizon_(w.full()) {}

  static WindowSet fromValues(const Window& w, const std::set<Int>& vals) {
    WindowSet r(w);
    for (Int v : vals)
      if (w.contains(v)) r.set(v);
    return r;
  }

  static WindowSet fullSet(const Window& w) {
    WindowSet r(w);
    for (auto& b : r.bits_) b = ~std::uint64_t(0);
    r.maskTail();
    return r;
  }

  const Window& window() const { return win_; }
  const Iv& horizon() const { return horizon_; }
  void setHorizon(const Iv& h) { horizon_ = Iv::meet(h, win_.full()); }
  bool unsound() const { return unsound_; }
  void markUnsound() {
    unsound_ = true;
    horizon_ = Iv{0, -1};
  }
  /// A structure-aware caller takes responsibility for the horizon.
  void certify(const Iv& h) {
    horizon_ = Iv::meet(h, win_.full());
    unsound_ = false;
  }

  bool get(Int n) const {
    if (!win_.contains(n)) throw Error("membership query outside window");
    std::size_t i = static_cast<std::size_t>(n - win_.lo);
    return (bits_[i >> 6] >> (i & 63)) & 1;
  }

  void set(Int n, bool v = true) {
    if (!win_.contains(n)) throw Error("bit outside window");
    std::size_t i = static_cast<std::size_t>(n - win_.lo);
    if (v)
      bits_[i >> 6] |= (std::uint64_t(1) << (i & 63));
    else
      bits_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }

  Int count() const {
    Int c = 0;
    for (auto b : bits_) c += __builtin_popcountll(b);
    return c;
  }

  bool sameBits(const WindowSet& o) const { return win_ == o.win_ && bits_ == o.bits_; }

  /// First value (lowest) whose membership differs from `o`, if any.
  std::optional<Int> firstBitDifference(const WindowSet& o) const {
    requireSameWindow(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      std::uint64_t d = bits_[i] ^ o.bits_[i];
      if (d) return win_.lo + Int(i * 64 + __builtin_ctzll(d));
    }
    return std::nullopt;
  }

  void forEach(const std::function<void(Int)>& f) const {
    for (std::size_t blk = 0; blk < bits_.size(); ++blk) {
      std::uint64_t b = bits_[blk];
      while (b) {
        unsigned tz = __builtin_ctzll(b);
        f(win_.lo + Int(blk * 64 + tz));
        b &= b - 1;
      }
    }
  }

  std::vector<Int> values() const {
    std::vector<Int> v;
    forEach([&](Int n) { v.push_back(n); });
    return v;
  }

  std::set<Int> valueSet() const {
    std::set<Int> v;
    forEach([&](Int n) { v.insert(n); });
    return v;
  }

  /// dst |= this shifted by `delta` in value space, clipped to the window.
  void shiftOrInto(WindowSet& dst, Int delta) const {
    requireSameWindow(dst);
    Int size = win_.size();
    if (delta <= -size || delta >= size) return;
    std::size_t nblk = bits_.size();
    if (delta >= 0) {
      std::size_t ws = static_cast<std::size_t>(delta / 64);
      unsigned bs = static_cast<unsigned>(delta % 64);
      for (std::size_t j = nblk; j-- > ws;) {
        std::uint64_t v = bits_[j - ws] << bs;
        if (bs && j - ws > 0) v |= bits_[j - ws - 1] >> (64 - bs);
        dst.bits_[j] |= v;
      }
    } else {
      Int s = -delta;
      std::size_t ws = static_cast<std::size_t>(s / 64);
      unsigned bs = static_cast<unsigned>(s % 64);
      for (std::size_t j = 0; j + ws < nblk; ++j) {
        std::uint64_t v = bits_[j + ws] >> bs;
        if (bs && j + ws + 1 < nblk) v |= bits_[j + ws + 1] << (64 - bs);
        dst.bits_[j] |= v;
      }
    }
    dst.maskTail();
  }

  /// Clear all bits with value < v.
  void clearBelowValue(Int v) {
    for (Int n = win_.lo; n < std::min(v, win_.hi + 1); ++n) set(n, false);
  }

  bool subsetOf(const WindowSet& o) const {
    requireSameWindow(o);
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] & ~o.bits_[i]) return false;
    return true;
  }

  void requireSameWindow(const WindowSet& o) const {
    if (!(win_ == o.win_)) throw Error("window mismatch");
  }

  friend WindowSet winUnion(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r = a;
    for (std::size_t i = 0; i < r.bits_.size(); ++i) r.bits_[i] |= b.bits_[i];
    r.horizon_ = Iv::meet(a.horizon_, b.horizon_);
    r.unsound_ = a.unsound_ || b.unsound_;
    return r;
  }

  friend WindowSet winIntersect(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r = a;
    for (std::size_t i = 0; i < r.bits_.size(); ++i) r.bits_[i] &= b.bits_[i];
    r.horizon_ = Iv::meet(a.horizon_, b.horizon_);
    r.unsound_ = a.unsound_ || b.unsound_;
    return r;
  }

  friend WindowSet winDiff(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r = a;
    for (std::size_t i = 0; i < r.bits_.size(); ++i) r.bits_[i] &= ~b.bits_[i];
    r.horizon_ = Iv::meet(a.horizon_, b.horizon_);
    r.unsound_ = a.unsound_ || b.unsound_;
    return r;
  }

  /// Elementwise sum clipped to the window, by shifted-or convolution.
  /// Horizon: exact on a nat window (a sum below n only involves operands
  /// below n); on an int window the bits alone certify nothing, so the
  /// default is unsound and structure-aware callers override.
  friend WindowSet winAdd(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r(a.win_);
    const WindowSet& sparse = a.count() <= b.count() ? a : b;
    const WindowSet& dense = a.count() <= b.count() ? b : a;
    sparse.forEach([&](Int n) { dense.shiftOrInto(r, n); });
    if (a.win_.natMode()) {
      r.horizon_ = Iv{0, std::min(a.horizon_.hi, b.horizon_.hi)};
      r.unsound_ = a.unsound_ || b.unsound_;
    } else {
      r.markUnsound();
    }
    return r;
  }

  /// Truncated subtraction {m - n | m in a, n in b, m >= n}.
  friend WindowSet winTruncSub(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r(a.win_);
    b.forEach([&](Int n) {
      if (n >= 0) a.shiftOrInto(r, -n);
    });
    r.clearBelowValue(0);
    r.markUnsound();
    return r;
  }

  friend WindowSet winSub(const WindowSet& a, const WindowSet& b) {
    a.requireSameWindow(b);
    WindowSet r(a.win_);
    b.forEach([&](Int n) { a.shiftOrInto(r, -n); });
    r.markUnsound();
    return r;
  }

  friend WindowSet winNegate(const WindowSet& a) {
    WindowSet r(a.win_);
    a.forEach([&](Int n) {
      if (r.win_.contains(-n)) r.set(-n);
    });
    r.horizon_ = Iv::meet(Iv{-a.horizon_.hi, -a.horizon_.lo}, a.win_.full());
    r.unsound_ = a.unsound_;
    return r;
  }

 private:
  void maskTail() {
    Int size = win_.size();
    unsigned used = static_cast<unsigned>(size % 64);
    if (used) bits_.back() &= (~std::uint64_t(0)) >> (64 - used);
  }

  Window win_;
  std::vector<std::uint64_t> bits_;
  Iv horizon_;
  bool unsound_ = false;
};

enum class WinOp { Union, Intersect, Add, TruncSub };

inline WindowSet winBinary(WinOp op, const WindowSet& a, const WindowSet& b) {
  switch (op) {
    case WinOp::Union: return winUnion(a, b);
    case WinOp::Intersect: return winIntersect(a, b);
    case WinOp::Add: return winAdd(a, b);
    case WinOp::TruncSub: return winTruncSub(a, b);
  }
  throw Error("bad op");
}

}  // namespace zeq
