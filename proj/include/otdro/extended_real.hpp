#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace otdro {

// Value in [-inf, +inf] with an explicit infinity tag.  Optimizers in this
// library never do arithmetic on floating +/-inf; candidates with infinite
// cost are excluded *before* any subtraction, which implements the
// convention inf - inf := -inf used by the duality formulas.
class ExtReal {
 public:
  ExtReal() : value_(0.0), tag_(Tag::Finite) {}

  static ExtReal finite(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite: non-finite value");
    ExtReal e;
    e.value_ = v;
    return e;
  }
  static ExtReal pos_inf() {
    ExtReal e;
    e.tag_ = Tag::PosInf;
    return e;
  }
  static ExtReal neg_inf() {
    ExtReal e;
    e.tag_ = Tag::NegInf;
    return e;
  }

  bool is_finite() const { return tag_ == Tag::Finite; }
  bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  bool is_neg_inf() const { return tag_ == Tag::NegInf; }

  // Only valid for finite values.
  double value() const {
    if (!is_finite()) throw std::logic_error("ExtReal::value: not finite");
    return value_;
  }

  // Finite part, with +/-HUGE_VAL for the infinite tags (for printing only).
  double as_double() const {
    if (is_pos_inf()) return HUGE_VAL;
    if (is_neg_inf()) return -HUGE_VAL;
    return value_;
  }

  ExtReal operator+(const ExtReal& o) const {
    if (is_pos_inf() || o.is_pos_inf()) {
      if (is_neg_inf() || o.is_neg_inf())
        throw std::logic_error("ExtReal: inf + (-inf) is not defined; handle explicitly");
      return pos_inf();
    }
    if (is_neg_inf() || o.is_neg_inf()) return neg_inf();
    return finite(value_ + o.value_);
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.tag_ != b.tag_) return false;
    return a.tag_ != Tag::Finite || a.value_ == b.value_;
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.is_neg_inf()) return !b.is_neg_inf();
    if (a.is_pos_inf()) return false;
    if (b.is_pos_inf()) return true;
    if (b.is_neg_inf()) return false;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a < b || a == b; }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& e) {
    if (e.is_pos_inf()) return os << "+inf";
    if (e.is_neg_inf()) return os << "-inf";
    return os << e.value_;
  }

 private:
  enum class Tag { Finite, PosInf, NegInf };
  double value_;
  Tag tag_ = Tag::Finite;
};

}  // namespace otdro
