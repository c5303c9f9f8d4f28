#ifndef FID_FUZZY_HPP
#define FID_FUZZY_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fid {

inline constexpr double kTol = 1e-9;

/// Closed interval on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x, double tol = kTol) const {
    return x >= lo - tol && x <= hi + tol;
  }
};

enum class FuzzyKind { Crisp, Type0, Type1, Type2, Type12 };

inline const char* to_string(FuzzyKind k) {
  switch (k) {
    case FuzzyKind::Crisp: return "crisp";
    case FuzzyKind::Type0: return "type0";
    case FuzzyKind::Type1: return "type1";
    case FuzzyKind::Type2: return "type2";
    case FuzzyKind::Type12: return "type12";
  }
  return "?";
}

/// Side specification for FuzzyProbability::make: either a spread magnitude
/// or a boundary membership (the bracketed form, e.g. "[.66]").
struct SideSpec {
  double value = 0.0;
  bool is_boundary = false;
};

inline SideSpec spread(double magnitude) { return {magnitude, false}; }
inline SideSpec boundary(double mu) { return {mu, true}; }

/// A probability with a linear membership function on [0,1]: membership 1 at
/// the mean, falling linearly to 0 at the nominal support endpoints. Nominal
/// endpoints may lie outside [0,1]; clipping to the domain happens at query
/// and serialization time and produces the boundary memberships.
class FuzzyProbability {
 public:
  FuzzyProbability() = default;

  FuzzyProbability(double left_nominal, double mean, double right_nominal) {
    if (!(mean >= -kTol && mean <= 1.0 + kTol))
      throw std::invalid_argument("FuzzyProbability: mean outside [0,1]");
    if (left_nominal < -kTol || right_nominal < -kTol)
      throw std::invalid_argument("FuzzyProbability: negative spread");
    mean_ = std::clamp(mean, 0.0, 1.0);
    left_ = std::max(left_nominal, 0.0);
    right_ = std::max(right_nominal, 0.0);
  }

  static FuzzyProbability crisp(double m) { return FuzzyProbability(0.0, m, 0.0); }

  /// Triplet constructor mirroring the textual form: each side is either a
  /// spread magnitude or a bracketed boundary membership.
  static FuzzyProbability make(SideSpec left, double mean, SideSpec right) {
    if (!(mean >= -kTol && mean <= 1.0 + kTol))
      throw std::invalid_argument("FuzzyProbability::make: mean outside [0,1]");
    mean = std::clamp(mean, 0.0, 1.0);
    double l, r;
    if (left.is_boundary) {
      if (left.value < 0.0 || left.value >= 1.0)
        throw std::invalid_argument("boundary membership must be in [0,1)");
      if (mean <= kTol && left.value < 1.0 - kTol && left.value > kTol)
        throw std::invalid_argument(
            "left boundary membership inconsistent: membership at 0 is 1 when mean is 0");
      l = mean / (1.0 - left.value);
    } else {
      if (left.value < -kTol) throw std::invalid_argument("negative left spread");
      l = std::max(left.value, 0.0);
    }
    if (right.is_boundary) {
      if (right.value < 0.0 || right.value >= 1.0)
        throw std::invalid_argument("boundary membership must be in [0,1)");
      if (mean >= 1.0 - kTol && right.value < 1.0 - kTol && right.value > kTol)
        throw std::invalid_argument(
            "right boundary membership inconsistent: membership at 1 is 1 when mean is 1");
      r = (1.0 - mean) / (1.0 - right.value);
    } else {
      if (right.value < -kTol) throw std::invalid_argument("negative right spread");
      r = std::max(right.value, 0.0);
    }
    return FuzzyProbability(l, mean, r);
  }

  double mean() const { return mean_; }
  double left_nominal() const { return left_; }
  double right_nominal() const { return right_; }

  bool is_crisp() const { return left_ <= kTol && right_ <= kTol; }

  /// Membership of the nominal left line at probability 0 (mu_s); nonzero
  /// only when the nominal support extends below 0.
  double boundary_membership_at_zero() const {
    if (left_ <= mean_ + kTol || left_ <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - mean_ / left_);
  }

  /// Membership of the nominal right line at probability 1 (mu_r).
  double boundary_membership_at_one() const {
    if (right_ <= (1.0 - mean_) + kTol || right_ <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - (1.0 - mean_) / right_);
  }

  FuzzyKind kind() const {
    if (is_crisp()) return FuzzyKind::Crisp;
    const bool at0 = boundary_membership_at_zero() > kTol;
    const bool at1 = boundary_membership_at_one() > kTol;
    if (at0 && at1) return FuzzyKind::Type12;
    if (at0) return FuzzyKind::Type2;
    if (at1) return FuzzyKind::Type1;
    return FuzzyKind::Type0;
  }

  /// Support clipped to the [0,1] domain.
  Interval support() const {
    return {std::max(0.0, mean_ - left_), std::min(1.0, mean_ + right_)};
  }

  /// Unclipped nominal support.
  Interval nominal_support() const { return {mean_ - left_, mean_ + right_}; }

  double membership(double x) const {
    if (x < -1e-12 || x > 1.0 + 1e-12) return 0.0;
    if (std::abs(x - mean_) <= 1e-12) return 1.0;
    if (x < mean_) {
      if (left_ <= 0.0) return 0.0;
      return std::max(0.0, 1.0 - (mean_ - x) / left_);
    }
    if (right_ <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - (x - mean_) / right_);
  }

  /// {x in [0,1] : membership(x) >= alpha}. alpha must be in (0,1].
  Interval alpha_cut(double alpha) const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("alpha_cut: alpha must be in (0,1]");
    return {std::max(0.0, mean_ - (1.0 - alpha) * left_),
            std::min(1.0, mean_ + (1.0 - alpha) * right_)};
  }

  /// 1 - this, with the nominal spreads swapped (type1 <-> type2).
  FuzzyProbability complement() const {
    return FuzzyProbability(right_, 1.0 - mean_, left_);
  }

  bool almost_equal(const FuzzyProbability& o, double tol = kTol) const {
    return std::abs(mean_ - o.mean_) <= tol && std::abs(left_ - o.left_) <= tol &&
           std::abs(right_ - o.right_) <= tol;
  }

 private:
  double mean_ = 0.0;
  double left_ = 0.0;
  double right_ = 0.0;
};

/// A fuzzy quantity on the real line (expected costs, cost differences).
/// Same linear membership shape as FuzzyProbability but no domain clipping.
class FuzzyValue {
 public:
  FuzzyValue() = default;
  FuzzyValue(double left_spread, double mean, double right_spread) {
    if (left_spread < -kTol || right_spread < -kTol)
      throw std::invalid_argument("FuzzyValue: negative spread");
    mean_ = mean;
    left_ = std::max(left_spread, 0.0);
    right_ = std::max(right_spread, 0.0);
  }
  static FuzzyValue crisp(double m) { return FuzzyValue(0.0, m, 0.0); }

  double mean() const { return mean_; }
  double left_spread() const { return left_; }
  double right_spread() const { return right_; }
  bool is_crisp() const { return left_ <= kTol && right_ <= kTol; }

  Interval support() const { return {mean_ - left_, mean_ + right_}; }

  double membership(double x) const {
    if (std::abs(x - mean_) <= 1e-12) return 1.0;
    if (x < mean_) {
      if (left_ <= 0.0) return 0.0;
      return std::max(0.0, 1.0 - (mean_ - x) / left_);
    }
    if (right_ <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - (x - mean_) / right_);
  }

  Interval alpha_cut(double alpha) const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("alpha_cut: alpha must be in (0,1]");
    return {mean_ - (1.0 - alpha) * left_, mean_ + (1.0 - alpha) * right_};
  }

  bool almost_equal(const FuzzyValue& o, double tol = kTol) const {
    return std::abs(mean_ - o.mean_) <= tol && std::abs(left_ - o.left_) <= tol &&
           std::abs(right_ - o.right_) <= tol;
  }

 private:
  double mean_ = 0.0;
  double left_ = 0.0;
  double right_ = 0.0;
};

enum class ArithOp { Add, Sub, Mul, Div };

namespace detail {

struct Tri {
  double mean, lo, hi;  // nominal endpoints, lo <= mean <= hi
};

inline Tri arith(ArithOp op, const Tri& a, const Tri& b) {
  switch (op) {
    case ArithOp::Add:
      return {a.mean + b.mean, a.lo + b.lo, a.hi + b.hi};
    case ArithOp::Sub:
      return {a.mean - b.mean, a.lo - b.hi, a.hi - b.lo};
    case ArithOp::Mul: {
      const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return {a.mean * b.mean, std::min({c[0], c[1], c[2], c[3]}),
              std::max({c[0], c[1], c[2], c[3]})};
    }
    case ArithOp::Div: {
      if (b.lo <= kTol && b.hi >= -kTol)
        throw std::domain_error("fuzzy division: denominator support contains 0");
      const double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
      return {a.mean / b.mean, std::min({c[0], c[1], c[2], c[3]}),
              std::max({c[0], c[1], c[2], c[3]})};
    }
  }
  throw std::logic_error("unreachable");
}

inline Tri tri_of(const FuzzyProbability& f) {
  const Interval s = f.nominal_support();
  return {f.mean(), s.lo, s.hi};
}

inline Tri tri_of(const FuzzyValue& f) {
  const Interval s = f.support();
  return {f.mean(), s.lo, s.hi};
}

}  // namespace detail

/// Fuzzy arithmetic for independent operands. The result mean is the crisp
/// operation on the means; the nominal endpoints are the extremes of the
/// operation over the operands' nominal supports, re-linearized one line per
/// side through (mean, 1) and the endpoint at membership 0.
inline FuzzyProbability binary_arith(ArithOp op, const FuzzyProbability& a,
                                     const FuzzyProbability& b) {
  const detail::Tri r = detail::arith(op, detail::tri_of(a), detail::tri_of(b));
  if (r.mean < -kTol || r.mean > 1.0 + kTol)
    throw std::domain_error("binary_arith: result mean outside [0,1]");
  return FuzzyProbability(r.mean - r.lo, std::clamp(r.mean, 0.0, 1.0), r.hi - r.mean);
}

inline FuzzyValue binary_arith(ArithOp op, const FuzzyValue& a, const FuzzyValue& b) {
  const detail::Tri r = detail::arith(op, detail::tri_of(a), detail::tri_of(b));
  return FuzzyValue(r.mean - r.lo, r.mean, r.hi - r.mean);
}

inline FuzzyProbability fuzzy_add(const FuzzyProbability& a, const FuzzyProbability& b) {
  return binary_arith(ArithOp::Add, a, b);
}
inline FuzzyProbability fuzzy_sub(const FuzzyProbability& a, const FuzzyProbability& b) {
  return binary_arith(ArithOp::Sub, a, b);
}
inline FuzzyProbability fuzzy_mul(const FuzzyProbability& a, const FuzzyProbability& b) {
  return binary_arith(ArithOp::Mul, a, b);
}
inline FuzzyProbability fuzzy_div(const FuzzyProbability& a, const FuzzyProbability& b) {
  return binary_arith(ArithOp::Div, a, b);
}

// ---------------------------------------------------------------------------
// Display triplet codec.
//
// Grammar: FUZZY := '(' SIDE ',' NUMBER ',' SIDE ')' | NUMBER
//          SIDE  := NUMBER | '[' NUMBER ']'
// Whitespace-insensitive; numbers are decimal with optional leading dot.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", x);
  std::string s(buf);
  // trim trailing zeros, keep at least one digit after the point
  const auto dot = s.find('.');
  auto last = s.find_last_not_of('0');
  if (last == dot) last++;
  s.erase(last + 1);
  return s;
}

struct TripletParser {
  std::string_view in;
  size_t pos = 0;

  void skip_ws() {
    while (pos < in.size() && std::isspace(static_cast<unsigned char>(in[pos]))) pos++;
  }
  bool eof() {
    skip_ws();
    return pos >= in.size();
  }
  char peek() {
    skip_ws();
    return pos < in.size() ? in[pos] : '\0';
  }
  void expect(char c) {
    if (peek() != c)
      throw std::invalid_argument("triplet parse error at position " +
                                  std::to_string(pos) + ": expected '" + c + "'");
    pos++;
  }
  double number() {
    skip_ws();
    size_t start = pos;
    if (pos < in.size() && (in[pos] == '+' || in[pos] == '-')) pos++;
    bool digits = false;
    while (pos < in.size() && std::isdigit(static_cast<unsigned char>(in[pos]))) {
      pos++;
      digits = true;
    }
    if (pos < in.size() && in[pos] == '.') {
      pos++;
      while (pos < in.size() && std::isdigit(static_cast<unsigned char>(in[pos]))) {
        pos++;
        digits = true;
      }
    }
    if (!digits)
      throw std::invalid_argument("triplet parse error at position " +
                                  std::to_string(start) + ": expected a number");
    return std::stod(std::string(in.substr(start, pos - start)));
  }
  SideSpec side() {
    if (peek() == '[') {
      pos++;
      double mu = number();
      expect(']');
      return boundary(mu);
    }
    return spread(number());
  }
};

}  // namespace detail

inline std::string to_display(const FuzzyProbability& f) {
  if (f.is_crisp()) return detail::format_number(f.mean());
  std::string l, r;
  const double mu_s = f.boundary_membership_at_zero();
  const double mu_r = f.boundary_membership_at_one();
  if (mu_s > kTol)
    l = "[" + detail::format_number(mu_s) + "]";
  else
    l = detail::format_number(f.left_nominal());
  if (mu_r > kTol)
    r = "[" + detail::format_number(mu_r) + "]";
  else
    r = detail::format_number(f.right_nominal());
  return "(" + l + ", " + detail::format_number(f.mean()) + ", " + r + ")";
}

inline std::string to_display(const FuzzyValue& f) {
  if (f.is_crisp()) return detail::format_number(f.mean());
  return "(" + detail::format_number(f.left_spread()) + ", " +
         detail::format_number(f.mean()) + ", " + detail::format_number(f.right_spread()) +
         ")";
}

inline FuzzyProbability parse_probability(std::string_view text) {
  detail::TripletParser p{text};
  if (p.peek() != '(') {
    double m = p.number();
    if (!p.eof()) throw std::invalid_argument("triplet parse error: trailing input");
    return FuzzyProbability::crisp(m);
  }
  p.pos++;
  SideSpec l = p.side();
  p.expect(',');
  double mean = p.number();
  p.expect(',');
  SideSpec r = p.side();
  p.expect(')');
  if (!p.eof()) throw std::invalid_argument("triplet parse error: trailing input");
  return FuzzyProbability::make(l, mean, r);
}

inline FuzzyValue parse_fuzzy_value(std::string_view text) {
  detail::TripletParser p{text};
  if (p.peek() != '(') {
    double m = p.number();
    if (!p.eof()) throw std::invalid_argument("triplet parse error: trailing input");
    return FuzzyValue::crisp(m);
  }
  p.pos++;
  SideSpec l = p.side();
  p.expect(',');
  double mean = p.number();
  p.expect(',');
  SideSpec r = p.side();
  p.expect(')');
  if (!p.eof()) throw std::invalid_argument("triplet parse error: trailing input");
  if (l.is_boundary || r.is_boundary)
    throw std::invalid_argument("fuzzy values have no boundary-membership form");
  return FuzzyValue(l.value, mean, r.value);
}

}  // namespace fid

#endif  // FID_FUZZY_HPP
