#pragma once

#include <utility>
#include <vector>

#include "nscon/linalg.hpp"

namespace nscon {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool is_singleton(double tol = 0.0) const { return hi - lo <= tol; }
  bool contains(double y, double tol = 0.0) const { return y >= lo - tol && y <= hi + tol; }
};

/// One closed-form primitive, valid on an open interval between breakpoints.
/// The set {constant, affine, saturation, scaled power} has exact one-sided
/// limits, monotonicity, extrema and antiderivatives, which is all the
/// analysis below needs.
struct Segment {
  enum class Kind { Constant, Affine, Saturation, Power };
  Kind kind = Kind::Constant;
  double a = 0.0;   // affine: a*y + b
  double b = 0.0;   // affine offset; constant value
  double lo = 0.0;  // saturation: clamp(y, lo, hi)
  double hi = 0.0;
  double c = 0.0;   // power: sign(y) * c * |y|^p, p > 0
  double p = 1.0;

  static Segment constant(double value);
  static Segment affine(double slope, double offset);
  static Segment saturation(double lo, double hi);
  static Segment power(double gain, double exponent);

  double eval(double y) const;        // also the one-sided limit (continuous)
  double derivative(double y) const;  // derivative away from clamp corners
  double antiderivative(double y) const;  // primitive with value 0 at y = 0
  bool nondecreasing() const;
  double max_abs_on(double left, double right) const;  // finite endpoints

  bool operator==(const Segment& other) const = default;
};

/// Scalar predicates that gate the consensus results.
struct FnPredicates {
  bool sign_preserving = false;
  bool continuous_at_origin = false;      // both one-sided limits exist and are 0
  bool symmetric_jump_at_origin = false;  // f(0-) == -f(0+)
  bool nondecreasing = false;
  double left_limit_0 = 0.0;
  double right_limit_0 = 0.0;
};

/// Piecewise scalar function: strictly increasing breakpoints, one segment
/// per open interval (tails included), and an explicit value at each
/// breakpoint. Locally essentially bounded by construction.
class PiecewiseScalarFn {
 public:
  /// segments.size() must equal breakpoints.size() + 1,
  /// point_values.size() must equal breakpoints.size().
  PiecewiseScalarFn(std::vector<double> breakpoints, std::vector<Segment> segments,
                    std::vector<double> point_values);

  // Presets covering everything that appears in practice.
  static PiecewiseScalarFn sign(double scale = 1.0);
  static PiecewiseScalarFn sat(double lo = -1.0, double hi = 1.0);
  static PiecewiseScalarFn identity(double slope = 1.0);
  static PiecewiseScalarFn deadzone(double halfwidth, double slope = 1.0);
  /// Finite logarithmic quantizer: constant levels gain*ratio^j on
  /// (ratio^{j+1}, ratio^j], saturating at gain outside (-1, 1), with an
  /// affine core so the function is continuous at the origin.
  static PiecewiseScalarFn log_quantizer(double gain = 1.0, double ratio = 0.5,
                                         int levels = 3);
  /// Two-constant jump: value neg for y < 0, pos for y > 0, 0 at 0.
  static PiecewiseScalarFn jump(double neg, double pos);

  double eval(double y) const;
  std::pair<double, double> one_sided_limits(double y) const;  // (left, right)

  /// Convex closure of the nearby values: [min(L,R), max(L,R)] when y is
  /// within snap_tol of a breakpoint, otherwise the singleton {eval(y)}.
  /// Point values never contribute (they live on a measure-zero set).
  Interval scalar_filippov(double y, double snap_tol = 1e-9) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& point_values() const { return point_values_; }

  /// Index of the breakpoint within snap_tol of y, or -1.
  int breakpoint_near(double y, double snap_tol = 1e-9) const;
  /// Jump magnitude |right - left| at breakpoint k.
  double jump_at(int k) const;
  bool continuous_everywhere() const;  // no jump at any breakpoint
  bool is_identity() const;            // exactly y -> y

  /// Derivative at a point interior to a segment.
  double derivative(double y) const;
  /// F(y) = integral of f from 0 to y, segment-exact.
  double integral_from_zero(double y) const;
  /// max |f| over [-radius, radius], including point values.
  double sup_abs_on(double radius) const;

  bool operator==(const PiecewiseScalarFn& other) const = default;

 private:
  int segment_index(double y) const;  // segment whose open interval holds y

  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  std::vector<double> point_values_;
};

/// Returns f scaled by lambda (breakpoints unchanged, values scaled).
PiecewiseScalarFn scale_fn(const PiecewiseScalarFn& f, double lambda);

/// Returns the reflection y -> -f(-y) (used for antisymmetric edge pairs).
PiecewiseScalarFn antisymmetric_partner(const PiecewiseScalarFn& f);

/// Verifies sign preservation on a finite grid (segment midpoints, tail
/// probes, geometric approaches to 0 and to every breakpoint) plus the exact
/// jump intervals at breakpoints; the remaining flags are segment-analytic.
FnPredicates check_predicates(const PiecewiseScalarFn& f);

}  // namespace nscon
