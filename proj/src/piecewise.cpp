#include "nscon/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nscon/errors.hpp"

namespace nscon {

Segment Segment::constant(double value) {
  Segment s;
  s.kind = Kind::Constant;
  s.b = value;
  return s;
}

Segment Segment::affine(double slope, double offset) {
  Segment s;
  s.kind = Kind::Affine;
  s.a = slope;
  s.b = offset;
  return s;
}

Segment Segment::saturation(double lo, double hi) {
  if (lo > hi) throw ConfigError("saturation needs lo <= hi");
  Segment s;
  s.kind = Kind::Saturation;
  s.lo = lo;
  s.hi = hi;
  return s;
}

Segment Segment::power(double gain, double exponent) {
  if (exponent <= 0.0) throw ConfigError("power segment needs exponent > 0");
  Segment s;
  s.kind = Kind::Power;
  s.c = gain;
  s.p = exponent;
  return s;
}

double Segment::eval(double y) const {
  switch (kind) {
    case Kind::Constant:
      return b;
    case Kind::Affine:
      return a * y + b;
    case Kind::Saturation:
      return std::clamp(y, lo, hi);
    case Kind::Power:
      return (y >= 0 ? 1.0 : -1.0) * c * std::pow(std::abs(y), p);
  }
  return 0.0;
}

double Segment::derivative(double y) const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Affine:
      return a;
    case Kind::Saturation:
      return (y > lo && y < hi) ? 1.0 : 0.0;
    case Kind::Power:
      if (y == 0.0)
        return p > 1.0 ? 0.0 : (p == 1.0 ? c : std::numeric_limits<double>::infinity());
      return c * p * std::pow(std::abs(y), p - 1.0);
  }
  return 0.0;
}

double Segment::antiderivative(double y) const {
  switch (kind) {
    case Kind::Constant:
      return b * y;
    case Kind::Affine:
      return 0.5 * a * y * y + b * y;
    case Kind::Saturation:
      // continuous antiderivative of clamp(s, lo, hi)
      if (y <= lo) return lo * y - 0.5 * lo * lo;
      if (y >= hi) return hi * y - 0.5 * hi * hi;
      return 0.5 * y * y;
    case Kind::Power:
      return c * std::pow(std::abs(y), p + 1.0) / (p + 1.0);
  }
  return 0.0;
}

bool Segment::nondecreasing() const {
  switch (kind) {
    case Kind::Constant:
      return true;
    case Kind::Affine:
      return a >= 0.0;
    case Kind::Saturation:
      return true;
    case Kind::Power:
      return c >= 0.0;
  }
  return false;
}

double Segment::max_abs_on(double left, double right) const {
  // every primitive is monotone, extremes sit at the endpoints
  return std::max(std::abs(eval(left)), std::abs(eval(right)));
}

PiecewiseScalarFn::PiecewiseScalarFn(std::vector<double> breakpoints,
                                     std::vector<Segment> segments,
                                     std::vector<double> point_values)
    : breakpoints_(std::move(breakpoints)),
      segments_(std::move(segments)),
      point_values_(std::move(point_values)) {
  if (segments_.size() != breakpoints_.size() + 1)
    throw ConfigError("need one segment per open interval (breakpoints + 1)");
  if (point_values_.size() != breakpoints_.size())
    throw ConfigError("need one point value per breakpoint");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1]))
      throw ConfigError("breakpoints must be strictly increasing");
    if (breakpoints_[k] - breakpoints_[k - 1] <= 2e-9)
      throw ConfigError("breakpoints closer than 2e-9 are not representable");
  }
}

PiecewiseScalarFn PiecewiseScalarFn::sign(double scale) {
  return PiecewiseScalarFn({0.0}, {Segment::constant(-scale), Segment::constant(scale)},
                           {0.0});
}

PiecewiseScalarFn PiecewiseScalarFn::sat(double lo, double hi) {
  return PiecewiseScalarFn({}, {Segment::saturation(lo, hi)}, {});
}

PiecewiseScalarFn PiecewiseScalarFn::identity(double slope) {
  return PiecewiseScalarFn({}, {Segment::affine(slope, 0.0)}, {});
}

PiecewiseScalarFn PiecewiseScalarFn::deadzone(double halfwidth, double slope) {
  if (halfwidth <= 0.0) throw ConfigError("deadzone needs halfwidth > 0");
  return PiecewiseScalarFn(
      {-halfwidth, halfwidth},
      {Segment::affine(slope, slope * halfwidth), Segment::constant(0.0),
       Segment::affine(slope, -slope * halfwidth)},
      {0.0, 0.0});
}

PiecewiseScalarFn PiecewiseScalarFn::log_quantizer(double gain, double ratio, int levels) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("quantizer ratio must be in (0,1)");
  if (levels < 1) throw ConfigError("quantizer needs at least one level");
  if (gain <= 0.0) throw ConfigError("quantizer gain must be positive");

  std::vector<double> pow_j(levels);  // ratio^j
  for (int j = 0; j < levels; ++j) pow_j[j] = std::pow(ratio, j);

  std::vector<double> bps;
  for (int j = 0; j < levels; ++j) bps.push_back(-pow_j[j]);           // -1 < -r < ...
  for (int j = levels - 1; j >= 0; --j) bps.push_back(pow_j[j]);       // ... < r < 1

  std::vector<Segment> segs;
  segs.push_back(Segment::constant(-gain));
  for (int j = 1; j < levels; ++j) segs.push_back(Segment::constant(-gain * pow_j[j]));
  segs.push_back(Segment::affine(gain, 0.0));  // core, continuous at ±ratio^{levels-1}
  for (int j = levels - 1; j >= 1; --j) segs.push_back(Segment::constant(gain * pow_j[j]));
  segs.push_back(Segment::constant(gain));

  std::vector<double> pvs;
  for (std::size_t k = 0; k < bps.size(); ++k)
    pvs.push_back(0.5 * (segs[k].eval(bps[k]) + segs[k + 1].eval(bps[k])));
  return PiecewiseScalarFn(std::move(bps), std::move(segs), std::move(pvs));
}

PiecewiseScalarFn PiecewiseScalarFn::jump(double neg, double pos) {
  return PiecewiseScalarFn({0.0}, {Segment::constant(neg), Segment::constant(pos)}, {0.0});
}

int PiecewiseScalarFn::segment_index(double y) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  return static_cast<int>(it - breakpoints_.begin());
}

double PiecewiseScalarFn::eval(double y) const {
  for (std::size_t k = 0; k < breakpoints_.size(); ++k)
    if (y == breakpoints_[k]) return point_values_[k];
  return segments_[segment_index(y)].eval(y);
}

std::pair<double, double> PiecewiseScalarFn::one_sided_limits(double y) const {
  for (std::size_t k = 0; k < breakpoints_.size(); ++k)
    if (y == breakpoints_[k]) return {segments_[k].eval(y), segments_[k + 1].eval(y)};
  const double v = segments_[segment_index(y)].eval(y);
  return {v, v};
}

int PiecewiseScalarFn::breakpoint_near(double y, double snap_tol) const {
  int best = -1;
  double best_dist = snap_tol;
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    const double d = std::abs(y - breakpoints_[k]);
    if (d <= best_dist) {
      best_dist = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double PiecewiseScalarFn::jump_at(int k) const {
  const double b = breakpoints_[k];
  return std::abs(segments_[k + 1].eval(b) - segments_[k].eval(b));
}

bool PiecewiseScalarFn::continuous_everywhere() const {
  for (std::size_t k = 0; k < breakpoints_.size(); ++k)
    if (jump_at(static_cast<int>(k)) != 0.0) return false;
  return true;
}

bool PiecewiseScalarFn::is_identity() const {
  return breakpoints_.empty() && segments_.size() == 1 &&
         segments_[0].kind == Segment::Kind::Affine && segments_[0].a == 1.0 &&
         segments_[0].b == 0.0;
}

Interval PiecewiseScalarFn::scalar_filippov(double y, double snap_tol) const {
  const int k = breakpoint_near(y, snap_tol);
  if (k < 0) {
    const double v = segments_[segment_index(y)].eval(y);
    return {v, v};
  }
  const double b = breakpoints_[k];
  const double left = segments_[k].eval(b);
  const double right = segments_[k + 1].eval(b);
  return {std::min(left, right), std::max(left, right)};
}

double PiecewiseScalarFn::derivative(double y) const {
  return segments_[segment_index(y)].derivative(y);
}

double PiecewiseScalarFn::integral_from_zero(double y) const {
  if (y == 0.0) return 0.0;
  const double a = std::min(0.0, y), b = std::max(0.0, y);

  std::vector<double> cuts{a};
  for (double bp : breakpoints_)
    if (bp > a && bp < b) cuts.push_back(bp);
  cuts.push_back(b);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1];
    const Segment& s = segments_[segment_index(0.5 * (l + r))];
    total += s.antiderivative(r) - s.antiderivative(l);
  }
  return (y >= 0.0 ? 1.0 : -1.0) * total;
}

double PiecewiseScalarFn::sup_abs_on(double radius) const {
  double best = 0.0;
  std::vector<double> probes{-radius, radius, 0.0};
  for (double b : breakpoints_)
    if (std::abs(b) <= radius) probes.push_back(b);
  for (double y : probes) {
    const auto [l, r] = one_sided_limits(y);
    best = std::max({best, std::abs(l), std::abs(r), std::abs(eval(y))});
  }
  return best;
}

PiecewiseScalarFn scale_fn(const PiecewiseScalarFn& f, double lambda) {
  std::vector<Segment> segs;
  for (Segment s : f.segments()) {
    switch (s.kind) {
      case Segment::Kind::Constant:
        s.b *= lambda;
        break;
      case Segment::Kind::Affine:
        s.a *= lambda;
        s.b *= lambda;
        break;
      case Segment::Kind::Saturation:
        if (lambda != 1.0)
          throw ConfigError("scaling a saturation segment is not closed under the primitive set");
        break;
      case Segment::Kind::Power:
        s.c *= lambda;
        break;
    }
    segs.push_back(s);
  }
  std::vector<double> pvs = f.point_values();
  for (double& v : pvs) v *= lambda;
  return PiecewiseScalarFn(f.breakpoints(), std::move(segs), std::move(pvs));
}

PiecewiseScalarFn antisymmetric_partner(const PiecewiseScalarFn& f) {
  const auto& bps = f.breakpoints();
  const auto& segs = f.segments();
  const auto& pvs = f.point_values();
  const std::size_t m = bps.size();

  std::vector<double> new_bps(m);
  std::vector<double> new_pvs(m);
  for (std::size_t k = 0; k < m; ++k) {
    new_bps[k] = -bps[m - 1 - k];
    new_pvs[k] = -pvs[m - 1 - k];
  }
  std::vector<Segment> new_segs(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    Segment s = segs[m - k];  // the segment living on the mirrored interval
    switch (s.kind) {
      case Segment::Kind::Constant:
        s.b = -s.b;
        break;
      case Segment::Kind::Affine:
        s.b = -s.b;  // -(a*(-y) + b) = a*y - b
        break;
      case Segment::Kind::Saturation: {
        const double lo = -s.hi, hi = -s.lo;  // -clamp(-y, lo, hi) = clamp(y, -hi, -lo)
        s.lo = lo;
        s.hi = hi;
        break;
      }
      case Segment::Kind::Power:
        break;  // odd already
    }
    new_segs[k] = s;
  }
  return PiecewiseScalarFn(std::move(new_bps), std::move(new_segs), std::move(new_pvs));
}

FnPredicates check_predicates(const PiecewiseScalarFn& f) {
  FnPredicates out;
  const auto [l0, r0] = f.one_sided_limits(0.0);
  out.left_limit_0 = l0;
  out.right_limit_0 = r0;
  out.continuous_at_origin = (l0 == 0.0 && r0 == 0.0);
  out.symmetric_jump_at_origin = (l0 == -r0);

  out.nondecreasing = true;
  for (const Segment& s : f.segments())
    if (!s.nondecreasing()) out.nondecreasing = false;
  for (std::size_t k = 0; k < f.breakpoints().size(); ++k) {
    const auto [l, r] = f.one_sided_limits(f.breakpoints()[k]);
    const double pv = f.point_values()[k];
    if (!(l <= pv && pv <= r)) out.nondecreasing = false;
  }

  // Sign preservation is a verification, not a proof: f(0) == 0, y*f(y) > 0
  // on the grid below, and at every nonzero breakpoint the whole jump
  // interval lies strictly on the sign-correct side.
  out.sign_preserving = (f.eval(0.0) == 0.0);

  const auto& bps = f.breakpoints();
  std::vector<double> grid;
  auto push_near = [&grid](double center) {
    for (int k = 1; k <= 9; ++k) {
      const double off = std::pow(10.0, -k);
      grid.push_back(center + off);
      grid.push_back(center - off);
    }
  };
  push_near(0.0);
  for (double b : bps) push_near(b);
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) grid.push_back(0.5 * (bps[k] + bps[k + 1]));
  const double left_tail = bps.empty() ? 0.0 : bps.front();
  const double right_tail = bps.empty() ? 0.0 : bps.back();
  for (double off : {1.0, 2.0, 5.0}) {
    grid.push_back(right_tail + off);
    grid.push_back(left_tail - off);
  }

  for (double y : grid) {
    if (!out.sign_preserving) break;
    if (y == 0.0) continue;
    if (std::find(bps.begin(), bps.end(), y) != bps.end()) continue;
    if (!(y * f.eval(y) > 0.0)) out.sign_preserving = false;
  }

  if (out.sign_preserving) {
    for (std::size_t k = 0; k < bps.size(); ++k) {
      const double b = bps[k];
      if (b == 0.0) continue;
      const Interval iv = f.scalar_filippov(b, 0.0);
      if (!(std::min(b * iv.lo, b * iv.hi) > 0.0)) {
        out.sign_preserving = false;
        break;
      }
    }
  }
  return out;
}

}  // namespace nscon
