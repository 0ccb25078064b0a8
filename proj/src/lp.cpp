#include "nscon/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nscon/errors.hpp"

namespace nscon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-11;

// Standard-form tableau: min c.y with A y = b, y >= 0, b >= 0.
// Columns: shifted variables, slack/surplus, upper-bound slacks, artificials.
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(rows, cols), b_(rows, 0.0) {}

  Mat a_m() { return a_; }
  double& a(int i, int j) { return a_(i, j); }
  double& b(int i) { return b_[i]; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  // Bland's rule simplex on the current basis. cost has size n_.
  // Returns false if unbounded.
  bool run(const Vec& cost, std::vector<int>& basis, int max_iter = 200000) {
    Vec dual(m_);
    for (int iter = 0; iter < max_iter; ++iter) {
      // reduced costs via basis cost propagation: z_j = c_j - c_B . B^-1 A_j
      // The tableau is kept in basis-reduced form, so reduced cost is direct.
      int entering = -1;
      for (int j = 0; j < n_; ++j) {
        double rc = cost[j];
        for (int i = 0; i < m_; ++i) rc -= cost[basis[i]] * a_(i, j);
        if (rc < -1e-10) {
          entering = j;
          break;  // Bland: first improving index
        }
      }
      if (entering < 0) return true;  // optimal

      int leaving = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        if (a_(i, entering) > kPivotEps) {
          const double ratio = b_[i] / a_(i, entering);
          if (ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 &&
               (leaving < 0 || basis[i] < basis[leaving]))) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded

      pivot(leaving, entering);
      basis[leaving] = entering;
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

  void pivot(int row, int col) {
    const double p = a_(row, col);
    for (int j = 0; j < n_; ++j) a_(row, j) /= p;
    b_[row] /= p;
    a_(row, col) = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = a_(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n_; ++j) a_(i, j) -= f * a_(row, j);
      b_[i] -= f * b_[row];
      a_(i, col) = 0.0;
    }
  }

  double objective(const Vec& cost, const std::vector<int>& basis) const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += cost[basis[i]] * b_[i];
    return v;
  }

  Vec basic_solution(const std::vector<int>& basis, int nreal) const {
    Vec y(n_, 0.0);
    for (int i = 0; i < m_; ++i) y[basis[i]] = b_[i];
    y.resize(nreal);
    return y;
  }

 private:
  int m_, n_;
  Mat a_;
  Vec b_;
};

struct Standardized {
  Tableau tab;
  std::vector<int> basis;
  int nreal;            // shifted original variables
  Vec shift;            // x = y + shift
  int num_artificial;
  int art_begin;
};

Standardized standardize(const LpProblem& p) {
  // rows: one per constraint plus one per finite upper bound
  int upper_rows = 0;
  for (int i = 0; i < p.nvars; ++i)
    if (std::isfinite(p.upper[i])) ++upper_rows;
  const int m = static_cast<int>(p.constraints.size()) + upper_rows;

  int slack_cols = 0;
  for (const auto& c : p.constraints)
    if (c.rel != Rel::Eq) ++slack_cols;
  slack_cols += upper_rows;

  const int nreal = p.nvars;
  const int art_begin = nreal + slack_cols;
  const int ncols = art_begin + m;

  Tableau tab(m, ncols);
  std::vector<int> basis(m);
  Vec shift(p.lower);

  int row = 0, slack = nreal;
  auto fill_row = [&](const Vec& coef, Rel rel, double rhs_shifted) {
    double rhs = rhs_shifted;
    double sgn = 1.0;
    if (rhs < 0.0) sgn = -1.0;
    for (int j = 0; j < nreal; ++j) tab.a(row, j) = sgn * (j < (int)coef.size() ? coef[j] : 0.0);
    if (rel == Rel::Le) tab.a(row, slack) = sgn * 1.0;
    if (rel == Rel::Ge) tab.a(row, slack) = sgn * -1.0;
    if (rel != Rel::Eq) ++slack;
    tab.b(row) = sgn * rhs;
    tab.a(row, art_begin + row) = 1.0;
    basis[row] = art_begin + row;
    ++row;
  };

  for (const auto& c : p.constraints) {
    double rhs = c.rhs;
    for (int j = 0; j < nreal && j < (int)c.coef.size(); ++j) rhs -= c.coef[j] * shift[j];
    fill_row(c.coef, c.rel, rhs);
  }
  for (int i = 0; i < p.nvars; ++i) {
    if (!std::isfinite(p.upper[i])) continue;
    Vec coef(p.nvars, 0.0);
    coef[i] = 1.0;
    fill_row(coef, Rel::Le, p.upper[i] - shift[i]);
  }

  return {std::move(tab), std::move(basis), nreal, std::move(shift), m, art_begin};
}

std::optional<Vec> phase_one(Standardized& s, double tol) {
  Vec cost(s.tab.cols(), 0.0);
  for (int j = s.art_begin; j < s.tab.cols(); ++j) cost[j] = 1.0;
  if (!s.tab.run(cost, s.basis)) return std::nullopt;  // cannot happen: bounded below by 0
  const double infeas = s.tab.objective(cost, s.basis);
  if (infeas > tol) return std::nullopt;
  return s.tab.basic_solution(s.basis, s.nreal);
}

}  // namespace

std::optional<Vec> lp_find_feasible(const LpProblem& p, double tol) {
  Standardized s = standardize(p);
  auto y = phase_one(s, tol);
  if (!y) return std::nullopt;
  Vec x(p.nvars);
  for (int i = 0; i < p.nvars; ++i) x[i] = (*y)[i] + s.shift[i];
  return x;
}

std::optional<LpSolution> lp_minimize(const LpProblem& p, const Vec& obj, double tol) {
  Standardized s = standardize(p);
  if (!phase_one(s, tol)) return std::nullopt;

  // Phase two: penalize artificials so they stay out of the basis.
  Vec cost(s.tab.cols(), 0.0);
  for (int j = 0; j < p.nvars && j < (int)obj.size(); ++j) cost[j] = obj[j];
  double big = 1.0;
  for (double c : obj) big += std::abs(c);
  for (int j = s.art_begin; j < s.tab.cols(); ++j) cost[j] = 1e6 * big;

  if (!s.tab.run(cost, s.basis))
    throw std::runtime_error("objective unbounded on feasible set");

  const Vec y = s.tab.basic_solution(s.basis, s.nreal);
  LpSolution sol;
  sol.x.resize(p.nvars);
  for (int i = 0; i < p.nvars; ++i) sol.x[i] = y[i] + s.shift[i];
  sol.objective = 0.0;
  for (int i = 0; i < p.nvars && i < (int)obj.size(); ++i)
    sol.objective += obj[i] * sol.x[i];
  return sol;
}

std::optional<Vec> lp_feasible(const std::vector<LpConstraint>& constraints, const Vec& lower,
                               const Vec& upper, double tol) {
  if (lower.size() != upper.size()) throw ConfigError("bound vectors differ in size");
  if (lower.size() > 32) throw ConfigError("feasibility probe limited to 32 dimensions");
  LpProblem p(static_cast<int>(lower.size()));
  p.lower = lower;
  p.upper = upper;
  p.constraints = constraints;
  return lp_find_feasible(p, tol);
}

}  // namespace nscon
