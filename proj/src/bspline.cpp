#include "klexpand/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "klexpand/error.hpp"

namespace klexpand {

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw ParameterError("KnotVector: negative degree");
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < 2 * (p + 1)) {
    throw ParameterError("KnotVector: need at least 2(p+1) knots");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw ParameterError("KnotVector: knots must be non-decreasing");
  }
  if (knots_.front() != 0.0 || knots_.back() != 1.0) {
    throw ParameterError("KnotVector: knots must span exactly [0, 1]");
  }
  const auto mult = multiplicities();
  if (mult.front() != degree_ + 1 || mult.back() != degree_ + 1) {
    throw ParameterError("KnotVector: end knots must repeat exactly p+1 times");
  }
  for (int m : mult) {
    if (m > degree_ + 1) throw ParameterError("KnotVector: knot multiplicity exceeds p+1");
  }
}

KnotVector KnotVector::uniform(int degree, int elements, int continuity) {
  if (elements < 1) throw ParameterError("KnotVector::uniform: need at least one element");
  if (continuity < -1 || continuity > degree - 1) {
    if (!(degree == 0 && continuity == -1)) {
      throw ParameterError("KnotVector::uniform: continuity must lie in [-1, p-1]");
    }
  }
  std::vector<double> breaks(static_cast<std::size_t>(elements) + 1);
  for (int e = 0; e <= elements; ++e) breaks[static_cast<std::size_t>(e)] = double(e) / elements;
  breaks.back() = 1.0;
  std::vector<int> mult(static_cast<std::size_t>(elements - 1), degree - continuity);
  return from_breaks(degree, breaks, mult);
}

KnotVector KnotVector::from_breaks(int degree, std::span<const double> breaks,
                                   std::span<const int> interior_multiplicity) {
  if (breaks.size() < 2 || interior_multiplicity.size() != breaks.size() - 2) {
    throw ParameterError("KnotVector::from_breaks: inconsistent breakpoint data");
  }
  std::vector<double> knots;
  knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, breaks.front());
  for (std::size_t i = 1; i + 1 < breaks.size(); ++i) {
    const int m = interior_multiplicity[i - 1];
    if (m < 1) throw ParameterError("KnotVector::from_breaks: multiplicity must be positive");
    knots.insert(knots.end(), static_cast<std::size_t>(m), breaks[i]);
  }
  knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, breaks.back());
  return KnotVector(std::move(knots), degree);
}

std::vector<double> KnotVector::breaks() const {
  std::vector<double> b;
  for (double t : knots_) {
    if (b.empty() || t != b.back()) b.push_back(t);
  }
  return b;
}

std::vector<int> KnotVector::multiplicities() const {
  std::vector<int> m;
  double last = -1.0;
  for (double t : knots_) {
    if (m.empty() || t != last) {
      m.push_back(1);
      last = t;
    } else {
      ++m.back();
    }
  }
  return m;
}

int KnotVector::find_span(double x, Side side) const {
  const int n = size();
  const auto it = side == Side::right ? std::upper_bound(knots_.begin(), knots_.end(), x)
                                      : std::lower_bound(knots_.begin(), knots_.end(), x);
  const int mu = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(mu, degree_, n - 1);
}

namespace {

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("basis evaluation point " + std::to_string(x) + " outside [0, 1]");
  }
}

// Non-zero functions of the given degree on span mu (NURBS Book A2.2).
void basis_funs(const std::vector<double>& t, int mu, double x, int degree, double* out) {
  std::vector<double> left(static_cast<std::size_t>(degree) + 1);
  std::vector<double> right(static_cast<std::size_t>(degree) + 1);
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[static_cast<std::size_t>(j)] = x - t[static_cast<std::size_t>(mu + 1 - j)];
    right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(mu + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const double temp = out[r] / denom;
      out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out[j] = saved;
  }
}

}  // namespace

BasisValues eval_basis(const KnotVector& kv, double x, Side side) {
  check_unit(x);
  const int p = kv.degree();
  const int mu = kv.find_span(x, side);
  BasisValues out;
  out.first = mu - p;
  out.values.resize(static_cast<std::size_t>(p) + 1);
  basis_funs(kv.knots(), mu, x, p, out.values.data());
  return out;
}

BasisDerivatives eval_basis_derivatives(const KnotVector& kv, double x, Side side) {
  check_unit(x);
  const int p = kv.degree();
  const int mu = kv.find_span(x, side);
  const auto& t = kv.knots();
  BasisDerivatives out;
  out.first = mu - p;
  out.values.resize(static_cast<std::size_t>(p) + 1);
  out.derivatives.assign(static_cast<std::size_t>(p) + 1, 0.0);
  basis_funs(t, mu, x, p, out.values.data());
  if (p == 0) return out;
  // Degree p-1 functions on the same span: indices mu-p+1 .. mu.
  std::vector<double> lower(static_cast<std::size_t>(p));
  basis_funs(t, mu, x, p - 1, lower.data());
  for (int k = 0; k <= p; ++k) {
    const int i = mu - p + k;
    double d = 0.0;
    if (k >= 1) {
      const double denom = t[static_cast<std::size_t>(i + p)] - t[static_cast<std::size_t>(i)];
      if (denom > 0.0) d += lower[static_cast<std::size_t>(k - 1)] / denom;
    }
    if (k <= p - 1) {
      const double denom = t[static_cast<std::size_t>(i + p + 1)] - t[static_cast<std::size_t>(i + 1)];
      if (denom > 0.0) d -= lower[static_cast<std::size_t>(k)] / denom;
    }
    out.derivatives[static_cast<std::size_t>(k)] = p * d;
  }
  return out;
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
  const int n = kv.size();
  const int p = kv.degree();
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (p == 0) {
      g[static_cast<std::size_t>(i)] = 0.5 * (kv[i] + kv[i + 1]);
      continue;
    }
    double s = 0.0;
    for (int k = 1; k <= p; ++k) s += kv[i + k];
    // Rounding can push the average of equal knots off the knot itself.
    g[static_cast<std::size_t>(i)] = std::clamp(s / p, kv[i + 1], kv[i + p]);
  }
  return g;
}

Side support_side(const KnotVector& kv, int index, double x) {
  return (x > 0.0 && x >= kv[index + kv.degree() + 1]) ? Side::left : Side::right;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

ElementQuadrature element_quadrature(const KnotVector& kv, int points_per_element) {
  const auto rule = gauss_legendre(points_per_element);
  const auto br = kv.breaks();
  ElementQuadrature q;
  q.points_per_element = points_per_element;
  for (std::size_t e = 0; e + 1 < br.size(); ++e) {
    const double a = br[e];
    const double b = br[e + 1];
    const double half = 0.5 * (b - a);
    for (int k = 0; k < points_per_element; ++k) {
      q.points.push_back(a + half * (rule.nodes[static_cast<std::size_t>(k)] + 1.0));
      q.weights.push_back(half * rule.weights[static_cast<std::size_t>(k)]);
    }
    q.spans.push_back(kv.find_span(0.5 * (a + b)));
  }
  return q;
}

BandedMatrix univariate_mass(const KnotVector& rows, const KnotVector& cols) {
  const int nr = rows.size();
  const int nc = cols.size();
  const int pr = rows.degree();
  const int pc = cols.degree();
  std::vector<int> wb(static_cast<std::size_t>(nr));
  std::vector<int> we(static_cast<std::size_t>(nr));
  int lo = 0;
  for (int i = 0; i < nr; ++i) {
    const double a = rows[i];
    const double b = rows[i + pr + 1];
    while (lo < nc && cols[lo + pc + 1] <= a) ++lo;
    int hi = lo;
    while (hi < nc && cols[hi] < b) ++hi;
    wb[static_cast<std::size_t>(i)] = lo;
    we[static_cast<std::size_t>(i)] = std::max(lo, hi);
  }
  BandedMatrix m(nr, nc, std::move(wb), std::move(we));

  std::vector<double> br = rows.breaks();
  const auto cb = cols.breaks();
  br.insert(br.end(), cb.begin(), cb.end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());

  const auto rule = gauss_legendre((pr + pc) / 2 + 1);
  std::vector<double> rv(static_cast<std::size_t>(pr) + 1);
  std::vector<double> cv(static_cast<std::size_t>(pc) + 1);
  for (std::size_t e = 0; e + 1 < br.size(); ++e) {
    const double a = br[e];
    const double b = br[e + 1];
    const double mid = 0.5 * (a + b);
    const int mr = rows.find_span(mid);
    const int mc = cols.find_span(mid);
    const double half = 0.5 * (b - a);
    for (int k = 0; k < rule.size(); ++k) {
      const double x = a + half * (rule.nodes[static_cast<std::size_t>(k)] + 1.0);
      const double w = half * rule.weights[static_cast<std::size_t>(k)];
      basis_funs(rows.knots(), mr, x, pr, rv.data());
      basis_funs(cols.knots(), mc, x, pc, cv.data());
      for (int i = 0; i <= pr; ++i) {
        for (int j = 0; j <= pc; ++j) {
          m.at(mr - pr + i, mc - pc + j) += w * rv[static_cast<std::size_t>(i)] * cv[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  return m;
}

BandedMatrix univariate_collocation(const KnotVector& kv, std::span<const double> points) {
  const int n = kv.size();
  if (points.size() != static_cast<std::size_t>(n)) {
    throw ShapeError("univariate_collocation: expected " + std::to_string(n) + " points, got " +
                     std::to_string(points.size()));
  }
  std::vector<BasisValues> evals;
  evals.reserve(static_cast<std::size_t>(n));
  std::vector<int> wb(static_cast<std::size_t>(n));
  std::vector<int> we(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = points[static_cast<std::size_t>(i)];
    evals.push_back(eval_basis(kv, x, support_side(kv, i, x)));
    wb[static_cast<std::size_t>(i)] = evals.back().first;
    we[static_cast<std::size_t>(i)] = evals.back().first + kv.degree() + 1;
  }
  BandedMatrix m(n, n, std::move(wb), std::move(we));
  for (int i = 0; i < n; ++i) {
    auto row = m.row(i);
    std::copy(evals[static_cast<std::size_t>(i)].values.begin(),
              evals[static_cast<std::size_t>(i)].values.end(), row.begin());
  }
  return m;
}

BasisSpace::BasisSpace(std::vector<KnotVector> directions, std::vector<double> weights,
                       SpaceRole role)
    : directions_(std::move(directions)), weights_(std::move(weights)), role_(role) {
  if (directions_.empty() || directions_.size() > 3) {
    throw ParameterError("BasisSpace: dimension must be 1, 2 or 3");
  }
  if (!weights_.empty()) {
    if (weights_.size() != static_cast<std::size_t>(size())) {
      throw ParameterError("BasisSpace: one weight per basis function required");
    }
    for (double w : weights_) {
      if (!(w > 0.0)) throw ParameterError("BasisSpace: rational weights must be positive");
    }
  }
}

int BasisSpace::size() const {
  int n = 1;
  for (const auto& kv : directions_) n *= kv.size();
  return n;
}

std::vector<int> BasisSpace::sizes() const {
  std::vector<int> s;
  for (const auto& kv : directions_) s.push_back(kv.size());
  return s;
}

int BasisSpace::num_elements() const {
  int n = 1;
  for (const auto& kv : directions_) n *= kv.num_elements();
  return n;
}

int BasisSpace::flat_index(std::span<const int> multi) const {
  int idx = 0;
  for (int k = dim() - 1; k >= 0; --k) idx = idx * direction(k).size() + multi[static_cast<std::size_t>(k)];
  return idx;
}

BasisSpace::PointValues BasisSpace::evaluate(std::span<const double> x,
                                             std::span<const Side> sides) const {
  const int d = dim();
  if (x.size() != static_cast<std::size_t>(d)) throw ShapeError("BasisSpace::evaluate: wrong point dimension");
  std::array<BasisValues, 3> per;
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) {
    const Side s = sides.empty() ? Side::right : sides[static_cast<std::size_t>(k)];
    per[static_cast<std::size_t>(k)] = eval_basis(direction(k), x[static_cast<std::size_t>(k)], s);
    count *= per[static_cast<std::size_t>(k)].values.size();
  }
  PointValues out;
  out.indices.reserve(count);
  out.values.reserve(count);
  const int n0 = direction(0).size();
  const int n1 = d > 1 ? direction(1).size() : 1;
  const std::size_t l0 = per[0].values.size();
  const std::size_t l1 = d > 1 ? per[1].values.size() : 1;
  const std::size_t l2 = d > 2 ? per[2].values.size() : 1;
  for (std::size_t c = 0; c < l2; ++c) {
    const double v2 = d > 2 ? per[2].values[c] : 1.0;
    const int i2 = d > 2 ? per[2].first + static_cast<int>(c) : 0;
    for (std::size_t b = 0; b < l1; ++b) {
      const double v1 = d > 1 ? per[1].values[b] : 1.0;
      const int i1 = d > 1 ? per[1].first + static_cast<int>(b) : 0;
      for (std::size_t a = 0; a < l0; ++a) {
        out.indices.push_back(per[0].first + static_cast<int>(a) + n0 * (i1 + n1 * i2));
        out.values.push_back(per[0].values[a] * v1 * v2);
      }
    }
  }
  if (rational()) {
    double denom = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      out.values[k] *= weights_[static_cast<std::size_t>(out.indices[k])];
      denom += out.values[k];
    }
    for (double& v : out.values) v /= denom;
  }
  return out;
}

}  // namespace klexpand
