#include "klexpand/reference.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <string>

#include "klexpand/error.hpp"

namespace klexpand {

namespace {

// Tensor Gauss points over the mesh of a space.
struct Tabulation {
  std::vector<double> xhat;       // dim per point
  std::vector<double> weight;     // parametric weight
  std::vector<double> det;        // det DF
  PointSet physical;
  std::vector<BasisSpace::PointValues> basis;
  std::vector<std::size_t> element;                 // owning element per point
  std::vector<std::array<double, 6>> cells;         // [lo, hi] per direction and element
};

Tabulation tabulate(const BasisSpace& space, const GeometryMap& g, int nq, std::size_t cap) {
  const int d = space.dim();
  std::size_t total = static_cast<std::size_t>(space.num_elements());
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(nq);
  if (total > cap) {
    throw SizeError("dense assembly needs " + std::to_string(total) +
                    " quadrature points, above the cap of " + std::to_string(cap) +
                    "; use the matrix-free methods");
  }
  const auto rule = gauss_legendre(nq);
  std::array<std::vector<double>, 3> br;
  for (int k = 0; k < 3; ++k) br[static_cast<std::size_t>(k)] = k < d ? space.direction(k).breaks() : std::vector<double>{0.0, 1.0};
  Tabulation t;
  t.physical.dim = d;
  const int n1 = d > 1 ? nq : 1;
  const int n2 = d > 2 ? nq : 1;
  for (std::size_t e2 = 0; e2 + 1 < br[2].size(); ++e2) {
    for (std::size_t e1 = 0; e1 + 1 < br[1].size(); ++e1) {
      for (std::size_t e0 = 0; e0 + 1 < br[0].size(); ++e0) {
        const std::size_t e[3] = {e0, e1, e2};
        std::array<double, 6> cell{0, 1, 0, 1, 0, 1};
        for (int k = 0; k < d; ++k) {
          const auto& bk = br[static_cast<std::size_t>(k)];
          cell[static_cast<std::size_t>(2 * k)] = bk[e[k]];
          cell[static_cast<std::size_t>(2 * k + 1)] = bk[e[k] + 1];
        }
        const std::size_t eid = t.cells.size();
        t.cells.push_back(cell);
        for (int c = 0; c < n2; ++c) {
          for (int b = 0; b < n1; ++b) {
            for (int a = 0; a < nq; ++a) {
              const int loc[3] = {a, b, c};
              std::array<double, 3> x{};
              double w = 1.0;
              for (int k = 0; k < d; ++k) {
                const auto& bk = br[static_cast<std::size_t>(k)];
                const double lo = bk[e[k]];
                const double half = 0.5 * (bk[e[k] + 1] - lo);
                x[static_cast<std::size_t>(k)] = lo + half * (rule.nodes[static_cast<std::size_t>(loc[k])] + 1.0);
                w *= half * rule.weights[static_cast<std::size_t>(loc[k])];
              }
              const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
              t.xhat.insert(t.xhat.end(), xs.begin(), xs.end());
              t.weight.push_back(w);
              t.det.push_back(g.jacobian_det(xs));
              const Point p = g.map_point(xs);
              t.physical.push_back(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
              t.basis.push_back(space.evaluate(xs));
              t.element.push_back(eid);
            }
          }
        }
      }
    }
  }
  return t;
}

// Inner integral ∫_cell Γ(x_q, x') b(x') sqrt(det) dx' over the element that owns x_q,
// with the cell split at x_q in every direction so the kink of |x - x'| sits on sub-cell
// corners. Accumulates into t.
void add_split_cell(const Tabulation& tab, std::size_t q, const BasisSpace& space, const GeometryMap& g,
                    const CovarianceKernel& k, int nq, Eigen::VectorXd& t) {
  const int d = space.dim();
  const auto rule = gauss_legendre(nq);
  const auto& cell = tab.cells[tab.element[q]];
  const auto xq = tab.physical.point(q);
  const auto* xhat = tab.xhat.data() + q * static_cast<std::size_t>(d);
  const int per_cell = static_cast<int>(std::pow(nq, d));
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::array<double, 3> lo{};
    std::array<double, 3> half{};
    for (int dir = 0; dir < d; ++dir) {
      const auto k2 = static_cast<std::size_t>(2 * dir);
      const double a = (mask >> dir) & 1 ? xhat[dir] : cell[k2];
      const double b = (mask >> dir) & 1 ? cell[k2 + 1] : xhat[dir];
      lo[static_cast<std::size_t>(dir)] = a;
      half[static_cast<std::size_t>(dir)] = 0.5 * (b - a);
    }
    for (int idx = 0; idx < per_cell; ++idx) {
      std::array<double, 3> x{};
      double w = 1.0;
      int rem = idx;
      for (int dir = 0; dir < d; ++dir) {
        const auto i = static_cast<std::size_t>(rem % nq);
        rem /= nq;
        const auto dd = static_cast<std::size_t>(dir);
        x[dd] = lo[dd] + half[dd] * (rule.nodes[i] + 1.0);
        w *= half[dd] * rule.weights[i];
      }
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
      const Point p = g.map_point(xs);
      const double gv = eval(k, xq, std::span<const double>(p.data(), static_cast<std::size_t>(d))) * w *
                        std::sqrt(g.jacobian_det(xs));
      const auto pv = space.evaluate(xs);
      for (std::size_t s = 0; s < pv.indices.size(); ++s) t(pv.indices[s]) += gv * pv.values[s];
    }
  }
}

}  // namespace

Eigen::MatrixXd to_eigen(const BandedMatrix& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = m.row_begin(i); j < m.row_end(i); ++j) out(i, j) = m(i, j);
  }
  return out;
}

Eigen::MatrixXd dense_kronecker(const std::vector<BandedMatrix>& factors) {
  if (factors.empty()) throw ShapeError("dense_kronecker: no factors");
  Eigen::MatrixXd k = to_eigen(factors.front());
  for (std::size_t i = 1; i < factors.size(); ++i) {
    const Eigen::MatrixXd next = Eigen::kroneckerProduct(to_eigen(factors[i]), k);
    k = next;
  }
  return k;
}

DenseSystem assemble_galerkin_dense(const BasisSpace& trial, const GeometryMap& g,
                                    const CovarianceKernel& k, int nq, std::size_t cap) {
  k.validate();
  const BasisSpace poly = polynomial_part(trial);
  const auto tab = tabulate(poly, g, nq, cap);
  const auto n = static_cast<Eigen::Index>(poly.size());
  const std::size_t nqt = tab.weight.size();
  std::vector<double> c(nqt);
  for (std::size_t q = 0; q < nqt; ++q) c[q] = tab.weight[q] * std::sqrt(tab.det[q]);

  DenseSystem sys;
  sys.method = DenseMethod::galerkin_gauss;
  sys.a = Eigen::MatrixXd::Zero(n, n);
  sys.z = Eigen::MatrixXd::Zero(n, n);
  // The exponential kernel is not smooth across x = x'; coincident cells get a split rule.
  const bool split = k.kind == KernelKind::exponential;
  Eigen::VectorXd t(n);
  for (std::size_t q = 0; q < nqt; ++q) {
    t.setZero();
    const auto xq = tab.physical.point(q);
    if (split) add_split_cell(tab, q, poly, g, k, nq, t);
    for (std::size_t r = 0; r < nqt; ++r) {
      if (split && tab.element[r] == tab.element[q]) continue;
      const double gv = eval(k, xq, tab.physical.point(r)) * c[r];
      const auto& br = tab.basis[r];
      for (std::size_t s = 0; s < br.indices.size(); ++s) t(br.indices[s]) += gv * br.values[s];
    }
    const auto& bq = tab.basis[q];
    for (std::size_t s = 0; s < bq.indices.size(); ++s) {
      sys.a.row(bq.indices[s]) += c[q] * bq.values[s] * t.transpose();
      for (std::size_t u = 0; u < bq.indices.size(); ++u) {
        // b_i b_j / det · det = b_i b_j in the parametric measure.
        sys.z(bq.indices[s], bq.indices[u]) += tab.weight[q] * bq.values[s] * bq.values[u];
      }
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (sys.a + sys.a.transpose());
  sys.a = sym;
  return sys;
}

DenseSystem assemble_collocation_dense(const BasisSpace& trial, const GeometryMap& g,
                                       const CovarianceKernel& k, int nq, std::size_t cap) {
  k.validate();
  const auto tab = tabulate(trial, g, nq, cap);
  const int d = trial.dim();
  const auto n = static_cast<Eigen::Index>(trial.size());
  const auto sizes = trial.sizes();
  std::vector<std::vector<double>> grev;
  for (int dir = 0; dir < d; ++dir) grev.push_back(greville_abscissae(trial.direction(dir)));

  DenseSystem sys;
  sys.method = DenseMethod::collocation;
  sys.a = Eigen::MatrixXd::Zero(n, n);
  sys.z = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t rem = static_cast<std::size_t>(i);
    std::array<double, 3> x{};
    for (int dir = 0; dir < d; ++dir) {
      const auto nk = static_cast<std::size_t>(sizes[static_cast<std::size_t>(dir)]);
      x[static_cast<std::size_t>(dir)] = grev[static_cast<std::size_t>(dir)][rem % nk];
      rem /= nk;
    }
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
    const auto pv = trial.evaluate(xs);
    for (std::size_t s = 0; s < pv.indices.size(); ++s) sys.z(i, pv.indices[s]) = pv.values[s];
    const Point xi = g.map_point(xs);
    const std::span<const double> xp(xi.data(), static_cast<std::size_t>(d));
    for (std::size_t q = 0; q < tab.weight.size(); ++q) {
      const double gv = eval(k, xp, tab.physical.point(q)) * tab.weight[q] * tab.det[q];
      const auto& bq = tab.basis[q];
      for (std::size_t s = 0; s < bq.indices.size(); ++s) sys.a(i, bq.indices[s]) += gv * bq.values[s];
    }
  }
  return sys;
}

DenseSystem assemble_ibq_dense(const BasisSpace& trial, const BasisSpace& interp,
                               const GeometryMap& g, const CovarianceKernel& k,
                               std::size_t max_interp) {
  k.validate();
  if (static_cast<std::size_t>(interp.size()) > max_interp) {
    throw SizeError("assemble_ibq_dense: interpolation space of size " + std::to_string(interp.size()) +
                    " exceeds the dense cap");
  }
  const int d = trial.dim();
  std::vector<BandedMatrix> mf;
  std::vector<BandedMatrix> bf;
  std::vector<BandedMatrix> zf;
  std::vector<std::vector<double>> grev;
  for (int dir = 0; dir < d; ++dir) {
    const auto& ikv = interp.direction(dir);
    const auto& tkv = trial.direction(dir);
    grev.push_back(greville_abscissae(ikv));
    mf.push_back(univariate_mass(ikv, tkv));
    bf.push_back(univariate_collocation(ikv, grev.back()));
    zf.push_back(univariate_mass(tkv, tkv));
  }
  const Eigen::MatrixXd m = dense_kronecker(mf);
  const Eigen::MatrixXd b = dense_kronecker(bf);
  const auto nt = static_cast<Eigen::Index>(interp.size());
  const auto sizes = interp.sizes();

  PointSet pts;
  pts.dim = d;
  Eigen::VectorXd j(nt);
  for (Eigen::Index idx = 0; idx < nt; ++idx) {
    std::size_t rem = static_cast<std::size_t>(idx);
    std::array<double, 3> x{};
    std::array<Side, 3> sd{};
    for (int dir = 0; dir < d; ++dir) {
      const auto nk = static_cast<std::size_t>(sizes[static_cast<std::size_t>(dir)]);
      const std::size_t i = rem % nk;
      rem /= nk;
      x[static_cast<std::size_t>(dir)] = grev[static_cast<std::size_t>(dir)][i];
      sd[static_cast<std::size_t>(dir)] = support_side(interp.direction(dir), static_cast<int>(i), x[static_cast<std::size_t>(dir)]);
    }
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
    const std::span<const Side> ss(sd.data(), static_cast<std::size_t>(d));
    j(idx) = std::sqrt(g.jacobian_det(xs, ss));
    const Point p = g.map_point(xs, ss);
    pts.push_back(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
  }
  Eigen::MatrixXd gamma(nt, nt);
  for (Eigen::Index r = 0; r < nt; ++r) {
    for (Eigen::Index c = 0; c < nt; ++c) {
      gamma(r, c) = j(r) * eval(k, pts.point(static_cast<std::size_t>(r)), pts.point(static_cast<std::size_t>(c))) * j(c);
    }
  }
  // X = B̃^{-T} M
  const Eigen::MatrixXd x = b.transpose().fullPivLu().solve(m);
  DenseSystem sys;
  sys.method = DenseMethod::galerkin_ibq_dense;
  sys.a = x.transpose() * gamma * x;
  sys.z = dense_kronecker(zf);
  return sys;
}

Eigen::MatrixXd dense_standard_form(const DenseSystem& sys) {
  if (sys.method == DenseMethod::collocation) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.z);
    if (!lu.isInvertible()) throw FactorizationError("dense_standard_form: Z is singular");
    return lu.solve(sys.a);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sys.z);
  if (llt.info() != Eigen::Success) throw FactorizationError("dense_standard_form: Z is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd left = l.triangularView<Eigen::Lower>().solve(sys.a);
  return l.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
}

EigenResult solve_dense_generalized(const DenseSystem& sys, std::size_t m) {
  const auto n = sys.a.rows();
  if (n > 2000) throw SizeError("solve_dense_generalized: N above 2000");
  if (m == 0 || m > static_cast<std::size_t>(n)) throw ParameterError("solve_dense_generalized: invalid m");
  const Eigen::MatrixXd ap = dense_standard_form(sys);
  EigenResult res;
  res.converged = true;
  if (sys.method == DenseMethod::collocation) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(ap);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const auto va = es.eigenvalues()(a);
      const auto vb = es.eigenvalues()(b);
      if (va.real() != vb.real()) return va.real() > vb.real();
      return va.imag() > vb.imag();
    });
    for (std::size_t i = 0; i < m; ++i) {
      const auto idx = order[i];
      const auto lam = es.eigenvalues()(idx);
      Eigen::VectorXcd vc = es.eigenvectors().col(idx);
      vc /= vc.norm();
      const Eigen::VectorXcd r = ap.cast<std::complex<double>>() * vc - lam * vc;
      const bool cplx = std::abs(lam.imag()) >= 1e-8 * std::abs(lam.real());
      Eigen::VectorXd v = vc.real();
      v /= v.norm();
      res.eigenvalues.push_back(lam.real());
      res.imag_parts.push_back(lam.imag());
      res.complex_flags.push_back(cplx);
      res.eigenvectors.emplace_back(v.data(), v.data() + v.size());
      res.residuals.push_back(r.norm());
    }
    return res;
  }
  const Eigen::MatrixXd sym = 0.5 * (ap + ap.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::LLT<Eigen::MatrixXd> llt(sys.z);
  const Eigen::MatrixXd l = llt.matrixL();
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Index idx = n - 1 - static_cast<Eigen::Index>(i);
    const double lam = es.eigenvalues()(idx);
    const Eigen::VectorXd vp = es.eigenvectors().col(idx);
    const Eigen::VectorXd v = l.transpose().triangularView<Eigen::Upper>().solve(vp);
    res.eigenvalues.push_back(lam);
    res.imag_parts.push_back(0.0);
    res.complex_flags.push_back(false);
    res.eigenvectors.emplace_back(v.data(), v.data() + v.size());
    res.residuals.push_back((sym * vp - lam * vp).norm());
  }
  return res;
}

}  // namespace klexpand
