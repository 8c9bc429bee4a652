#include "klexpand/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace klexpand {

bool EigenResult::any_complex() const {
  return std::any_of(complex_flags.begin(), complex_flags.end(), [](bool b) { return b; });
}

std::vector<double> seeded_start_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    // 53 random bits mapped to [-1, 1); mt19937_64 output is fully specified.
    x = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
    s += x * x;
  }
  s = std::sqrt(s);
  for (auto& x : v) x /= s;
  return v;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kComplexThreshold = 1e-8;

struct Ritz {
  std::complex<double> value;
  Eigen::VectorXcd vector;  // coefficients in the current basis
  double estimate = 0.0;    // |β y_last| / |y|
};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_symmetry(const MatVec& apply, std::size_t n, std::uint64_t seed) {
  const auto u = seeded_start_vector(n, seed + 1);
  const auto v = seeded_start_vector(n, seed + 2);
  std::vector<double> au(n);
  std::vector<double> av(n);
  apply(u, au);
  apply(v, av);
  const double lhs = dot(au, v);
  const double rhs = dot(u, av);
  const double scale = std::max(norm(au), norm(av));
  if (std::abs(lhs - rhs) > 1e-8 * std::max(scale, 1e-300)) {
    throw OperatorContractError("solve_symmetric: operator is not symmetric (<Au,v> = " +
                                std::to_string(lhs) + ", <u,Av> = " + std::to_string(rhs) + ")");
  }
}

std::vector<Ritz> ritz_pairs(const MatrixXd& hs, double beta_last, bool symmetric) {
  const auto jj = hs.rows();
  std::vector<Ritz> out;
  if (symmetric) {
    const MatrixXd s = 0.5 * (hs + hs.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    for (Eigen::Index i = jj - 1; i >= 0; --i) {
      Ritz r;
      r.value = es.eigenvalues()(i);
      r.vector = es.eigenvectors().col(i).cast<std::complex<double>>();
      r.estimate = std::abs(beta_last * es.eigenvectors()(jj - 1, i));
      out.push_back(std::move(r));
    }
    return out;
  }
  Eigen::EigenSolver<MatrixXd> es(hs);
  for (Eigen::Index i = 0; i < jj; ++i) {
    Ritz r;
    r.value = es.eigenvalues()(i);
    r.vector = es.eigenvectors().col(i);
    r.vector /= r.vector.norm();
    r.estimate = std::abs(beta_last) * std::abs(r.vector(jj - 1));
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const Ritz& a, const Ritz& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

bool is_complex(std::complex<double> z) {
  return std::abs(z.imag()) >= kComplexThreshold * std::abs(z.real());
}

EigenResult krylov_solve(const MatVec& apply, std::size_t n, std::size_t m, const EigenOptions& opts,
                         bool symmetric) {
  if (m == 0 || m > n) {
    throw ParameterError("eigensolver: need 1 <= m <= n (m = " + std::to_string(m) +
                         ", n = " + std::to_string(n) + ")");
  }
  if (!(opts.tol > 0.0)) throw ParameterError("eigensolver: tolerance must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  if (symmetric && opts.check_symmetry) check_symmetry(apply, n, opts.seed);

  std::size_t mmax = opts.subspace > 0 ? static_cast<std::size_t>(opts.subspace)
                                       : std::max<std::size_t>(2 * m + 10, 40);
  mmax = std::min(std::max(mmax, m + 2), n);

  MatrixXd v_basis = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(mmax) + 1);
  MatrixXd h = MatrixXd::Zero(static_cast<Eigen::Index>(mmax) + 1, static_cast<Eigen::Index>(mmax));
  {
    const auto start = seeded_start_vector(n, opts.seed);
    v_basis.col(0) = Eigen::Map<const VectorXd>(start.data(), static_cast<Eigen::Index>(n));
  }
  std::uint64_t refill_seed = opts.seed ^ 0x9e3779b97f4a7c15ULL;

  std::vector<double> in(n);
  std::vector<double> out(n);
  Eigen::Index k = 0;
  int matvecs = 0;
  int restarts = 0;
  std::vector<Ritz> ritz;
  Eigen::Index jj = 0;
  bool converged = false;
  double scale = 0.0;
  double dropped = 0.0;  // largest coupling discarded at an invariant-subspace refill

  while (true) {
    bool exhausted = false;
    jj = static_cast<Eigen::Index>(mmax);
    for (Eigen::Index j = k; j < static_cast<Eigen::Index>(mmax); ++j) {
      Eigen::Map<VectorXd>(in.data(), static_cast<Eigen::Index>(n)) = v_basis.col(j);
      apply(in, out);
      ++matvecs;
      VectorXd w = Eigen::Map<const VectorXd>(out.data(), static_cast<Eigen::Index>(n));
      const double w0 = w.norm();
      const auto basis = v_basis.leftCols(j + 1);
      VectorXd coeff = basis.transpose() * w;
      w.noalias() -= basis * coeff;
      const VectorXd again = basis.transpose() * w;
      w.noalias() -= basis * again;
      coeff += again;
      h.col(j).head(j + 1) = coeff;
      if (j + 1 == static_cast<Eigen::Index>(n)) {
        jj = j + 1;
        exhausted = true;
        break;
      }
      const double beta = w.norm();
      if (w0 == 0.0 || beta <= 1e-12 * w0) {
        // Invariant subspace found: continue from a fresh orthogonal direction.
        h(j + 1, j) = 0.0;
        dropped = std::max(dropped, beta);
        const auto r = seeded_start_vector(n, refill_seed++);
        VectorXd fresh = Eigen::Map<const VectorXd>(r.data(), static_cast<Eigen::Index>(n));
        for (int pass = 0; pass < 2; ++pass) fresh -= basis * (basis.transpose() * fresh);
        const double fn = fresh.norm();
        if (fn < 1e-10) {
          jj = j + 1;
          exhausted = true;
          break;
        }
        v_basis.col(j + 1) = fresh / fn;
      } else {
        h(j + 1, j) = beta;
        v_basis.col(j + 1) = w / beta;
      }
    }
    const double beta_last = exhausted ? 0.0 : h(jj, jj - 1);
    const MatrixXd hs = h.topLeftCorner(jj, jj);
    ritz = ritz_pairs(hs, beta_last, symmetric);
    scale = 0.0;
    for (const auto& r : ritz) scale = std::max(scale, std::abs(r.value));
    scale = std::max(scale, 1e-300);
    // Residuals cannot drop below rounding level, whatever the Lanczos estimate says.
    const double floor = std::numeric_limits<double>::epsilon() * scale + dropped;
    for (auto& r : ritz) r.estimate = std::max(r.estimate, floor);
    std::size_t nconv = 0;
    while (nconv < m && nconv < ritz.size() && ritz[nconv].estimate <= opts.tol * scale) ++nconv;
    if (nconv >= m) {
      converged = true;
      break;
    }
    if (matvecs >= opts.max_iter) break;

    // Thick restart on the span of the leading Ritz vectors.
    Eigen::Index keep = std::min<Eigen::Index>(static_cast<Eigen::Index>(m) + (jj - static_cast<Eigen::Index>(m)) / 2, jj - 1);
    keep = std::max<Eigen::Index>(keep, 1);
    if (!symmetric && keep < jj && is_complex(ritz[static_cast<std::size_t>(keep - 1)].value) &&
        std::abs(ritz[static_cast<std::size_t>(keep - 1)].value - std::conj(ritz[static_cast<std::size_t>(keep)].value)) <
            1e-12 * scale) {
      keep = keep + 1 < jj ? keep + 1 : keep - 1;
    }
    MatrixXd y(jj, keep);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < keep && col < keep; ++i) {
      const auto& r = ritz[static_cast<std::size_t>(i)];
      if (r.value.imag() == 0.0 || symmetric) {
        y.col(col++) = r.vector.real();
      } else if (r.value.imag() > 0.0) {
        y.col(col++) = r.vector.real();
        if (col < keep) y.col(col++) = r.vector.imag();
      } else if (i == 0 || std::abs(ritz[static_cast<std::size_t>(i - 1)].value - std::conj(r.value)) > 1e-12 * scale) {
        // Conjugate without its partner in the selection.
        y.col(col++) = r.vector.real();
      }
    }
    keep = col;
    Eigen::HouseholderQR<MatrixXd> qr(y.leftCols(keep));
    const MatrixXd g = qr.householderQ() * MatrixXd::Identity(jj, keep);
    const VectorXd residual_vec = v_basis.col(jj);
    const MatrixXd new_basis = v_basis.leftCols(jj) * g;
    const MatrixXd new_h = g.transpose() * hs * g;
    const VectorXd coupling = beta_last * g.row(jj - 1).transpose();
    v_basis.leftCols(keep) = new_basis;
    v_basis.col(keep) = residual_vec;
    h.setZero();
    h.topLeftCorner(keep, keep) = new_h;
    h.row(keep).head(keep) = coupling.transpose();
    k = keep;
    ++restarts;
  }

  EigenResult res;
  res.iterations = matvecs;
  res.restarts = restarts;
  res.converged = converged;
  const std::size_t take = std::min<std::size_t>(m, ritz.size());
  const auto basis = v_basis.leftCols(jj);
  for (std::size_t i = 0; i < take; ++i) {
    const auto& r = ritz[i];
    if (!converged && r.estimate > opts.tol * scale) break;
    const bool cplx = !symmetric && is_complex(r.value);
    VectorXd xr = basis * r.vector.real();
    VectorXd xi = cplx ? VectorXd(basis * r.vector.imag()) : VectorXd::Zero(static_cast<Eigen::Index>(n));
    const double nrm = std::sqrt(xr.squaredNorm() + xi.squaredNorm());
    xr /= nrm;
    xi /= nrm;
    const double re = r.value.real();
    const double im = cplx ? r.value.imag() : 0.0;
    // Independent residual check.
    std::vector<double> axr(n);
    Eigen::Map<VectorXd>(in.data(), static_cast<Eigen::Index>(n)) = xr;
    apply(in, axr);
    VectorXd rr = Eigen::Map<const VectorXd>(axr.data(), static_cast<Eigen::Index>(n)) - re * xr + im * xi;
    double resid2 = rr.squaredNorm();
    if (cplx) {
      std::vector<double> axi(n);
      Eigen::Map<VectorXd>(in.data(), static_cast<Eigen::Index>(n)) = xi;
      apply(in, axi);
      VectorXd ri = Eigen::Map<const VectorXd>(axi.data(), static_cast<Eigen::Index>(n)) - re * xi - im * xr;
      resid2 += ri.squaredNorm();
    }
    if (!cplx) xr /= xr.norm();
    res.eigenvalues.push_back(re);
    res.imag_parts.push_back(symmetric ? 0.0 : r.value.imag());
    res.complex_flags.push_back(cplx);
    res.eigenvectors.emplace_back(xr.data(), xr.data() + xr.size());
    res.residuals.push_back(std::sqrt(resid2));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!converged) {
    throw ConvergenceError("eigensolver: " + std::to_string(res.size()) + " of " + std::to_string(m) +
                               " pairs converged within " + std::to_string(opts.max_iter) +
                               " operator applications",
                           std::move(res));
  }
  return res;
}

}  // namespace

EigenResult solve_symmetric(const MatVec& apply, std::size_t n, std::size_t m, const EigenOptions& opts) {
  return krylov_solve(apply, n, m, opts, true);
}

EigenResult solve_nonsymmetric(const MatVec& apply, std::size_t n, std::size_t m,
                               const EigenOptions& opts) {
  return krylov_solve(apply, n, m, opts, false);
}

}  // namespace klexpand
