#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "klexpand/error.hpp"

namespace klexpand {

/// Matrix-free operator contract: out = A v. Must be a pure function of v.
using MatVec = std::function<void(std::span<const double> v, std::span<double> out)>;

struct EigenOptions {
  /// Residual tolerance relative to the largest Ritz value magnitude.
  double tol = 1e-8;
  /// No restart cycle begins once this many operator applications have been made.
  int max_iter = 10000;
  std::uint64_t seed = 12345;
  /// Krylov subspace dimension; 0 selects max(2m+10, 40) capped at n.
  int subspace = 0;
  /// Probe ⟨Au, v⟩ = ⟨u, Av⟩ before a symmetric solve.
  bool check_symmetry = true;
};

struct EigenResult {
  /// Real parts, non-increasing.
  std::vector<double> eigenvalues;
  /// Imaginary parts (zero on the symmetric path).
  std::vector<double> imag_parts;
  /// Set for pairs with |Im λ| >= 1e-8 |Re λ|; the stored vector is the real part.
  std::vector<bool> complex_flags;
  /// Unit 2-norm Ritz vectors.
  std::vector<std::vector<double>> eigenvectors;
  /// ‖A x - λ x‖ recomputed with fresh operator applications after the solve.
  std::vector<double> residuals;
  /// Operator applications spent in the Krylov iteration (N_iter).
  int iterations = 0;
  int restarts = 0;
  double seconds = 0.0;
  bool converged = false;

  std::size_t size() const { return eigenvalues.size(); }
  bool any_complex() const;
};

/// Raised when the requested pairs do not converge; carries the converged ones.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, EigenResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const EigenResult& partial() const { return partial_; }

 private:
  EigenResult partial_;
};

/// Thick-restart Lanczos with full reorthogonalization; returns the m algebraically
/// largest eigenpairs. Throws OperatorContractError if the symmetry probe fails and
/// ConvergenceError after max_iter applications.
EigenResult solve_symmetric(const MatVec& apply, std::size_t n, std::size_t m,
                            const EigenOptions& opts = {});

/// Restarted Arnoldi (Ritz-vector thick restart); returns the m eigenpairs with largest
/// real part. Complex Ritz values are reported and flagged, never dropped.
EigenResult solve_nonsymmetric(const MatVec& apply, std::size_t n, std::size_t m,
                               const EigenOptions& opts = {});

/// Deterministic uniform(-1, 1) start vector, normalized.
std::vector<double> seeded_start_vector(std::size_t n, std::uint64_t seed);

}  // namespace klexpand
