#include "klexpand/kernel.hpp"

#include <cmath>

#include "klexpand/error.hpp"
#include "klexpand/parallel.hpp"

namespace klexpand {

KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "exponential") return KernelKind::exponential;
  if (s == "gaussian") return KernelKind::gaussian;
  if (s == "constant") return KernelKind::constant;
  throw ParameterError("unknown kernel kind '" + s + "'");
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::exponential:
      return "exponential";
    case KernelKind::gaussian:
      return "gaussian";
    case KernelKind::constant:
      return "constant";
  }
  return "?";
}

void CovarianceKernel::validate() const {
  if (!(variance > 0.0)) throw ParameterError("kernel variance must be positive");
  if (!(correlation_length > 0.0)) throw ParameterError("kernel correlation length must be positive");
}

void PointSet::push_back(std::span<const double> x) {
  if (dim == 0) dim = static_cast<int>(x.size());
  if (x.size() != static_cast<std::size_t>(dim)) throw ShapeError("PointSet: dimension mismatch");
  coords.insert(coords.end(), x.begin(), x.end());
}

namespace {

template <int D>
inline double squared_distance(const double* x, const double* y) {
  double s = 0.0;
  for (int a = 0; a < D; ++a) {
    const double t = x[a] - y[a];
    s += t * t;
  }
  return s;
}

template <KernelKind K>
inline double kernel_value(double r2, double var, double inv_b, double inv_b2) {
  if constexpr (K == KernelKind::exponential) {
    return var * std::exp(-std::sqrt(r2) * inv_b);
  } else if constexpr (K == KernelKind::gaussian) {
    return var * std::exp(-r2 * inv_b2);
  } else {
    return var;
  }
}

template <KernelKind K, int D>
void rows_kernel(const CovarianceKernel& k, const PointSet& sources, const PointSet& targets,
                 const double* v, double* out, std::size_t begin, std::size_t end) {
  const double var = k.variance;
  const double inv_b = 1.0 / k.correlation_length;
  const double inv_b2 = inv_b * inv_b;
  const std::size_t ns = sources.size();
  const double* src = sources.coords.data();
  for (std::size_t l = begin; l < end; ++l) {
    const double* t = targets.coords.data() + l * D;
    double acc = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      acc += kernel_value<K>(squared_distance<D>(t, src + s * D), var, inv_b, inv_b2) * v[s];
    }
    out[l] = acc;
  }
}

template <KernelKind K>
void rows_dispatch_dim(const CovarianceKernel& k, const PointSet& sources, const PointSet& targets,
                       const double* v, double* out, std::size_t begin, std::size_t end) {
  switch (sources.dim) {
    case 1:
      rows_kernel<K, 1>(k, sources, targets, v, out, begin, end);
      break;
    case 2:
      rows_kernel<K, 2>(k, sources, targets, v, out, begin, end);
      break;
    case 3:
      rows_kernel<K, 3>(k, sources, targets, v, out, begin, end);
      break;
    default:
      throw ShapeError("apply_gamma: points must have dimension 1, 2 or 3");
  }
}

}  // namespace

double eval(const CovarianceKernel& k, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("kernel eval: point dimensions differ");
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double t = x[a] - y[a];
    r2 += t * t;
  }
  const double inv_b = 1.0 / k.correlation_length;
  switch (k.kind) {
    case KernelKind::exponential:
      return kernel_value<KernelKind::exponential>(r2, k.variance, inv_b, inv_b * inv_b);
    case KernelKind::gaussian:
      return kernel_value<KernelKind::gaussian>(r2, k.variance, inv_b, inv_b * inv_b);
    case KernelKind::constant:
      return k.variance;
  }
  return 0.0;
}

std::vector<double> row(const CovarianceKernel& k, std::span<const double> x_i, const PointSet& targets) {
  if (targets.size() == 0) throw ShapeError("kernel row: empty target set");
  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) out[t] = eval(k, x_i, targets.point(t));
  return out;
}

void apply_gamma(const CovarianceKernel& k, const PointSet& sources, const PointSet& targets,
                 std::span<const double> v, std::span<double> out, int threads) {
  if (v.size() != sources.size() || out.size() != targets.size()) {
    throw ShapeError("apply_gamma: vector lengths do not match the point sets");
  }
  if (sources.size() > 0 && targets.size() > 0 && sources.dim != targets.dim) {
    throw ShapeError("apply_gamma: source and target dimensions differ");
  }
  if (targets.size() == 0) return;
  if (sources.size() == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  parallel_for(targets.size(), threads, [&](std::size_t begin, std::size_t end) {
    switch (k.kind) {
      case KernelKind::exponential:
        rows_dispatch_dim<KernelKind::exponential>(k, sources, targets, v.data(), out.data(), begin, end);
        break;
      case KernelKind::gaussian:
        rows_dispatch_dim<KernelKind::gaussian>(k, sources, targets, v.data(), out.data(), begin, end);
        break;
      case KernelKind::constant:
        rows_dispatch_dim<KernelKind::constant>(k, sources, targets, v.data(), out.data(), begin, end);
        break;
    }
  });
}

std::vector<double> apply_gamma(const CovarianceKernel& k, const PointSet& sources,
                                const PointSet& targets, std::span<const double> v, int threads) {
  std::vector<double> out(targets.size());
  apply_gamma(k, sources, targets, v, out, threads);
  return out;
}

}  // namespace klexpand
