#include "klexpand/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "klexpand/error.hpp"
#include "klexpand/tensor.hpp"

namespace klexpand {

InterpContinuity parse_interp_continuity(const std::string& s) {
  if (s == "auto") return InterpContinuity::automatic;
  if (s == "c0") return InterpContinuity::c0;
  if (s == "cpm1") return InterpContinuity::cpm1;
  throw ParameterError("unknown interpolation continuity '" + s + "' (auto | c0 | cpm1)");
}

InterpContinuity resolve_continuity(InterpContinuity c, KernelKind kind) {
  if (c != InterpContinuity::automatic) return c;
  return kind == KernelKind::exponential ? InterpContinuity::c0 : InterpContinuity::cpm1;
}

namespace {

bool contains(const std::vector<double>& v, double x) {
  return std::any_of(v.begin(), v.end(), [&](double y) { return std::abs(x - y) < 1e-14; });
}

std::vector<double> merged_breaks(const KnotVector& geom, int elements) {
  std::vector<double> br;
  for (int e = 0; e <= elements; ++e) br.push_back(double(e) / elements);
  br.back() = 1.0;
  for (double b : geom.breaks()) {
    if (!contains(br, b)) br.push_back(b);
  }
  std::sort(br.begin(), br.end());
  return br;
}

}  // namespace

BasisSpace make_trial_space(const GeometryMap& g, int degree, std::span<const int> elements) {
  const int d = g.dim();
  if (elements.size() != static_cast<std::size_t>(d)) {
    throw ParameterError("make_trial_space: need one element count per direction");
  }
  if (degree < 1) throw ParameterError("make_trial_space: degree must be at least 1");
  std::vector<KnotVector> dirs;
  for (int k = 0; k < d; ++k) {
    const int ne = elements[static_cast<std::size_t>(k)];
    if (ne < 1) throw ParameterError("make_trial_space: element counts must be positive");
    const auto& gkv = g.space().direction(k);
    if (gkv.degree() > degree) {
      throw ParameterError("make_trial_space: degree below the geometry degree");
    }
    const auto br = merged_breaks(gkv, ne);
    const auto gbr = gkv.breaks();
    const auto gmult = gkv.multiplicities();
    std::vector<int> mult;
    for (std::size_t i = 1; i + 1 < br.size(); ++i) {
      int m = 1;
      for (std::size_t j = 1; j + 1 < gbr.size(); ++j) {
        if (std::abs(gbr[j] - br[i]) < 1e-14) {
          const int geom_cont = gkv.degree() - gmult[j];
          m = degree - std::min(degree - 1, geom_cont);
        }
      }
      mult.push_back(m);
    }
    dirs.push_back(KnotVector::from_breaks(degree, br, mult));
  }
  BasisSpace poly(dirs);
  if (!g.space().rational()) return poly;

  // Interpolate the geometry weight function at the Greville points.
  std::vector<BandedMatrix> colloc;
  std::vector<std::vector<double>> grev;
  for (int k = 0; k < d; ++k) {
    grev.push_back(greville_abscissae(poly.direction(k)));
    colloc.push_back(univariate_collocation(poly.direction(k), grev.back()));
  }
  const auto lu = kron_lu(KroneckerOperator(colloc));
  const auto sizes = poly.sizes();
  std::vector<double> w(static_cast<std::size_t>(poly.size()));
  std::vector<int> multi(static_cast<std::size_t>(d), 0);
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    std::size_t rem = idx;
    std::array<double, 3> x{};
    for (int k = 0; k < d; ++k) {
      const auto nk = static_cast<std::size_t>(sizes[static_cast<std::size_t>(k)]);
      x[static_cast<std::size_t>(k)] = grev[static_cast<std::size_t>(k)][rem % nk];
      rem /= nk;
    }
    w[idx] = g.weight(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
  }
  kron_lu_solve(lu, w, false);
  return BasisSpace(dirs, std::move(w), SpaceRole::trial);
}

BasisSpace polynomial_part(const BasisSpace& space) {
  return BasisSpace(space.directions(), {}, space.role());
}

BasisSpace make_interpolation_space(const GeometryMap& g, const BasisSpace& trial,
                                    InterpContinuity continuity) {
  if (continuity == InterpContinuity::automatic) {
    throw ParameterError("make_interpolation_space: resolve the continuity first");
  }
  std::vector<KnotVector> dirs;
  for (int k = 0; k < trial.dim(); ++k) {
    const auto& kv = trial.direction(k);
    const int p = kv.degree();
    const auto br = kv.breaks();
    const auto geom_c0 = g.c0_breaks(k);
    std::vector<int> mult;
    for (std::size_t i = 1; i + 1 < br.size(); ++i) {
      if (contains(geom_c0, br[i])) {
        mult.push_back(p + 1);
      } else {
        mult.push_back(continuity == InterpContinuity::c0 ? p : 1);
      }
    }
    dirs.push_back(KnotVector::from_breaks(p, br, mult));
  }
  return BasisSpace(std::move(dirs), {}, SpaceRole::interpolation);
}

std::vector<int> uniform_elements(int dim, int elements) {
  return std::vector<int>(static_cast<std::size_t>(dim), elements);
}

}  // namespace klexpand
