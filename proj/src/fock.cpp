#include "qcavity/fock.hpp"

#include <cmath>
#include <vector>

#include "qcavity/model.hpp"

namespace qcavity {

void ModelParams::validate() const {
  auto bad = [](double x) { return !std::isfinite(x); };
  if (bad(g) || bad(k) || bad(gamma) || bad(omega) || bad(delta))
    throw InvalidInput("ModelParams: non-finite parameter");
  if (g <= 0.0) throw InvalidInput("ModelParams: coupling g must be > 0");
  if (k <= 0.0) throw InvalidInput("ModelParams: cavity decay k must be > 0");
  if (gamma < 0.0) throw InvalidInput("ModelParams: gamma must be >= 0");
  if (omega < 0.0) throw InvalidInput("ModelParams: omega must be >= 0");
}

int ModelParams::default_n_max() const {
  const double a = std::abs(alpha_ss());
  return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
}

SparseCd annihilation_op(const FockSpace& f) {
  SparseCd a(f.n_max, f.n_max);
  std::vector<Eigen::Triplet<cxd>> t;
  t.reserve(f.n_max - 1);
  for (int n = 1; n < f.n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseCd creation_op(const FockSpace& f) { return annihilation_op(f).adjoint(); }

SparseCd number_op(const FockSpace& f) {
  SparseCd num(f.n_max, f.n_max);
  std::vector<Eigen::Triplet<cxd>> t;
  t.reserve(f.n_max);
  for (int n = 1; n < f.n_max; ++n) t.emplace_back(n, n, double(n));
  num.setFromTriplets(t.begin(), t.end());
  return num;
}

namespace {

// 2x2 single-atom matrices in the {e, g} ordering
Eigen::Matrix2cd atom_matrix(Op kind) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (kind) {
    case Op::SigmaMinus: m(1, 0) = 1.0; break;
    case Op::SigmaPlus: m(0, 1) = 1.0; break;
    case Op::SigmaX: m(0, 1) = m(1, 0) = 1.0; break;
    case Op::SigmaZ: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: break;
  }
  return m;
}

bool is_atomic(Op kind) {
  return kind == Op::SigmaMinus || kind == Op::SigmaPlus || kind == Op::SigmaX ||
         kind == Op::SigmaZ;
}

}  // namespace

SparseCd build_operator(Op kind, const FockSpace& f, int atom) {
  const int n = f.n_max;
  const int dim = 4 * n;
  SparseCd out(dim, dim);
  std::vector<Eigen::Triplet<cxd>> t;

  if (is_atomic(kind)) {
    if (atom != 1 && atom != 2)
      throw InvalidInput("build_operator: atom index must be 1 or 2 for sigma operators");
    const Eigen::Matrix2cd m = atom_matrix(kind);
    // pair index p = a1*2 + a2; the sigma acts on one factor, identity elsewhere
    for (int p = 0; p < 4; ++p) {
      const int a1 = p / 2, a2 = p % 2;
      for (int b = 0; b < 2; ++b) {
        cxd v;
        int q;
        if (atom == 1) {
          v = m(b, a1);
          q = b * 2 + a2;
        } else {
          v = m(b, a2);
          q = a1 * 2 + b;
        }
        if (v == cxd(0.0)) continue;
        for (int nn = 0; nn < n; ++nn) t.emplace_back(q * n + nn, p * n + nn, v);
      }
    }
  } else {
    switch (kind) {
      case Op::Annihilation:
        for (int p = 0; p < 4; ++p)
          for (int nn = 1; nn < n; ++nn)
            t.emplace_back(p * n + nn - 1, p * n + nn, std::sqrt(double(nn)));
        break;
      case Op::Creation:
        for (int p = 0; p < 4; ++p)
          for (int nn = 1; nn < n; ++nn)
            t.emplace_back(p * n + nn, p * n + nn - 1, std::sqrt(double(nn)));
        break;
      case Op::Number:
        for (int p = 0; p < 4; ++p)
          for (int nn = 1; nn < n; ++nn) t.emplace_back(p * n + nn, p * n + nn, double(nn));
        break;
      case Op::Identity:
        for (int i = 0; i < dim; ++i) t.emplace_back(i, i, 1.0);
        break;
      default:
        break;
    }
  }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

CoherentState coherent_state(cxd alpha, const FockSpace& f) {
  Eigen::VectorXcd v(f.n_max);
  // c_0 = e^{-|a|^2/2}, c_{n+1} = c_n a / sqrt(n+1); stable for any sane alpha
  cxd c = std::exp(cxd(-0.5 * std::norm(alpha), 0.0));
  double kept = 0.0;
  for (int n = 0; n < f.n_max; ++n) {
    v[n] = c;
    kept += std::norm(c);
    c *= alpha / std::sqrt(double(n + 1));
  }
  const double deficit = std::max(0.0, 1.0 - kept);
  if (kept <= 0.0)
    throw NumericalGuard("coherent_state: amplitude too large for the truncation");
  v /= std::sqrt(kept);
  return {std::move(v), deficit};
}

}  // namespace qcavity
