#pragma once
#include <complex>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qcavity/errors.hpp"

namespace qcavity {

using cxd = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<cxd>;

// Truncated single-mode Fock space holding levels |0> .. |n_max-1>.
struct FockSpace {
  int n_max;
  explicit FockSpace(int n) : n_max(n) {
    if (n < 2) throw InvalidInput("FockSpace: need n_max >= 2, got " + std::to_string(n));
  }
  int dim() const { return n_max; }
};

// field-only operators, n_max x n_max
SparseCd annihilation_op(const FockSpace& f);
SparseCd creation_op(const FockSpace& f);
SparseCd number_op(const FockSpace& f);

// Operators on the tripartite space atom1 (x) atom2 (x) field.
// Index layout: idx = (a1*2 + a2)*n_max + n with atom levels e=0, g=1,
// so the atomic pair blocks are ordered {ee, eg, ge, gg}.
enum class Op {
  Annihilation,
  Creation,
  Number,
  Identity,
  SigmaMinus,  // |g><e| on the selected atom
  SigmaPlus,   // |e><g|
  SigmaX,      // |e><g| + |g><e|
  SigmaZ,      // |e><e| - |g><g|
};

// atom = 1 or 2 for the sigma kinds, ignored (pass 0) otherwise
SparseCd build_operator(Op kind, const FockSpace& f, int atom = 0);

inline int tripartite_dim(const FockSpace& f) { return 4 * f.n_max; }

// Truncated coherent state, renormalized to unit norm. norm_deficit is the
// probability weight lost beyond the cutoff before renormalization.
struct CoherentState {
  Eigen::VectorXcd vec;
  double norm_deficit;
};
CoherentState coherent_state(cxd alpha, const FockSpace& f);

}  // namespace qcavity
