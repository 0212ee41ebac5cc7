// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_BASIS_HPP_
#define WPTBEAM_BASIS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "wptbeam/complexmath.hpp"

namespace wptbeam {

// Orthonormal probing basis; columns[i] is the i-th probe direction.
struct OrthonormalBasis {
  int n = 0;
  std::vector<cvec> columns;
};

// Columns of the unitary DFT matrix, entry exp(-2*pi*j*k*i/n)/sqrt(n).
OrthonormalBasis dft_basis(int n);

OrthonormalBasis identity_basis(int n);

// Loads an n x 2n numeric CSV: row k holds re/im interleaved entries of the
// k-th component across all n columns. Validates orthonormality.
OrthonormalBasis basis_from_csv(const std::string& path);

// Throws if any Gram entry deviates from the identity by more than tol,
// naming the offending column pair.
void validate_orthonormal(const OrthonormalBasis& basis, double tol = 1e-10);

// Basis columns and strengths sorted by descending strength (stable on
// ties). Returns the permutation: order[i] is the original column index now
// at position i.
struct ReorderedBasis {
  OrthonormalBasis basis;
  std::vector<double> taus;
  std::vector<int> order;
};
ReorderedBasis reorder_basis_descending(const OrthonormalBasis& basis,
                                  const std::vector<double>& taus);

}  // namespace wptbeam

#endif  // WPTBEAM_BASIS_HPP_
