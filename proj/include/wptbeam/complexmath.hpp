// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_COMPLEXMATH_HPP_
#define WPTBEAM_COMPLEXMATH_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "wptbeam/errors.hpp"

namespace wptbeam {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;

// Hermitian inner product <a, b> = sum conj(a_k) * b_k.
inline cxd inner(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) {
    throw shape_error("inner: size mismatch " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
  cxd acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

inline double squared_norm(const cvec& a) {
  double acc = 0.0;
  for (const cxd& v : a) acc += std::norm(v);
  return acc;
}

inline double norm(const cvec& a) { return std::sqrt(squared_norm(a)); }

inline cvec scaled(const cvec& a, cxd s) {
  cvec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
  return out;
}

// a * sa + b * sb, elementwise.
inline cvec combined(const cvec& a, cxd sa, const cvec& b, cxd sb) {
  if (a.size() != b.size()) {
    throw shape_error("combined: size mismatch " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
  cvec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = sa * a[k] + sb * b[k];
  return out;
}

inline cvec normalized(const cvec& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw parameter_error("normalized: zero vector");
  cvec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] / n;
  return out;
}

}  // namespace wptbeam

#endif  // WPTBEAM_COMPLEXMATH_HPP_
