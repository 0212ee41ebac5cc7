// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wptbeam/errors.hpp"

namespace wptbeam {

OrthonormalBasis dft_basis(int n) {
  if (n < 1) throw parameter_error("dft_basis: n must be >= 1");
  OrthonormalBasis basis;
  basis.n = n;
  basis.columns.assign(static_cast<std::size_t>(n),
                       cvec(static_cast<std::size_t>(n)));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double phase = -2.0 * std::numbers::pi *
                           static_cast<double>(k) * static_cast<double>(i) /
                           static_cast<double>(n);
      basis.columns[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          {scale * std::cos(phase), scale * std::sin(phase)};
    }
  }
  validate_orthonormal(basis);
  return basis;
}

OrthonormalBasis identity_basis(int n) {
  if (n < 1) throw parameter_error("identity_basis: n must be >= 1");
  OrthonormalBasis basis;
  basis.n = n;
  basis.columns.assign(static_cast<std::size_t>(n),
                       cvec(static_cast<std::size_t>(n), {0.0, 0.0}));
  for (int i = 0; i < n; ++i) {
    basis.columns[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = {
        1.0, 0.0};
  }
  return basis;
}

OrthonormalBasis basis_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("basis_from_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() &&
            cell.find_first_not_of(" \t", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
        row.push_back(v);
      } catch (const std::exception&) {
        throw file_error("basis_from_csv: " + path + " line " +
                         std::to_string(line_no) + ": bad number '" + cell +
                         "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw file_error("basis_from_csv: " + path + " is empty");
  const std::size_t n = rows.size();
  OrthonormalBasis basis;
  basis.n = static_cast<int>(n);
  basis.columns.assign(n, cvec(n));
  for (std::size_t k = 0; k < n; ++k) {
    if (rows[k].size() != 2 * n) {
      throw file_error("basis_from_csv: " + path + " row " +
                       std::to_string(k + 1) + " has " +
                       std::to_string(rows[k].size()) + " values, expected " +
                       std::to_string(2 * n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      basis.columns[i][k] = {rows[k][2 * i], rows[k][2 * i + 1]};
    }
  }
  validate_orthonormal(basis);
  return basis;
}

void validate_orthonormal(const OrthonormalBasis& basis, double tol) {
  const std::size_t n = basis.columns.size();
  if (basis.n < 1 || n != static_cast<std::size_t>(basis.n)) {
    throw shape_error("validate_orthonormal: inconsistent column count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (basis.columns[i].size() != n) {
      throw shape_error("validate_orthonormal: column " + std::to_string(i) +
                        " has length " +
                        std::to_string(basis.columns[i].size()) +
                        ", expected " + std::to_string(n));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const cxd g = inner(basis.columns[i], basis.columns[j]);
      const double expect = (i == j) ? 1.0 : 0.0;
      const double dev = std::abs(g - cxd{expect, 0.0});
      if (dev > tol) {
        throw parameter_error(
            "basis is not orthonormal: columns " + std::to_string(i) +
            " and " + std::to_string(j) + " deviate by " +
            std::to_string(dev));
      }
    }
  }
}

ReorderedBasis reorder_basis_descending(const OrthonormalBasis& basis,
                                  const std::vector<double>& taus) {
  if (taus.size() != basis.columns.size()) {
    throw shape_error("reorder_basis_descending: " + std::to_string(taus.size()) +
                      " strengths for " + std::to_string(basis.columns.size()) +
                      " columns");
  }
  std::vector<int> order(taus.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return taus[static_cast<std::size_t>(a)] >
           taus[static_cast<std::size_t>(b)];
  });
  ReorderedBasis out;
  out.basis.n = basis.n;
  out.basis.columns.reserve(taus.size());
  out.taus.reserve(taus.size());
  for (int idx : order) {
    out.basis.columns.push_back(basis.columns[static_cast<std::size_t>(idx)]);
    out.taus.push_back(taus[static_cast<std::size_t>(idx)]);
  }
  out.order = std::move(order);
  return out;
}

}  // namespace wptbeam
