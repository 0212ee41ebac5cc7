// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "wptbeam/basis.hpp"
#include "wptbeam/channel.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/rng.hpp"

using namespace wptbeam;

namespace {
std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path;
}
}  // namespace

TEST_CASE("unitary transform columns are orthonormal") {
  for (int n : {2, 5, 10, 16}) {
    const OrthonormalBasis b = dft_basis(n);
    REQUIRE(b.n == n);
    REQUIRE(static_cast<int>(b.columns.size()) == n);
    CHECK_NOTHROW(validate_orthonormal(b, 1e-10));
  }
  CHECK_THROWS_AS(dft_basis(0), parameter_error);
}

TEST_CASE("projections conserve the squared norm") {
  for (int n : {5, 10}) {
    const OrthonormalBasis b = dft_basis(n);
    ChannelParams p;
    p.n_antennas = n;
    const ChannelVector h = sample_channel(p, 77);
    double sum = 0.0;
    for (const cvec& q : b.columns) {
      const double tau = std::abs(inner(q, h));
      sum += tau * tau;
    }
    CHECK(sum == doctest::Approx(squared_norm(h)).epsilon(1e-12));
  }
}

TEST_CASE("identity basis picks out single components") {
  const OrthonormalBasis b = identity_basis(4);
  CHECK_NOTHROW(validate_orthonormal(b, 0.0));
  const ChannelVector h = {cxd(1, 2), cxd(3, -1), cxd(0, 0), cxd(-2, 0.5)};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(inner(b.columns[i], h) - h[i]) < 1e-15);
  }
}

TEST_CASE("orthonormality validation catches defects") {
  OrthonormalBasis b = dft_basis(3);
  b.columns[1][0] *= 1.001;  // break the norm
  CHECK_THROWS_AS(validate_orthonormal(b, 1e-10), parameter_error);
  OrthonormalBasis short_col = dft_basis(3);
  short_col.columns[2].pop_back();
  CHECK_THROWS_AS(validate_orthonormal(short_col, 1e-10), shape_error);
}

TEST_CASE("basis round-trips through CSV") {
  const OrthonormalBasis b = dft_basis(3);
  std::string csv;
  char buf[64];
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 3; ++c) {
      const cxd v = b.columns[c][k];
      std::snprintf(buf, sizeof(buf), "%s%.17g,%.17g", c == 0 ? "" : ",",
                    v.real(), v.imag());
      csv += buf;
    }
    csv += "\n";
  }
  const std::string path = write_temp("basis_roundtrip.csv", csv);
  const OrthonormalBasis loaded = basis_from_csv(path);
  REQUIRE(loaded.n == 3);
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(loaded.columns[c][k] - b.columns[c][k]) < 1e-15);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("CSV loader rejects malformed input") {
  CHECK_THROWS_AS(basis_from_csv("/tmp/definitely_missing_basis.csv"),
                  file_error);
  const std::string empty = write_temp("basis_empty.csv", "");
  CHECK_THROWS_AS(basis_from_csv(empty), file_error);
  const std::string ragged =
      write_temp("basis_ragged.csv", "1,0,0,0\n0,0\n");
  CHECK_THROWS_AS(basis_from_csv(ragged), file_error);
  const std::string text =
      write_temp("basis_text.csv", "1,0,frog,0\n0,0,1,0\n");
  CHECK_THROWS_AS(basis_from_csv(text), file_error);
  // Numerically fine but not orthonormal.
  const std::string skew =
      write_temp("basis_skew.csv", "1,0,1,0\n0,0,1,0\n");
  CHECK_THROWS_AS(basis_from_csv(skew), parameter_error);
  for (const std::string& p : {empty, ragged, text, skew}) {
    std::remove(p.c_str());
  }
}

TEST_CASE("strength reordering is stable and permutation-consistent") {
  const OrthonormalBasis b = identity_basis(5);
  const std::vector<double> taus = {0.3, 0.8, 0.3, 0.9, 0.1};
  const ReorderedBasis r = reorder_basis_descending(b, taus);
  CHECK(r.order == std::vector<int>{3, 1, 0, 2, 4});  // ties keep 0 before 2
  CHECK(r.taus == std::vector<double>{0.9, 0.8, 0.3, 0.3, 0.1});
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 5; ++k) {
      CHECK(r.basis.columns[i][k] == b.columns[r.order[i]][k]);
    }
  }
  CHECK_THROWS_AS(reorder_basis_descending(b, {1.0, 2.0}), shape_error);
}
