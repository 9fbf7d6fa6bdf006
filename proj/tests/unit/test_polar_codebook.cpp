// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hmb/fresnel.hpp"
#include "hmb/polar_codebook.hpp"

using namespace hmb;

namespace {

const ArrayConfig& desk() {
  static const ArrayConfig c = ArrayConfig::half_wavelength(4, 32, 28e9);
  return c;
}

const SingleBeamCodebook& desk_cb() {
  static const SingleBeamCodebook cb = build_codebook(desk(), {});
  return cb;
}

// Visible grid points counted by hand: odd numerators |2t - N - 1| <= N sin(phi).
std::size_t count_visible(int M, int N) {
  std::size_t n = 0;
  for (int s = 1; s <= M; ++s) {
    const double w = (2.0 * s - M - 1) / M;
    const double lim = N * std::sqrt(1 - w * w);
    for (int k = -(N - 1); k <= N - 1; k += 2)
      if (std::abs(k) <= lim + 1e-9) ++n;
  }
  return n;
}

} // namespace

TEST_CASE("angular grid holds only visible directions") {
  const auto g = angular_grid(desk());
  CHECK(g.size() == 104);
  CHECK(g.size() == count_visible(4, 32));
  CHECK(angular_grid(ArrayConfig::half_wavelength(8, 16, 28e9)).size() == count_visible(8, 16));
  for (const AnglePair& a : g) CHECK(a.u * a.u + a.cos_phi * a.cos_phi <= 1.0 + 1e-12);
}

TEST_CASE("desk codebook size and distance range") {
  const SingleBeamCodebook& cb = desk_cb();
  CHECK(cb.size() == 168);
  CHECK(cb.zeta == doctest::Approx(1.556219456148528).epsilon(1e-7));
  CHECK(cb.r_min == doctest::Approx(0.4298177753981005));
  CHECK(cb.r_max == doctest::Approx(5.567574219999999));
  std::set<std::pair<int, int>> dirs;
  for (const SamplingPoint& p : cb.points) {
    dirs.insert({p.phi_index, p.u_index});
    if (p.ring_index == 0) {
      CHECK(is_far_field(p.r));
    } else {
      CHECK(p.r >= cb.r_min);
      CHECK(p.r <= cb.r_max);
      CHECK(p.spacing.curvature / p.r == doctest::Approx(p.ring_index * p.spacing.step));
    }
  }
  CHECK(dirs.size() == 104);
  for (const CVec& row : cb.rows) CHECK(norm(row) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rings are ordered outward to inward") {
  const AnglePair broadside{0.25, 1.0 / 32, 2, 16};
  const auto rings = distance_rings(broadside, 1.556219456148528, desk(), 0.01, 1e9);
  CHECK_THROWS_AS(distance_rings(broadside, 1.5, desk(), 0.0, 1e9), std::domain_error);
  CHECK(rings.front().index == 0);
  for (std::size_t i = 2; i < std::min<std::size_t>(rings.size(), 50); ++i) CHECK(rings[i].r < rings[i - 1].r);
  // Ring radii r_j = curvature / (j step)
  const RingSpacing sp = ring_spacing(broadside, 1.556219456148528, desk(), RingAxis::x);
  const double step = 2 * desk().wavelength * 1.556219456148528 * 1.556219456148528 / std::pow(32 * desk().d_x, 2);
  CHECK(sp.step == doctest::Approx(step));
  CHECK(sp.curvature == doctest::Approx(1 - 1.0 / 1024));
  CHECK(distance_rings({0.0, 1.0, 0, 0}, 1.5, desk(), 0.1, 10, RingAxis::x).size() == 1);
}

TEST_CASE("automatic axis keeps the denser ring set") {
  for (const AnglePair& a : angular_grid(desk())) {
    const auto x = distance_rings(a, 1.5, desk(), 0.43, 5.57, RingAxis::x);
    const auto z = distance_rings(a, 1.5, desk(), 0.43, 5.57, RingAxis::z);
    const auto aut = distance_rings(a, 1.5, desk(), 0.43, 5.57, RingAxis::automatic);
    CHECK(aut.size() == std::max(x.size(), z.size()));
  }
}

TEST_CASE("far-field grid rows are mutually orthogonal") {
  const SingleBeamCodebook dft = dft_codebook(desk());
  CHECK(dft.size() == 104);
  CHECK(coherence(dft) < 1e-10);
  CHECK(same_direction_coherence(dft) == 0.0);
  CodebookOptions far;
  far.far_field_only = true;
  const SingleBeamCodebook ff = build_codebook(desk(), far);
  CHECK(ff.size() == 104);
  for (std::size_t s = 0; s < ff.size(); ++s)
    for (std::size_t i = 0; i < ff.rows[s].size(); ++i) CHECK(std::abs(ff.rows[s][i] - dft.rows[s][i]) < 1e-12);
}

TEST_CASE("coherence follows the threshold") {
  const SingleBeamCodebook& cb = desk_cb();
  const double eta = coherence(cb);
  CHECK(eta == doctest::Approx(0.531003).epsilon(1e-4));
  const double same = same_direction_coherence(cb);
  CHECK(same <= 0.55);
  CHECK(same >= 0.45);
  CHECK(eta >= same);
  // Gram matrix entries are symmetric with a unit diagonal.
  for (std::size_t p = 0; p < cb.size(); p += 7) {
    CHECK(projection(cb, p, p) == doctest::Approx(1.0));
    for (std::size_t q = 0; q < cb.size(); q += 11) CHECK(projection(cb, p, q) == doctest::Approx(projection(cb, q, p)));
  }
  CHECK_THROWS_AS(projection(cb, 0, cb.size()), std::out_of_range);
}

TEST_CASE("adjacent rings of one direction project close to the Fresnel envelope") {
  const SingleBeamCodebook& cb = desk_cb();
  int checked = 0;
  for (std::size_t s = 0; s + 1 < cb.size(); ++s) {
    const SamplingPoint& a = cb.points[s];
    const SamplingPoint& b = cb.points[s + 1];
    if (!a.same_direction(b)) continue;
    CHECK(projection(cb, s, s + 1) == doctest::Approx(fresnel_envelope(cb.zeta)).epsilon(0.15));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("smaller threshold gives more codewords") {
  CodebookOptions a, b;
  a.delta = 0.3;
  b.delta = 0.7;
  const std::size_t na = build_codebook(desk(), a).size();
  const std::size_t nb = build_codebook(desk(), b).size();
  CHECK(na <= desk_cb().size());
  CHECK(nb >= desk_cb().size());
  CHECK_THROWS(build_codebook(desk(), CodebookOptions{0.5, -1.0}));
}

TEST_CASE("best codeword recovers a codebook point") {
  const SingleBeamCodebook& cb = desk_cb();
  for (std::size_t s = 0; s < cb.size(); s += 5) {
    if (cb.points[s].ring_index == 0) continue;
    const ChannelRealization ch = los_channel(desk(), cb.points[s].polar(), 1e-7);
    CHECK(best_codeword(cb, ch.h) == s);
  }
}

TEST_CASE("codebook text round trip") {
  const SingleBeamCodebook& cb = desk_cb();
  std::stringstream ss;
  write_codebook(ss, cb);
  const SingleBeamCodebook back = read_codebook(ss);
  REQUIRE(back.size() == cb.size());
  CHECK(back.delta == cb.delta);
  for (std::size_t s = 0; s < cb.size(); ++s) {
    CHECK(back.points[s].ring_index == cb.points[s].ring_index);
    CHECK(back.points[s].u_index == cb.points[s].u_index);
    CHECK((back.points[s].r == cb.points[s].r || (is_far_field(back.points[s].r) && is_far_field(cb.points[s].r))));
    for (std::size_t i = 0; i < cb.rows[s].size(); ++i) CHECK(back.rows[s][i] == cb.rows[s][i]);
  }
  std::istringstream bad("4 32 1 1 1 0.5 3\n0 0 0 inf 1 0\n");
  CHECK_THROWS(read_codebook(bad));
}
