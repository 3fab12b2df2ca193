#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "torquant/toric.hpp"

using namespace torquant;

namespace {

std::shared_ptr<const LatticePolytope> unit_interval() {
  return std::make_shared<const LatticePolytope>(
      1, std::vector<std::vector<Rational>>{{Rational(0)}, {Rational(1)}});
}

std::shared_ptr<const LatticePolytope> unit_triangle() {
  return std::make_shared<const LatticePolytope>(
      2, std::vector<std::vector<Rational>>{
             {Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
}

// Smooth strictly convex potential with gradient image (0, 1): the soft-plus
// model phi(x) = log(1 + e^{2x}) / 2. Its conjugate on [0, 1] is the binary
// entropy g(t) = (t log t + (1 - t) log(1 - t)) / 2.
double softplus_potential(double x) {
  return x > 0.0 ? x + 0.5 * std::log1p(std::exp(-2.0 * x)) : 0.5 * std::log1p(std::exp(2.0 * x));
}

double binary_entropy_half(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 0.5 * (t * std::log(t) + (1.0 - t) * std::log(1.0 - t));
}

GridFunction sample_on(const Box& b, const std::function<double(double)>& f,
                       std::shared_ptr<const LatticePolytope> p) {
  return GridFunction(b, GridFunction::sample(b, f).values(), std::move(p));
}

GridFunction sample2_on(const Box& b, const std::function<double(double, double)>& f,
                        std::shared_ptr<const LatticePolytope> p) {
  return GridFunction(b, GridFunction::sample2(b, f).values(), std::move(p));
}

} // namespace

TEST_CASE("lattice polytopes enumerate dilate points in lexicographic order") {
  const auto seg = unit_interval();
  const auto pts1 = seg->lattice_points(3);
  REQUIRE(pts1.size() == 4);
  for (long long i = 0; i < 4; ++i) CHECK(pts1[i] == Label{i});
  CHECK(seg->volume() == 1.0);

  const auto tri = unit_triangle();
  const auto pts2 = tri->lattice_points(2);
  const std::vector<Label> expected = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
  REQUIRE(pts2 == expected);

  // Dilates of the unit triangle: n_k = (k+1)(k+2)/2, so 2 n_k / k^2 walks
  // down to twice the area as 1 + 3/k + 2/k^2.
  for (long long k = 1; k <= 8; ++k) {
    const auto pts = tri->lattice_points(k);
    CHECK(pts.size() == std::size_t((k + 1) * (k + 2) / 2));
    const double ratio = 2.0 * double(pts.size()) / double(k * k);
    CHECK(ratio == Catch::Approx(1.0 + 3.0 / k + 2.0 / (k * k)).margin(1e-12));
    CHECK(std::is_sorted(pts.begin(), pts.end()));
  }
  CHECK(tri->volume_rational() == Rational(1, 2));

  // Rational vertices: counts follow the floor of the dilation factor.
  const LatticePolytope half(2, {{Rational(0), Rational(0)},
                                 {Rational(3, 2), Rational(0)},
                                 {Rational(0), Rational(3, 2)}});
  CHECK(half.volume_rational() == Rational(9, 8));
  for (long long k = 1; k <= 4; ++k) {
    const long long m = (3 * k) / 2;
    CHECK(half.lattice_points(k).size() == std::size_t((m + 1) * (m + 2) / 2));
  }
  CHECK(half.bounds(0).second == Rational(3, 2));

  // Hull construction is insensitive to vertex order, duplicates, and
  // interior points.
  const LatticePolytope scrambled(2, {{Rational(0), Rational(1)},
                                      {Rational(1), Rational(0)},
                                      {Rational(1, 4), Rational(1, 4)},
                                      {Rational(0), Rational(0)},
                                      {Rational(0), Rational(1)}});
  CHECK(scrambled.vertices() == tri->vertices());
  CHECK(scrambled.volume_rational() == Rational(1, 2));

  const double inside[2] = {0.25, 0.25};
  const double outside[2] = {0.8, 0.8};
  CHECK(tri->contains_point(inside, 1e-12));
  CHECK_FALSE(tri->contains_point(outside, 1e-12));
}

TEST_CASE("polytope construction rejects degenerate input and checks facet data") {
  using VV = std::vector<std::vector<Rational>>;
  CHECK_THROWS_AS(LatticePolytope(1, VV{{Rational(2)}, {Rational(2)}}), validation_error);
  CHECK_THROWS_AS(LatticePolytope(2, VV{{Rational(0), Rational(0)},
                                        {Rational(1), Rational(1)},
                                        {Rational(2), Rational(2)}}),
                  validation_error);
  CHECK_THROWS_AS(LatticePolytope(2, VV{{Rational(0), Rational(0)}, {Rational(1), Rational(0)}}),
                  validation_error);
  CHECK_THROWS_AS(LatticePolytope(3, VV{{Rational(0), Rational(0), Rational(0)}}),
                  validation_error);
  CHECK_THROWS_AS(unit_interval()->lattice_points(0), validation_error);

  // Facet data is accepted up to positive scaling and order, rejected when it
  // describes a different polytope.
  const VV tri_v = {{Rational(0), Rational(0)}, {Rational(1), Rational(0)},
                    {Rational(0), Rational(1)}};
  const std::vector<HalfSpace> good = {{2, 2, Rational(2)}, {-1, 0, Rational(0)},
                                       {0, -3, Rational(0)}};
  CHECK_NOTHROW(LatticePolytope(2, tri_v, good));
  const std::vector<HalfSpace> bad = {{1, 1, Rational(2)}, {-1, 0, Rational(0)},
                                      {0, -1, Rational(0)}};
  CHECK_THROWS_AS(LatticePolytope(2, tri_v, bad), validation_error);
}

TEST_CASE("grid functions interpolate affinely and certify convexity") {
  CHECK_THROWS_AS(Box::interval(0.0, 1.0, 1), validation_error);
  CHECK_THROWS_AS(Box::interval(1.0, 1.0, 8), validation_error);
  CHECK_THROWS_AS(GridFunction(Box::interval(0.0, 1.0, 4), {1.0, 2.0}), validation_error);
  CHECK_THROWS_AS(GridFunction(Box::interval(0.0, 1.0, 2), {1.0, kInf}), validation_error);
  CHECK_THROWS_AS(GridFunction(Box::rect(0, 1, 4, 0, 1, 4), std::vector<double>(16, 0.0),
                               unit_interval()),
                  validation_error);

  const Box b1 = Box::interval(0.0, 1.0, 5);
  const auto lin = GridFunction::sample(b1, [](double x) { return 2.0 * x + 1.0; });
  CHECK(lin.eval(0.3) == Catch::Approx(1.6).margin(1e-15));
  CHECK(lin.eval(-5.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(lin.eval(9.0) == Catch::Approx(3.0).margin(1e-15));

  const Box b2 = Box::rect(0.0, 1.0, 9, 0.0, 2.0, 17);
  const auto aff = GridFunction::sample2(b2, [](double x, double y) { return 3.0 + 2.0 * x - y; });
  CHECK(aff.at(2, 3) == Catch::Approx(3.0 + 2.0 * 0.25 - 0.375).margin(1e-14));
  CHECK(aff.eval(0.31, 0.77) == Catch::Approx(3.0 + 2.0 * 0.31 - 0.77).margin(1e-13));

  const Box s = Box::interval(-1.0, 1.0, 65);
  CHECK_NOTHROW(ConvexGridFunction(GridFunction::sample(s, [](double x) { return x * x; })));
  CHECK_THROWS_AS(ConvexGridFunction(GridFunction::sample(s, [](double x) { return -x * x; })),
                  validation_error);

  const Box s2 = Box::rect(-1, 1, 33, -1, 1, 33);
  CHECK_NOTHROW(ConvexGridFunction(
      GridFunction::sample2(s2, [](double x, double y) { return x * x + y * y; })));
  CHECK_THROWS_AS(ConvexGridFunction(
                      GridFunction::sample2(s2, [](double x, double y) { return x * x - y * y; })),
                  validation_error);
  // The saddle x*y is flat along both axes; only the diagonal checks see it.
  CHECK_THROWS_AS(
      ConvexGridFunction(GridFunction::sample2(s2, [](double x, double y) { return x * y; })),
      validation_error);
}

TEST_CASE("legendre transform reproduces closed forms for convex potentials") {
  // Quadratic: x^2/2 is self-dual.
  {
    const Box b = Box::interval(-3.0, 3.0, 2049);
    const auto f = GridFunction::sample(b, [](double x) { return 0.5 * x * x; });
    const auto p = std::make_shared<const LatticePolytope>(
        1, std::vector<std::vector<Rational>>{{Rational(-1)}, {Rational(1)}});
    const auto g = discrete_legendre(f, p, {257, 0});
    for (int q = 0; q < 257; ++q) {
      const double xi = g.box().node(0, q);
      CHECK(g.at(q) == Catch::Approx(0.5 * xi * xi).margin(1e-5));
    }
  }

  // Soft-plus: conjugate is the halved binary entropy on [0, 1].
  {
    const Box b = Box::interval(-8.0, 8.0, 2048);
    const auto f = GridFunction::sample(b, softplus_potential);
    const auto g = discrete_legendre(f, unit_interval(), {2049, 0});
    REQUIRE(g.box().res[0] == 2049);
    CHECK(g.box().node(0, 1024) == Catch::Approx(0.5).margin(1e-15));
    CHECK(g.at(1024) == Catch::Approx(-0.5 * std::log(2.0)).margin(1e-5));
    for (int q = 0; q < 2049; ++q) {
      const double xi = g.box().node(0, q);
      if (xi < 0.05 || xi > 0.95) continue;
      CHECK(g.at(q) == Catch::Approx(binary_entropy_half(xi)).margin(1e-5));
    }

    // Transforming back gives a convex minorant that matches the original
    // potential away from the saturated tails.
    const auto back = conjugate_back_1d(g, b);
    for (int i = 0; i < b.res[0]; ++i) {
      CHECK(back.at(i) <= f.at(i) + 1e-9);
      if (std::abs(b.node(0, i)) <= 4.0) {
        CHECK(back.at(i) == Catch::Approx(f.at(i)).margin(1e-4));
      }
    }
  }
}

TEST_CASE("legendre transform of an affine potential is finite only at its slope") {
  const Box b = Box::interval(-4.0, 4.0, 513);
  const auto f = GridFunction::sample(b, [](double x) { return 2.0 * x + 3.0; });
  const auto p = std::make_shared<const LatticePolytope>(
      1, std::vector<std::vector<Rational>>{{Rational(3, 2)}, {Rational(5, 2)}});
  // Every source node ties at the exact slope; the plateau must not be
  // mistaken for an escaping supremum.
  const auto g = discrete_legendre(f, p, {3, 0});
  CHECK(g.at(1) == Catch::Approx(-3.0).margin(1e-12));
  // Off-slope targets clip at the box edge: value (t - 2) * x_edge - 3.
  CHECK(g.at(0) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(g.at(2) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("legendre transform flags slope targets the box cannot certify") {
  // x^2 sampled on [-1, 1] only reaches slopes in (-2, 2): asking for the
  // transform deep into [-4, 4] must fail loudly.
  const Box small = Box::interval(-1.0, 1.0, 257);
  const auto f = GridFunction::sample(small, [](double x) { return x * x; });
  const auto p = std::make_shared<const LatticePolytope>(
      1, std::vector<std::vector<Rational>>{{Rational(-4)}, {Rational(4)}});
  CHECK_THROWS_AS(discrete_legendre(f, p, {65, 0}), slope_coverage_error);

  // A box wide enough to realize every requested slope succeeds, and the
  // values agree with the closed form xi^2/4.
  const Box wide = Box::interval(-5.0, 5.0, 1281);
  const auto f2 = GridFunction::sample(wide, [](double x) { return x * x; });
  const auto g = discrete_legendre(f2, p, {65, 0});
  for (int q = 0; q < 65; ++q) {
    const double xi = g.box().node(0, q);
    CHECK(g.at(q) == Catch::Approx(0.25 * xi * xi).margin(1e-4));
  }
}

TEST_CASE("legendre transform is order reversing") {
  const Box b = Box::interval(-8.0, 8.0, 1024);
  const auto f1 = GridFunction::sample(b, softplus_potential);
  const auto f2 = GridFunction::sample(b, [](double x) {
    return softplus_potential(x) + 0.1 + 0.05 * std::cos(3.0 * x);
  });
  const auto g1 = discrete_legendre(f1, unit_interval(), {513, 0});
  const auto g2 = discrete_legendre(f2, unit_interval(), {513, 0});
  for (int q = 0; q < 513; ++q) CHECK(g2.at(q) <= g1.at(q) + 1e-12);
}

TEST_CASE("double transform recovers the convex envelope of a double well") {
  const Box b = Box::interval(-2.0, 2.0, 4001);
  auto well = [](double x) {
    const double a = (x + 1.0) * (x + 1.0), c = (x - 1.0) * (x - 1.0);
    return std::min(a, c);
  };
  const auto f = GridFunction::sample(b, well);

  // The envelope fills the well: 0 on [-1, 1], untouched outside.
  const auto env = convex_envelope(f);
  for (int i = 0; i < b.res[0]; ++i) {
    const double x = b.node(0, i);
    const double want = std::abs(x) <= 1.0 ? 0.0 : (std::abs(x) - 1.0) * (std::abs(x) - 1.0);
    CHECK(env.values()[i] == Catch::Approx(want).margin(1e-12));
  }

  // Conjugating twice through the slope polytope [-2, 2] lands on the same
  // envelope up to the slope-grid resolution.
  const auto p = std::make_shared<const LatticePolytope>(
      1, std::vector<std::vector<Rational>>{{Rational(-2)}, {Rational(2)}});
  const auto g = discrete_legendre(f, p, {2049, 0});
  const auto back = conjugate_back_1d(g, b);
  for (int i = 0; i < b.res[0]; ++i) {
    CHECK(back.at(i) <= f.at(i) + 1e-9);
    CHECK(back.at(i) == Catch::Approx(env.values()[i]).margin(5e-3));
  }
}

TEST_CASE("convex envelope is idempotent, monotone, contractive, and fixes convex data") {
  const Box b = Box::interval(-2.0, 2.0, 801);
  const auto f = GridFunction::sample(b, [](double x) {
    return std::min((x + 1.0) * (x + 1.0), (x - 1.0) * (x - 1.0));
  });
  const auto env = convex_envelope(f);
  const auto env2 = convex_envelope(env.grid());
  for (int i = 0; i < b.res[0]; ++i) {
    CHECK(env2.values()[i] == Catch::Approx(env.values()[i]).margin(1e-14));
  }

  const auto f2 = GridFunction::sample(b, [](double x) {
    return std::min((x + 1.0) * (x + 1.0), (x - 1.0) * (x - 1.0)) + 0.2 * std::sin(5.0 * x) + 0.2;
  });
  const auto envf2 = convex_envelope(f2);
  double sup_ff2 = 0.0, sup_env = 0.0;
  for (int i = 0; i < b.res[0]; ++i) {
    CHECK(envf2.values()[i] >= env.values()[i] - 1e-12);   // f2 >= f
    sup_ff2 = std::max(sup_ff2, std::abs(f2.at(i) - f.at(i)));
    sup_env = std::max(sup_env, std::abs(envf2.values()[i] - env.values()[i]));
  }
  CHECK(sup_env <= sup_ff2 + 1e-12);

  const auto conv = GridFunction::sample(Box::interval(-3.0, 3.0, 513),
                                         [](double x) { return 0.5 * x * x; });
  const auto envc = convex_envelope(conv);
  for (int i = 0; i < 513; ++i) {
    CHECK(envc.values()[i] == Catch::Approx(conv.at(i)).margin(1e-14));
  }
}

TEST_CASE("2-d convex envelope handles separable wells and fixes convex data") {
  const Box b = Box::rect(-2.0, 2.0, 129, -2.0, 2.0, 129);
  const auto f = GridFunction::sample2(b, [](double x, double y) {
    const double w = (x * x - 1.0) * (x * x - 1.0);
    return w + y * y;
  });
  const auto env = convex_envelope(f);   // certification must pass
  const auto env1 = convex_envelope(
      GridFunction::sample(Box::interval(-2.0, 2.0, 129),
                           [](double x) { return (x * x - 1.0) * (x * x - 1.0); }));
  for (int i = 0; i < 129; ++i) {
    for (int j = 0; j < 129; ++j) CHECK(env.values()[std::size_t(i) * 129 + j] <= f.at(i, j) + 1e-9);
    // Center line y = 0: the x-well fills in just like its 1-D envelope.
    CHECK(env.grid().at(i, 64) == Catch::Approx(env1.values()[i]).margin(0.05));
  }

  const auto conv = GridFunction::sample2(b, [](double x, double y) {
    return 0.5 * (x * x + y * y);
  });
  const auto envc = convex_envelope(conv);
  for (int i = 0; i < 129; ++i) {
    for (int j = 0; j < 129; ++j) {
      CHECK(envc.grid().at(i, j) == Catch::Approx(conv.at(i, j)).margin(2e-3));
    }
  }
}

TEST_CASE("2-d legendre transform matches the separable closed form") {
  const Box b = Box::rect(-3.0, 3.0, 257, -3.0, 3.0, 257);
  const auto f = GridFunction::sample2(b, [](double x, double y) {
    return 0.5 * (x * x + y * y);
  });
  const auto square = std::make_shared<const LatticePolytope>(
      2, std::vector<std::vector<Rational>>{{Rational(-1), Rational(-1)},
                                            {Rational(1), Rational(-1)},
                                            {Rational(1), Rational(1)},
                                            {Rational(-1), Rational(1)}});
  const auto g = discrete_legendre(f, square, {65, 65});
  for (int i = 0; i < 65; ++i) {
    for (int j = 0; j < 65; ++j) {
      const double xi = g.box().node(0, i), eta = g.box().node(1, j);
      CHECK(g.at(i, j) == Catch::Approx(0.5 * (xi * xi + eta * eta)).margin(1e-3));
    }
  }

  // Too-small source box: slopes past 1 are never realized, so a transform
  // onto [-4, 4]^2 must refuse.
  const Box tiny = Box::rect(-1.0, 1.0, 65, -1.0, 1.0, 65);
  const auto ft = GridFunction::sample2(tiny, [](double x, double y) {
    return x * x + y * y;
  });
  const auto bigsq = std::make_shared<const LatticePolytope>(
      2, std::vector<std::vector<Rational>>{{Rational(-4), Rational(-4)},
                                            {Rational(4), Rational(-4)},
                                            {Rational(4), Rational(4)},
                                            {Rational(-4), Rational(4)}});
  CHECK_THROWS_AS(discrete_legendre(ft, bigsq, {33, 33}), slope_coverage_error);
}

TEST_CASE("measures integrate polynomials exactly and compare through their cdfs") {
  CHECK_THROWS_AS(Measure1D({}, {0.0, 0.0}, {1.0}), validation_error);
  CHECK_THROWS_AS(Measure1D({}, {0.0, 1.0}, {-0.5}), validation_error);
  CHECK_THROWS_AS(Measure1D({}, {0.0, 1.0}, {1.0, 2.0}), validation_error);

  const auto delta = Measure1D::point_mass(0.7, 1.0);
  CHECK(delta.is_probability());
  CHECK(delta.moment(1) == Catch::Approx(0.7).margin(1e-15));
  CHECK(delta.moment(2) == Catch::Approx(0.49).margin(1e-15));
  CHECK(delta.cdf(0.69) == 0.0);
  CHECK(delta.cdf(0.7) == 1.0);

  const Measure1D uniform({}, {0.0, 1.0}, {1.0});
  CHECK(uniform.moment(1) == Catch::Approx(0.5).margin(1e-15));
  CHECK(uniform.moment(2) == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(uniform.cdf(0.25) == Catch::Approx(0.25).margin(1e-15));

  // Transport distances with pencil-and-paper values.
  CHECK(Measure1D::cdf_l1_distance(Measure1D::point_mass(0.0, 1.0),
                                   Measure1D::point_mass(0.7, 1.0)) ==
        Catch::Approx(0.7).margin(1e-15));
  CHECK(Measure1D::cdf_l1_distance(uniform, Measure1D::point_mass(0.5, 1.0)) ==
        Catch::Approx(0.25).margin(1e-15));
  const Measure1D shifted({}, {0.5, 1.5}, {1.0});
  CHECK(Measure1D::cdf_l1_distance(uniform, shifted) == Catch::Approx(0.5).margin(1e-15));
  // The difference of these cdfs crosses zero inside a segment.
  const Measure1D narrow({}, {0.25, 0.75}, {1.0});
  CHECK(Measure1D::cdf_l1_distance(uniform, narrow) == Catch::Approx(0.125).margin(1e-15));
}

TEST_CASE("curvature measures: smooth density, kink atom, normalization, affine invariance") {
  // Quadratic: uniform density, total mass = slope range.
  {
    const Box b = Box::interval(-1.0, 1.0, 4097);
    const double h = b.step(0);
    const auto m = ma_measure_1d(
        ConvexGridFunction(GridFunction::sample(b, [](double x) { return 0.5 * x * x; })));
    CHECK(m.atoms().empty());
    CHECK(std::abs(m.total_mass() - 2.0) < 1e-3);
    CHECK(m.total_mass() == Catch::Approx(2.0 - h).margin(1e-9));
    const auto& masses = m.bin_masses();
    for (std::size_t i = 1; i + 1 < masses.size(); ++i) {
      CHECK(masses[i] == Catch::Approx(h).margin(1e-9));
    }
  }

  // Kink: all the curvature sits in one atom of mass = slope jump.
  {
    const Box b = Box::interval(-1.0, 1.0, 4097);
    const auto m =
        ma_measure_1d(ConvexGridFunction(GridFunction::sample(b, [](double x) { return std::abs(x); })));
    REQUIRE(m.atoms().size() == 1);
    CHECK(m.atoms()[0].first == Catch::Approx(0.0).margin(1e-15));
    CHECK(m.atoms()[0].second == Catch::Approx(2.0).margin(1e-12));
    CHECK(m.total_mass() == Catch::Approx(2.0).margin(1e-12));
    for (double bm : m.bin_masses()) CHECK(bm == Catch::Approx(0.0).margin(1e-12));
  }

  // Soft-plus curvature is a probability measure up to the saturated tails.
  {
    const Box b = Box::interval(-8.0, 8.0, 2048);
    const auto m = ma_measure_1d(ConvexGridFunction(GridFunction::sample(b, softplus_potential)));
    CHECK(m.atoms().empty());
    CHECK(std::abs(m.total_mass() - 1.0) < 1e-6);
  }

  // Adding an affine function leaves the curvature untouched.
  {
    const Box b = Box::interval(-1.0, 1.0, 1025);
    const auto m1 = ma_measure_1d(
        ConvexGridFunction(GridFunction::sample(b, [](double x) { return 0.5 * x * x; })));
    const auto m2 = ma_measure_1d(ConvexGridFunction(
        GridFunction::sample(b, [](double x) { return 0.5 * x * x + 3.0 * x - 2.0; })));
    CHECK(m1.total_mass() == Catch::Approx(m2.total_mass()).margin(1e-12));
    REQUIRE(m1.bin_masses().size() == m2.bin_masses().size());
    for (std::size_t i = 0; i < m1.bin_masses().size(); ++i) {
      CHECK(m1.bin_masses()[i] == Catch::Approx(m2.bin_masses()[i]).margin(1e-12));
    }
  }

  CHECK_THROWS_AS(
      ma_measure_1d(ConvexGridFunction(GridFunction::sample2(
          Box::rect(0, 1, 8, 0, 1, 8), [](double x, double y) { return x * x + y * y; }))),
      validation_error);
}

TEST_CASE("path distances: closed forms, metric axioms, growth in p") {
  const auto p = unit_interval();
  const Box b = Box::interval(0.0, 1.0, 2049);
  const GridFunction g0(b, std::vector<double>(2049, 0.0), p);
  const auto g1 = sample_on(b, [](double xi) { return xi; }, p);

  CHECK(mabuchi_dp(g0, g1, 1.0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(mabuchi_dp(g0, g1, 2.0) == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-6));
  CHECK(mabuchi_dp(g0, g1, kInf) == Catch::Approx(1.0).margin(0.0));

  // Constant shifts have the same size in every p.
  const auto gc = sample_on(b, [](double) { return -0.75; }, p);
  for (double q : {1.0, 2.0, 3.5, kInf}) {
    CHECK(mabuchi_dp(g0, gc, q) == Catch::Approx(0.75).margin(1e-12));
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Box small = Box::interval(0.0, 1.0, 33);
  auto randf = [&] {
    std::vector<double> v(33);
    for (auto& x : v) x = u(rng);
    return GridFunction(small, std::move(v));
  };
  const auto a = randf(), c = randf(), d = randf();
  for (double q : {1.0, 2.0, 3.0, kInf}) {
    CHECK(mabuchi_dp(a, c, q) == mabuchi_dp(c, a, q));
    CHECK(mabuchi_dp(a, a, q) == 0.0);
    CHECK(mabuchi_dp(a, d, q) <= mabuchi_dp(a, c, q) + mabuchi_dp(c, d, q) + 1e-12);
  }
  CHECK(mabuchi_dp(a, c, 1.0) <= mabuchi_dp(a, c, 2.0) + 1e-12);
  CHECK(mabuchi_dp(a, c, 2.0) <= mabuchi_dp(a, c, kInf) + 1e-12);

  CHECK_THROWS_AS(mabuchi_dp(a, c, 0.5), validation_error);
  CHECK_THROWS_AS(mabuchi_dp(g0, a, 1.0), validation_error);   // different grids
  const GridFunction with_poly(small, a.values(), unit_interval());
  CHECK_THROWS_AS(mabuchi_dp(with_poly, c, 1.0), validation_error);   // domain mismatch
}

TEST_CASE("path distance agrees with the curvature-weighted gradient route") {
  // Translating the potential adds a linear term to its transform. The L^p
  // size of that change, measured with uniform weight on the slope interval,
  // must match the x-side p-mean of the displacement weighted by the
  // curvature measure: the curvature is exactly the Jacobian of the gradient
  // change of variables.
  const Box b = Box::interval(-8.0, 8.0, 2048);
  const auto phi = GridFunction::sample(b, softplus_potential);
  const auto p = unit_interval();
  const auto g0 = discrete_legendre(phi, p, {2049, 0});
  std::vector<double> shifted(g0.values());
  for (int q = 0; q < 2049; ++q) shifted[q] += 0.6 * g0.box().node(0, q);
  const GridFunction g1(g0.box(), std::move(shifted), g0.polytope());

  const auto curv = ma_measure_1d(ConvexGridFunction(phi));
  const double h = b.step(0);
  for (double q : {1.0, 2.0}) {
    double num = 0.0, den = 0.0;
    for (int i = 1; i + 1 < b.res[0]; ++i) {
      const double slope_mid = (phi.at(i + 1) - phi.at(i - 1)) / (2.0 * h);
      const double mass = curv.bin_masses()[i];
      num += mass * std::pow(std::abs(0.6 * slope_mid), q);
      den += mass;
    }
    const double via_curvature = std::pow(num / den, 1.0 / q);
    const double via_slopes = mabuchi_dp(g0, g1, q);
    CHECK(via_slopes == Catch::Approx(0.6 / std::pow(q + 1.0, 1.0 / q)).margin(1e-4));
    CHECK(via_curvature == Catch::Approx(via_slopes).margin(1e-3));
  }
}

TEST_CASE("pushforward distributions: point mass, uniform law, affine mean on a triangle") {
  const Box b = Box::interval(0.0, 1.0, 33);
  const auto flat = GridFunction::sample(b, [](double) { return 2.5; });
  const auto pm = pushforward(flat, 16);
  REQUIRE(pm.atoms().size() == 1);
  CHECK(pm.is_probability());
  CHECK(pm.moment(1) == Catch::Approx(2.5).margin(1e-12));

  const Box bu = Box::interval(0.0, 1.0, 2049);
  const auto id = sample_on(bu, [](double xi) { return xi; }, unit_interval());
  const auto law = pushforward(id, 512);
  CHECK(law.is_probability(1e-12));
  for (int m = 1; m <= 4; ++m) {
    CHECK(law.moment(m) == Catch::Approx(1.0 / (m + 1.0)).margin(1e-3));
  }

  const auto tri = unit_triangle();
  const Box bt = Box::rect(0.0, 1.0, 129, 0.0, 1.0, 129);
  const auto aff = sample2_on(bt, [](double x, double y) { return 1.0 + x + y; }, tri);
  const auto lawt = pushforward(aff, 512);
  CHECK(lawt.is_probability(1e-12));
  CHECK(lawt.moment(1) == Catch::Approx(5.0 / 3.0).margin(2e-3));

  CHECK_THROWS_AS(pushforward(flat, 0), validation_error);
}

TEST_CASE("energy difference is linear in shifts and matches d1 on ordered pairs") {
  const Box b = Box::interval(0.0, 1.0, 257);
  const auto g0 = GridFunction::sample(b, [](double x) { return std::sin(3.0 * x); });
  const auto g1 = GridFunction::sample(b, [](double x) { return std::sin(3.0 * x) + 0.4; });
  CHECK(energy_difference(g0, g1) == Catch::Approx(0.4).margin(1e-14));
  CHECK(energy_difference(g0, g0) == 0.0);

  const auto ordered = GridFunction::sample(b, [](double x) {
    return std::sin(3.0 * x) + std::abs(std::cos(7.0 * x));
  });
  CHECK(energy_difference(g0, ordered) == Catch::Approx(mabuchi_dp(g0, ordered, 1.0)).margin(1e-13));

  // 2-D affine data over a triangle: the clipped-cell rule integrates it
  // exactly, so the mean is the value at the centroid.
  const auto tri = unit_triangle();
  const Box bt = Box::rect(0.0, 1.0, 129, 0.0, 1.0, 129);
  const GridFunction z2(bt, std::vector<double>(129 * 129, 0.0), tri);
  const auto aff = sample2_on(bt, [](double x, double y) { return 1.0 + x + y; }, tri);
  CHECK(energy_difference(z2, aff) == Catch::Approx(5.0 / 3.0).margin(1e-10));
  CHECK(mabuchi_dp(z2, aff, 1.0) == Catch::Approx(5.0 / 3.0).margin(1e-10));
  // The sup of 1 + x + y over the triangle is 2, approached by cell centroids.
  const double dinf = mabuchi_dp(z2, aff, kInf);
  CHECK(dinf <= 2.0 + 1e-12);
  CHECK(dinf >= 2.0 - 0.05);
}

TEST_CASE("domain quadrature integrates affine functions exactly over clipped cells") {
  const auto tri = unit_triangle();
  const Box bt = Box::rect(0.0, 1.0, 129, 0.0, 1.0, 129);
  const GridFunction z(bt, std::vector<double>(129 * 129, 0.0), tri);
  const auto q = domain_quadrature(z);
  double area = 0.0, ix = 0.0;
  for (const auto& pt : q) {
    area += pt.w;
    ix += pt.w * pt.x;
  }
  CHECK(area == Catch::Approx(0.5).margin(1e-10));
  CHECK(ix == Catch::Approx(1.0 / 6.0).margin(1e-10));

  const auto half = std::make_shared<const LatticePolytope>(
      2, std::vector<std::vector<Rational>>{{Rational(0), Rational(0)},
                                            {Rational(3, 2), Rational(0)},
                                            {Rational(0), Rational(3, 2)}});
  const Box bh = Box::rect(0.0, 1.5, 97, 0.0, 1.5, 97);
  const GridFunction zh(bh, std::vector<double>(97 * 97, 0.0), half);
  double area_h = 0.0, ix_h = 0.0;
  for (const auto& pt : domain_quadrature(zh)) {
    area_h += pt.w;
    ix_h += pt.w * pt.x;
  }
  CHECK(area_h == Catch::Approx(9.0 / 8.0).margin(1e-10));
  CHECK(ix_h == Catch::Approx(9.0 / 16.0).margin(1e-10));

  // 1-D: composite trapezoid over the grid.
  const auto q1 = domain_quadrature(GridFunction::sample(Box::interval(0.0, 2.0, 65),
                                                         [](double) { return 0.0; }));
  double len = 0.0;
  for (const auto& pt : q1) len += pt.w;
  CHECK(len == Catch::Approx(2.0).margin(1e-14));
}
