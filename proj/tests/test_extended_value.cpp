#include <catch2/catch_amalgamated.hpp>

#include "kinld/extended_value.hpp"
#include "kinld/grid.hpp"

using kinld::ExtendedValue;

TEST_CASE("infinity absorbs addition and is the identity of min") {
  const ExtendedValue inf = ExtendedValue::infinity();
  const ExtendedValue a = ExtendedValue::finite(1.5);
  CHECK(!(inf + a).is_finite());
  CHECK(!(a + inf).is_finite());
  CHECK(min(inf, a) == a);
  CHECK(min(a, inf) == a);
  CHECK(min(inf, inf) == inf);
  CHECK((a + a).value() == 3.0);
}

TEST_CASE("ordering treats infinity as the top element") {
  const ExtendedValue inf = ExtendedValue::infinity();
  const ExtendedValue a = ExtendedValue::finite(-2.0);
  CHECK(a < inf);
  CHECK(!(inf < a));
  CHECK(!(inf < inf));
  CHECK(inf <= inf);
  CHECK(inf == inf);
  CHECK(a <= ExtendedValue::finite(-2.0));
}

TEST_CASE("velocity grids must carry the zero node") {
  CHECK_NOTHROW(kinld::VelocityGrid(-2.0, 2.0, 5));
  CHECK_THROWS_AS(kinld::VelocityGrid(-2.0, 2.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(kinld::VelocityGrid(0.5, 2.0, 4), std::invalid_argument);
  const auto g = kinld::VelocityGrid::centered(3.0, 7);
  CHECK(g.node(g.zero_index()) == 0.0);
}

TEST_CASE("conservative interpolation snaps nodes and propagates infinity") {
  kinld::MinPlusField1 f{kinld::SpatialGrid(0.0, 1.0, 3)};
  f.at(0) = ExtendedValue::finite(0.0);
  f.at(1) = ExtendedValue::infinity();
  f.at(2) = ExtendedValue::finite(2.0);

  CHECK(interp(f, 0.0).value() == 0.0);
  CHECK(interp(f, 1.0 - 1e-13).value() == 2.0);    // snapped onto the node
  CHECK(!interp(f, 0.5 + 1e-13).is_finite());      // snapped onto the infinite node
  CHECK(!interp(f, 0.25).is_finite());             // interval with an infinite end
  CHECK(!interp(f, -0.1).is_finite());             // outside the grid
  CHECK(!interp(f, 0.75).is_finite());

  f.at(1) = ExtendedValue::finite(1.0);
  CHECK(interp(f, 0.25).value() == Catch::Approx(0.5).margin(1e-15));
  CHECK(interp(f, 0.75).value() == Catch::Approx(1.5).margin(1e-15));
}
