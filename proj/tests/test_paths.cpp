#include <cmath>
#include <random>

#include "doctest.h"
#include "regions/error.hpp"
#include "regions/paths.hpp"

using namespace regions;

namespace {

Tensor random_image(std::mt19937_64& rng, std::uint64_t c, std::uint64_t h, std::uint64_t w) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Tensor t({c, h, w});
  for (double& v : t.values) v = dist(rng);
  return t;
}

double px(const Tensor& t, std::size_t c, std::size_t y, std::size_t x) {
  return t.values[(c * t.dims[1] + y) * t.dims[2] + x];
}

}  // namespace

TEST_CASE("circular shift positions") {
  const auto [dx, dy] = circular_shift(4.0, 8, 2);
  CHECK(std::abs(dx) <= 1e-15);
  CHECK(dy == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(circular_shift(4.0, 8, 0) == std::pair<double, double>{4.0, 0.0});
  CHECK_THROWS_AS(circular_shift(1.0, 0, 0), InputError);
}

TEST_CASE("translation") {
  std::mt19937_64 rng(51);
  const auto img = random_image(rng, 2, 9, 11);

  SUBCASE("zero shift is the identity") {
    CHECK(bit_equal(translate_image(img, 0.0, 0.0, 4).values, img.values));
  }
  SUBCASE("integer shifts move the interior exactly") {
    const auto out = translate_image(img, 2.0, -1.0, 4);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t y = 0; y + 1 < 9; ++y) {
        for (std::size_t x = 2; x < 11; ++x) CHECK(px(out, c, y, x) == px(img, c, y + 1, x - 2));
      }
    }
  }
  SUBCASE("reflection at the border") {
    const auto out = translate_image(img, 1.0, 0.0, 1);
    for (std::size_t y = 0; y < 9; ++y) CHECK(px(out, 0, y, 0) == px(img, 0, y, 1));
  }
  SUBCASE("half-pixel shift averages neighbours") {
    const auto out = translate_image(img, 0.5, 0.0, 1);
    CHECK(px(out, 1, 3, 5) == doctest::Approx(0.5 * (px(img, 1, 3, 4) + px(img, 1, 3, 5))).epsilon(1e-15));
  }
  SUBCASE("constant images stay constant") {
    Tensor flat({1, 5, 5}, std::vector<double>(25, 0.7));
    const auto out = translate_image(flat, 1.3, -2.6, 3);
    for (double v : out.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("shift beyond the pad") {
    CHECK_THROWS_AS(translate_image(img, 4.5, 0.0, 4), InputError);
    CHECK_THROWS_AS(translate_image(img, 0.0, NAN, 4), InputError);
  }
  SUBCASE("shape checks") {
    CHECK_THROWS_AS(translate_image(Tensor({4, 4}), 0.0, 0.0, 1), InputError);
  }
}

TEST_CASE("normalization") {
  Tensor img({2, 1, 2}, {1.0, 3.0, 10.0, 20.0});
  const auto out = normalize_image(img, {{2.0, 10.0}, {1.0, 5.0}});
  CHECK(out.values == std::vector<double>{-1.0, 1.0, 0.0, 2.0});
  CHECK_THROWS_AS(normalize_image(img, {{0.0}, {1.0}}), InputError);
  CHECK_THROWS_AS(normalize_image(img, {{0.0, 0.0}, {1.0, 0.0}}), InputError);

  std::mt19937_64 rng(52);
  std::vector<Tensor> imgs{random_image(rng, 2, 8, 8)};
  CircularPathOptions options;
  options.normalization = Normalization{{0.5, 0.5}, {0.25, 0.25}};
  const auto paths = build_circular_paths(imgs, options);
  const auto moved = translate_image(imgs[0], 0.0, 4.0, 4);
  CHECK(std::abs(paths[0].anchors[2].values[9] - (moved.values[9] - 0.5) / 0.25) <= 1e-12);
}

TEST_CASE("circular paths") {
  std::mt19937_64 rng(53);
  std::vector<Tensor> imgs{random_image(rng, 3, 8, 8), random_image(rng, 3, 8, 8),
                           random_image(rng, 3, 8, 8)};
  const auto paths = build_circular_paths(imgs);
  REQUIRE(paths.size() == 3);
  CHECK(paths[1].path_id == 1);
  CHECK(paths[0].anchor_count() == 8);
  CHECK(paths[0].closed);
  CHECK(paths[0].segments().back() == std::pair<std::size_t, std::size_t>{7, 0});
  CHECK(segment_tasks(paths).size() == 24);
  const auto tasks = segment_tasks(paths);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    CHECK(tasks[i].segment_id == i);
    CHECK(tasks[i].path_id == i / 8);
  }
  // the last segment returns to the first anchor
  CHECK(bit_equal(tasks[7].x1, paths[0].anchors[0].values));

  CircularPathOptions two;
  two.anchors = 2;
  CHECK(build_circular_paths(imgs, two)[0].segments().size() == 2);
  two.anchors = 1;
  CHECK_THROWS_AS(build_circular_paths(imgs, two), InputError);
  CHECK_THROWS_AS(build_circular_paths(std::vector<Tensor>{}), InputError);

  CircularPathOptions tight;
  tight.pad = 2;
  CHECK_THROWS_AS(build_circular_paths(imgs, tight), InputError);
  CHECK(CircularPathOptions{}.effective_pad() == 4);
  CircularPathOptions frac;
  frac.radius = 2.5;
  CHECK(frac.effective_pad() == 3);
}

TEST_CASE("degenerate loops are dropped") {
  std::vector<Tensor> imgs{Tensor({1, 4, 4}, std::vector<double>(16, 1.0))};
  CHECK(build_circular_paths(imgs).empty());
}

TEST_CASE("noise paths") {
  Tensor mean({1, 6, 6}, std::vector<double>(36, 0.5));
  Tensor stddev({1, 6, 6}, std::vector<double>(36, 0.2));
  const auto a = build_noise_paths(mean, stddev, 4, 7);
  const auto b = build_noise_paths(mean, stddev, 4, 7);
  const auto c = build_noise_paths(mean, stddev, 4, 8);
  REQUIRE(a.size() == 4);
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t k = 0; k < 8; ++k) CHECK(bit_equal(a[p].anchors[k].values, b[p].anchors[k].values));
  }
  CHECK_FALSE(bit_equal(a[0].anchors[0].values, c[0].anchors[0].values));
  const double bound = std::sqrt(3.0) * 0.2 + 1e-12;
  for (const auto& path : a) {
    for (double v : path.anchors[0].values) CHECK(std::abs(v - 0.5) <= bound);
  }

  Tensor zero({1, 6, 6}, std::vector<double>(36, 0.0));
  CHECK(build_noise_paths(mean, zero, 3, 7).empty());
  CHECK(build_noise_paths(mean, stddev, 0, 7).empty());
  CHECK_THROWS_AS(build_noise_paths(mean, Tensor({1, 5, 5}), 1, 7), InputError);
}

TEST_CASE("noise paths match the requested moments") {
  Tensor mean({1, 16, 16}, std::vector<double>(256, 0.3));
  Tensor stddev({1, 16, 16}, std::vector<double>(256, 0.1));
  CircularPathOptions options;
  options.anchors = 2;
  double sum = 0.0, sq = 0.0, n = 0.0;
  options.radius = 1.0;
  const auto moved = build_noise_paths(mean, stddev, 200, 11, options);
  for (const auto& p : moved) {
    for (double v : p.anchors[0].values) {
      sum += v;
      sq += v * v;
      n += 1.0;
    }
  }
  const double m = sum / n;
  const double sd = std::sqrt(sq / n - m * m);
  CHECK(std::abs(m - 0.3) < 0.002);
  CHECK(std::abs(sd - 0.1) < 0.002);
}

TEST_CASE("open paths") {
  std::mt19937_64 rng(54);
  std::vector<Tensor> imgs{random_image(rng, 1, 8, 8)};
  const auto two = build_open_paths(imgs, 1, 2);
  REQUIRE(two.size() == 1);
  CHECK_FALSE(two[0].closed);
  CHECK(two[0].segments().size() == 1);
  const auto four = build_open_paths(imgs, 2, 4);
  CHECK(four[0].segments().size() == 3);
  CHECK(bit_equal(four[0].anchors[3].values, translate_image(imgs[0], 6.0, 0.0, 6).values));
  CHECK(bit_equal(four[0].anchors[0].values, imgs[0].values));
  CHECK_THROWS_AS(build_open_paths(imgs, 0, 2), InputError);
  CHECK_THROWS_AS(build_open_paths(imgs, 1, 1), InputError);
}

TEST_CASE("point loops") {
  const std::vector<std::vector<double>> pts{{1.0, 2.0}, {-1.0, 0.0, 5.0}};
  const auto loops = build_point_loops(pts, 0.5, 4);
  REQUIRE(loops.size() == 2);
  CHECK(loops[0].anchors[0].values == std::vector<double>{1.5, 2.0});
  CHECK(loops[1].anchors[1].values[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(loops[1].anchors[1].values[2] == 5.0);
  CHECK(loops[1].anchors[1].dims == std::vector<std::uint64_t>{3});
  CHECK(segment_tasks(loops).size() == 8);
  CHECK_THROWS_AS(build_point_loops(pts, 0.0, 4), InputError);
  CHECK_THROWS_AS(build_point_loops(std::vector<std::vector<double>>{{1.0}}, 1.0, 4), InputError);
}
