#include <gtest/gtest.h>

#include "neutroseg/errors.hpp"
#include "neutroseg/phantom.hpp"

using namespace neutroseg;

TEST(Phantom, BandsAndBoundaries) {
  PhantomSpec s;
  s.rows = 100;
  s.cols = 20;
  s.ilm_row = 10;
  s.rpe_row = 40;
  s.rpe_thickness = 4;
  s.choroid_thickness = 25;
  const Phantom p = make_phantom(s);
  for (std::size_t c = 0; c < 20; ++c) {
    EXPECT_EQ(p.rpe.rows[c], 41);
    EXPECT_EQ(p.choroid.rows[c], 66);
    EXPECT_EQ(p.image.pixels(5, c), s.vitreous_level);
    EXPECT_EQ(p.image.pixels(20, c), s.retina_level);
    EXPECT_EQ(p.image.pixels(37, c), s.rpe_level);
    EXPECT_EQ(p.image.pixels(40, c), s.rpe_level);
    EXPECT_EQ(p.image.pixels(41, c), s.choroid_level);
    EXPECT_EQ(p.image.pixels(65, c), s.choroid_level);
    EXPECT_EQ(p.image.pixels(66, c), s.sclera_level);
    EXPECT_LT(p.image.pixels(99, c), s.sclera_level);
  }
  EXPECT_EQ(p.rpe.layer, Layer::kRpe);
  EXPECT_EQ(p.choroid.layer, Layer::kChoroid);
}

TEST(Phantom, SlopesFollowTheLine) {
  PhantomSpec s;
  s.cols = 101;
  s.rpe_slope = 0.1;
  s.choroid_slope = -0.02;
  const Phantom p = make_phantom(s);
  EXPECT_EQ(p.rpe.rows[100], p.rpe.rows[0] + 10);
  EXPECT_EQ(p.choroid.rows[100] - p.rpe.rows[100], p.choroid.rows[0] - p.rpe.rows[0] - 2);
}

TEST(Phantom, VesselsStayInsideTheChoroid) {
  PhantomSpec s = random_phantom_spec(17, true);
  s.noise_sigma = 0;
  const Phantom p = make_phantom(s);
  std::size_t dark = 0;
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.cols; ++c) {
      const int row = static_cast<int>(r);
      // Vitreous shares the vessel level; only look below the ILM.
      if (row < s.ilm_row + s.rpe_slope * static_cast<double>(c)) continue;
      if (p.image.pixels(r, c) != s.vessel_level) continue;
      ++dark;
      EXPECT_GT(row, p.rpe.rows[c] - 1);
      EXPECT_LT(row, p.choroid.rows[c] - 1);
    }
  }
  EXPECT_GT(dark, 1000u);
}

TEST(Phantom, SeededAndClamped) {
  const PhantomSpec s = random_phantom_spec(5, true);
  const Phantom a = make_phantom(s);
  EXPECT_EQ(a.image.pixels, make_phantom(s).image.pixels);
  EXPECT_GE(a.image.pixels.min(), 0.0);
  EXPECT_LE(a.image.pixels.max(), 255.0);
  EXPECT_NE(a.image.pixels, make_phantom(random_phantom_spec(6, true)).image.pixels);
}

TEST(Phantom, RandomSpecRanges) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PhantomSpec s = random_phantom_spec(seed, seed % 2 == 0);
    EXPECT_LE(std::abs(s.rpe_slope), 0.1);
    EXPECT_LE(std::abs(s.rpe_slope + s.choroid_slope), 0.1);
    EXPECT_LE(s.noise_sigma, 8.0);
    EXPECT_GT(s.noise_sigma, 0.0);
    EXPECT_EQ(s.vessel_count > 0, seed % 2 == 0);
    const double end = s.rpe_row + s.rpe_slope * static_cast<double>(s.cols - 1);
    EXPECT_GE(std::min(s.rpe_row, end), 200.0 - 1e-9);
    EXPECT_LE(std::max(s.rpe_row, end), 290.0 + 1e-9);
  }
}

TEST(Phantom, Errors) {
  PhantomSpec s;
  s.rows = 2;
  EXPECT_THROW(make_phantom(s), DimensionError);
  s = {};
  s.rpe_thickness = 0;
  EXPECT_THROW(make_phantom(s), ParameterError);
}
