#include <gtest/gtest.h>

#include <set>

#include "common/commands.hpp"
#include "common/png_io.hpp"
#include "common/rng.hpp"
#include "support/expect_error.hpp"
#include "support/temp_dir.hpp"

using namespace fusiondrive;

TEST(Commands, BranchIndexRoundTrip) {
  for (int i = 0; i < kNumNavCommands; ++i) {
    const NavCommand c = nav_command_from_index(i);
    EXPECT_EQ(branch_index(c), i);
    EXPECT_EQ(nav_command_from_string(to_string(c)), c);
  }
  EXPECT_FALSE(nav_command_from_string("reverse").has_value());
  EXPECT_FD_ERROR(nav_command_from_index(4), ErrorCode::kUnknownCommand);
  EXPECT_FD_ERROR(nav_command_from_index(-1), ErrorCode::kUnknownCommand);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformIntCoversRangeOnly) {
  Rng rng(7);
  std::set<int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const int64_t v = rng.uniform_int(-2, 3);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 3);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, MixSeedSeparatesStreams) {
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(1, 2, 4));
  EXPECT_EQ(mix_seed(5, 6, 7), mix_seed(mix_seed(5, 6), 7));
}

TEST(Png, RoundTrip8And16Bit) {
  fdtest::TempDir dir;
  Raster<uint8_t> rgb(7, 5, 3);
  Raster<uint8_t> gray(7, 5, 1);
  Raster<uint16_t> deep(7, 5, 1);
  for (size_t i = 0; i < rgb.data.size(); ++i) rgb.data[i] = static_cast<uint8_t>(i * 37);
  for (size_t i = 0; i < gray.data.size(); ++i) gray.data[i] = static_cast<uint8_t>(i);
  for (size_t i = 0; i < deep.data.size(); ++i) deep.data[i] = static_cast<uint16_t>(i * 1871);
  write_png(dir / "rgb.png", rgb);
  write_png(dir / "gray.png", gray);
  write_png16(dir / "deep.png", deep);
  EXPECT_EQ(read_png(dir / "rgb.png"), rgb);
  EXPECT_EQ(read_png(dir / "gray.png"), gray);
  EXPECT_EQ(read_png16(dir / "deep.png"), deep);
}

TEST(Png, MissingFileIsIoError) {
  fdtest::TempDir dir;
  EXPECT_FD_ERROR(read_png(dir / "nope.png"), ErrorCode::kIo);
}
