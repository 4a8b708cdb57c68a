#include <gtest/gtest.h>

#include <fstream>

#include "model/checkpoint.hpp"
#include "model/driving_net.hpp"
#include "support/expect_error.hpp"
#include "support/gradcheck.hpp"
#include "support/temp_dir.hpp"

using namespace fusiondrive;
using namespace fusiondrive::model;

namespace {

template <typename T>
Tensor<T> random_input(const ModelConfig& c, int n, uint64_t seed) {
  Rng rng(seed);
  Tensor<T> x(n, c.input_channels, c.input_size, c.input_size);
  fdtest::fill_uniform(x, rng, 0.0, 1.0);
  return x;
}

std::vector<NavCommand> mixed_commands(int n) {
  std::vector<NavCommand> out;
  for (int i = 0; i < n; ++i) out.push_back(nav_command_from_index(i % kNumNavCommands));
  return out;
}

template <typename T>
void expect_simplex(const Tensor<T>& probs, double tol) {
  for (int i = 0; i < probs.n; ++i)
    for (int y = 0; y < probs.h; ++y)
      for (int x = 0; x < probs.w; ++x) {
        double s = 0.0;
        for (int c = 0; c < probs.c; ++c) {
          ASSERT_GE(probs.at(i, c, y, x), 0);
          s += probs.at(i, c, y, x);
        }
        ASSERT_NEAR(s, 1.0, tol);
      }
}

}  // namespace

TEST(ModelConfig, DeskDefaultIsValidAndSmall) {
  const ModelConfig c = desk_config();
  EXPECT_NO_THROW(c.validate());
  DrivingNet<float> net(c);
  EXPECT_LE(net.parameter_count(), 200000u);
  EXPECT_EQ(c.decoder_strides, (std::vector<int>{4, 2, 2, 2, 1}));
  EXPECT_EQ(c.decoder_filters.back(), 5);
}

TEST(ModelConfig, RejectsBrokenContracts) {
  ModelConfig c = desk_config();
  c.input_size = 100;
  EXPECT_FD_ERROR(c.validate(), ErrorCode::kConfig);
  c = desk_config();
  c.decoder_strides = {2, 2, 2, 2, 1};
  EXPECT_FD_ERROR(c.validate(), ErrorCode::kConfig);
  c = desk_config();
  c.decoder_filters.back() = 4;
  EXPECT_FD_ERROR(c.validate(), ErrorCode::kConfig);
  c = desk_config();
  c.input_channels = 2;
  EXPECT_FD_ERROR(c.validate(), ErrorCode::kConfig);
  c = desk_config();
  c.dropout = 1.0;
  EXPECT_FD_ERROR(c.validate(), ErrorCode::kConfig);
}

TEST(ModelConfig, FullScaleLayout) {
  const ModelConfig c = resnet50_v2_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.input_size, 224);
  EXPECT_EQ(c.stage_blocks, (std::vector<int>{3, 4, 6, 3}));
  EXPECT_EQ(c.decoder_filters, (std::vector<int>{512, 128, 64, 16, 5}));
  EXPECT_EQ(c.branch_hidden, (std::vector<int>{256, 256}));
  EXPECT_EQ(c.latent_size(), 2048);
}

TEST(DrivingNet, ShapeClosureAt96And224) {
  for (int size : {96, 224}) {
    ModelConfig c = desk_config();
    c.input_size = size;
    DrivingNet<float> net(c);
    const auto x = random_input<float>(c, 2, 1);
    const auto cmds = mixed_commands(2);
    const LatentFeatures<float> f = net.encode(x, false);
    EXPECT_EQ(f.feature_map.h, size / 32);
    EXPECT_EQ(f.latent.c, c.latent_size());
    EXPECT_EQ(f.latent.h * f.latent.w, 1);
    const NetOutput<float> out = net.forward(x, cmds, false);
    EXPECT_EQ(out.semantics.n, 2);
    EXPECT_EQ(out.semantics.c, 5);
    EXPECT_EQ(out.semantics.h, size);
    EXPECT_EQ(out.semantics.w, size);
    expect_simplex(out.semantics, 1e-6);
    EXPECT_EQ(out.controls.n, 2);
    EXPECT_EQ(out.controls.c, 2);
  }
}

TEST(DrivingNet, BottleneckEncoderShapes) {
  ModelConfig c = resnet50_v2_config(16);
  c.stage_blocks = {1, 1, 1, 1};
  DrivingNet<float> net(c);
  const auto out = net.forward(random_input<float>(c, 1, 2), mixed_commands(1), false);
  EXPECT_EQ(out.semantics.h, 224);
  expect_simplex(out.semantics, 1e-6);
}

TEST(DrivingNet, ControlsInRange) {
  DrivingNet<float> net(desk_config());
  const auto out = net.forward(random_input<float>(desk_config(), 8, 3), mixed_commands(8), false);
  for (int i = 0; i < 8; ++i) {
    EXPECT_GE(out.controls.at(i, 0), -1.0f);
    EXPECT_LE(out.controls.at(i, 0), 1.0f);
    EXPECT_GE(out.controls.at(i, 1), 0.0f);
    EXPECT_LE(out.controls.at(i, 1), 1.0f);
  }
}

TEST(DrivingNet, CommandSelectsBranch) {
  DrivingNet<float> net(desk_config());
  auto x1 = random_input<float>(desk_config(), 1, 4);
  Tensor<float> x(4, x1.c, x1.h, x1.w);
  for (int i = 0; i < 4; ++i) std::copy(x1.data.begin(), x1.data.end(), x.image(i));
  const auto out = net.forward(x, mixed_commands(4), false);
  for (int i = 1; i < 4; ++i) EXPECT_NE(out.controls.at(i, 0), out.controls.at(0, 0));
}

TEST(DrivingNet, WithoutDecoderHasNoSemantics) {
  ModelConfig c = desk_config();
  c.use_decoder = false;
  DrivingNet<float> net(c);
  EXPECT_FALSE(net.has_decoder());
  EXPECT_LT(net.parameter_count(), DrivingNet<float>(desk_config()).parameter_count());
  const auto x = random_input<float>(c, 1, 5);
  EXPECT_TRUE(net.forward(x, mixed_commands(1), false).semantics.empty());
  EXPECT_FD_ERROR(net.decode(net.encode(x, false).feature_map, false), ErrorCode::kConfig);
}

TEST(DrivingNet, RgbOnlyInput) {
  ModelConfig c = desk_config();
  c.input_channels = 3;
  DrivingNet<float> net(c);
  EXPECT_NO_THROW(net.forward(random_input<float>(c, 1, 6), mixed_commands(1), false));
  EXPECT_FD_ERROR(net.forward(random_input<float>(desk_config(), 1, 6), mixed_commands(1), false),
                  ErrorCode::kShapeMismatch);
}

TEST(DrivingNet, ShapeMismatchAndUnknownCommand) {
  DrivingNet<float> net(desk_config());
  ModelConfig other = desk_config();
  other.input_size = 64;
  EXPECT_FD_ERROR(net.encode(random_input<float>(other, 1, 7), false), ErrorCode::kShapeMismatch);
  const std::vector<NavCommand> bad{static_cast<NavCommand>(9)};
  EXPECT_FD_ERROR(net.forward(random_input<float>(desk_config(), 1, 7), bad, false), ErrorCode::kUnknownCommand);
  EXPECT_FD_ERROR(net.forward(random_input<float>(desk_config(), 2, 7), bad, false), ErrorCode::kShapeMismatch);
}

TEST(DrivingNet, InitIsSeeded) {
  ModelConfig c = desk_config();
  DrivingNet<float> a(c), b(c);
  c.init_seed = 2;
  DrivingNet<float> d(c);
  EXPECT_EQ(a.parameters()[0]->value, b.parameters()[0]->value);
  EXPECT_NE(a.parameters()[0]->value, d.parameters()[0]->value);
}

TEST(DrivingNet, InferenceIsRepeatable) {
  DrivingNet<float> net(desk_config());
  const auto x = random_input<float>(desk_config(), 3, 8);
  const auto a = net.forward(x, mixed_commands(3), false);
  const auto b = net.forward(x, mixed_commands(3), false);
  EXPECT_EQ(a.controls, b.controls);
  EXPECT_EQ(a.semantics, b.semantics);
}

// Property: a uniform-command batch leaves the other branches untouched in
// both directions.
TEST(DrivingNetProperty, BranchIsolation) {
  for (NavCommand active : kAllNavCommands) {
    ModelConfig c = fdtest::tiny_config();
    c.dropout = 0.5;
    DrivingNet<double> net(c);
    const auto x = random_input<double>(c, 3, 9);
    const std::vector<NavCommand> cmds(3, active);
    net.zero_grad();
    const auto out = net.forward(x, cmds, true);
    Tensor<double> dsem(out.semantics.n, out.semantics.c, out.semantics.h, out.semantics.w, 0.1);
    Tensor<double> dctl(3, 2, 1, 1, 1.0);
    net.backward(&dsem, dctl);
    for (int b = 0; b < kNumNavCommands; ++b) {
      bool any_nonzero = false;
      for (auto* p : net.branch_parameters(b))
        for (double g : p->grad.data) {
          if (b != branch_index(active)) ASSERT_EQ(g, 0.0);
          any_nonzero |= g != 0.0;
        }
      if (b == branch_index(active)) EXPECT_TRUE(any_nonzero);
    }

    const auto before = net.forward(x, cmds, false);
    Rng rng(10);
    for (int b = 0; b < kNumNavCommands; ++b) {
      if (b == branch_index(active)) continue;
      for (auto* p : net.branch_parameters(b))
        for (double& v : p->value.data) v += rng.uniform(-1.0, 1.0);
    }
    const auto after = net.forward(x, cmds, false);
    EXPECT_EQ(before.controls, after.controls);
    EXPECT_EQ(before.semantics, after.semantics);
  }
}

TEST(DrivingNet, SummaryListsParts) {
  DrivingNet<float> net(desk_config());
  const std::string s = net.summary();
  EXPECT_NE(s.find("encoder"), std::string::npos);
  EXPECT_NE(s.find("decoder"), std::string::npos);
  EXPECT_NE(s.find(std::to_string(net.parameter_count())), std::string::npos);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  fdtest::TempDir dir;
  ModelConfig c = desk_config();
  c.init_seed = 12;
  DrivingNet<float> net(c);
  // Move batch-norm statistics away from their initial values.
  net.forward(random_input<float>(c, 4, 11), mixed_commands(4), true);
  CheckpointMeta meta;
  meta.epoch = 7;
  meta.validation_loss = 0.25;
  meta.variant = "SU";
  meta.seed = 99;
  save_checkpoint(dir / "m.ckpt", net, meta);
  LoadedCheckpoint back = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.net->config(), c);
  EXPECT_EQ(back.meta.epoch, 7);
  EXPECT_EQ(back.meta.variant, "SU");
  EXPECT_EQ(back.meta.seed, 99u);
  EXPECT_DOUBLE_EQ(back.meta.validation_loss, 0.25);
  const auto x = random_input<float>(c, 2, 13);
  const auto a = net.forward(x, mixed_commands(2), false);
  const auto b = back.net->forward(x, mixed_commands(2), false);
  EXPECT_EQ(a.controls, b.controls);
  EXPECT_EQ(a.semantics, b.semantics);
}

TEST(Checkpoint, MissingAndCorrupt) {
  fdtest::TempDir dir;
  EXPECT_FD_ERROR(load_checkpoint(dir / "none.ckpt"), ErrorCode::kMissingArtifact);
  std::ofstream(dir / "bad.ckpt") << "not a checkpoint";
  EXPECT_FD_ERROR(load_checkpoint(dir / "bad.ckpt"), ErrorCode::kIo);
  DrivingNet<float> net(fdtest::tiny_config());
  save_checkpoint(dir / "cut.ckpt", net, {});
  std::filesystem::resize_file(dir / "cut.ckpt", std::filesystem::file_size(dir / "cut.ckpt") - 8);
  EXPECT_FD_ERROR(load_checkpoint(dir / "cut.ckpt"), ErrorCode::kIo);
}

TEST(Checkpoint, CopyWeights) {
  ModelConfig c = fdtest::tiny_config();
  DrivingNet<float> a(c);
  c.init_seed = 77;
  DrivingNet<float> b(c);
  copy_weights(a, b);
  const auto x = random_input<float>(c, 2, 14);
  EXPECT_EQ(a.forward(x, mixed_commands(2), false).controls, b.forward(x, mixed_commands(2), false).controls);
}
