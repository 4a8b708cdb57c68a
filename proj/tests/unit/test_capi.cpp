#include <gtest/gtest.h>

#include <cstring>
#include <string>
#include <vector>

#include "fusiondrive/fusiondrive.h"
#include "support/temp_dir.hpp"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  fd_string_free(s);
  return out;
}

struct ConfigHandle {
  fd_config* c = nullptr;
  ConfigHandle() { EXPECT_EQ(fd_config_new(&c), FD_OK); }
  ~ConfigHandle() { fd_config_free(c); }
};

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_GT(std::strlen(fd_version()), 0u);
  EXPECT_STREQ(fd_status_name(FD_OK), "ok");
  for (int s = FD_ERR_INVALID_ARGUMENT; s <= FD_ERR_INTERNAL; ++s)
    EXPECT_STRNE(fd_status_name(static_cast<fd_status>(s)), fd_status_name(FD_OK));
}

TEST(CApi, ConfigSetAndGet) {
  ConfigHandle h;
  EXPECT_EQ(fd_config_set(h.c, "train.max_epochs=150"), FD_OK);
  char* out = nullptr;
  ASSERT_EQ(fd_config_get(h.c, "train.max_epochs", &out), FD_OK);
  EXPECT_EQ(take(out), "150");
  ASSERT_EQ(fd_config_to_json(h.c, &out), FD_OK);
  EXPECT_NE(take(out).find("\"max_epochs\": 150"), std::string::npos);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  ConfigHandle h;
  EXPECT_EQ(fd_config_set(h.c, "train.nope=1"), FD_ERR_CONFIG);
  EXPECT_GT(std::strlen(fd_last_error()), 0u);
  char* out = nullptr;
  EXPECT_EQ(fd_config_get(h.c, "no.such.key", &out), FD_ERR_CONFIG);
  EXPECT_EQ(fd_config_set(nullptr, "seed=1"), FD_ERR_INVALID_ARGUMENT);
  fd_config* loaded = nullptr;
  EXPECT_EQ(fd_config_load("/nonexistent/run.json", &loaded), FD_ERR_MISSING_ARTIFACT);
  EXPECT_EQ(loaded, nullptr);
  EXPECT_EQ(fd_train(h.c, "RGB", 0, nullptr, nullptr), FD_ERR_UNKNOWN_VARIANT);
  fd_model* m = nullptr;
  EXPECT_EQ(fd_model_load("/nonexistent/model.ckpt", &m), FD_ERR_MISSING_ARTIFACT);
  EXPECT_EQ(fd_config_set_benchmark_style(h.c, "corl2017", "train_town", "training"), FD_OK);
  EXPECT_NE(fd_config_set_benchmark_style(h.c, "grand_prix", "train_town", "training"), FD_OK);
}

TEST(CApi, SaveAndLoad) {
  fdtest::TempDir dir;
  ConfigHandle h;
  ASSERT_EQ(fd_config_set(h.c, "seed=77"), FD_OK);
  const std::string path = (dir / "run.json").string();
  ASSERT_EQ(fd_config_save(h.c, path.c_str()), FD_OK);
  fd_config* back = nullptr;
  ASSERT_EQ(fd_config_load(path.c_str(), &back), FD_OK);
  char* a = nullptr;
  char* b = nullptr;
  fd_config_to_json(h.c, &a);
  fd_config_to_json(back, &b);
  EXPECT_EQ(take(a), take(b));
  fd_config_free(back);
}

TEST(CApi, SteerHelper) { EXPECT_DOUBLE_EQ(fd_denormalize_steer(0.5), 35.0); }
