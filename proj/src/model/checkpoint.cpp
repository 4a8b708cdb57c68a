#include "model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "common/error.hpp"

namespace fusiondrive::model {
namespace {

constexpr char kMagic[8] = {'F', 'D', 'C', 'K', 'P', 'T', '0', '1'};

struct Entry {
  std::string name;
  nn::Tensor<float>* tensor;
};

std::vector<Entry> entries(DrivingNet<float>& net) {
  std::vector<Entry> out;
  for (auto* p : net.parameters()) out.push_back({p->name, &p->value});
  for (auto& b : net.buffers()) out.push_back({b.name, b.value});
  return out;
}

nlohmann::json shape(const nn::Tensor<float>& t) { return {t.n, t.c, t.h, t.w}; }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, DrivingNet<float>& net, const CheckpointMeta& meta) {
  const auto list = entries(net);
  nlohmann::json header;
  header["config"] = net.config();
  header["meta"] = {{"epoch", meta.epoch},
                    {"validation_loss", meta.validation_loss},
                    {"variant", meta.variant},
                    {"seed", meta.seed},
                    {"extra", meta.extra}};
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& e : list) tensors.push_back({{"name", e.name}, {"shape", shape(*e.tensor)}});
  header["tensors"] = tensors;
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& e : list)
    out.write(reinterpret_cast<const char*>(e.tensor->data.data()),
              static_cast<std::streamsize>(e.tensor->data.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIo, "failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kMissingArtifact, "no checkpoint at " + path.string());
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  uint64_t len = 0;
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorCode::kIo, path.string() + " is not a checkpoint");
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)) || len > (1u << 26))
    throw Error(ErrorCode::kIo, "corrupt checkpoint header in " + path.string());
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));

  LoadedCheckpoint loaded;
  try {
    const auto header = nlohmann::json::parse(text);
    loaded.net = std::make_unique<DrivingNet<float>>(header.at("config").get<ModelConfig>());
    const auto& m = header.at("meta");
    loaded.meta.epoch = m.at("epoch");
    loaded.meta.validation_loss = m.at("validation_loss");
    loaded.meta.variant = m.at("variant");
    loaded.meta.seed = m.at("seed");
    loaded.meta.extra = m.value("extra", nlohmann::json::object());
    const auto list = entries(*loaded.net);
    const auto& tensors = header.at("tensors");
    if (tensors.size() != list.size()) throw Error(ErrorCode::kIo, "tensor count mismatch");
    for (size_t i = 0; i < list.size(); ++i) {
      if (tensors[i].at("name") != list[i].name || tensors[i].at("shape") != shape(*list[i].tensor))
        throw Error(ErrorCode::kIo, "tensor " + list[i].name + " does not match the config");
      auto& data = list[i].tensor->data;
      if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float))))
        throw Error(ErrorCode::kIo, "truncated checkpoint " + path.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "bad checkpoint header: " + std::string(e.what()));
  }
  return loaded;
}

void copy_weights(DrivingNet<float>& from, DrivingNet<float>& to) {
  const auto a = entries(from);
  const auto b = entries(to);
  if (a.size() != b.size()) throw Error(ErrorCode::kShapeMismatch, "models differ");
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].tensor->same_shape(*b[i].tensor)) throw Error(ErrorCode::kShapeMismatch, "tensor " + a[i].name);
    b[i].tensor->data = a[i].tensor->data;
  }
}

}  // namespace fusiondrive::model
