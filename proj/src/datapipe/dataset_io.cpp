#include "datapipe/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "common/error.hpp"
#include "common/png_io.hpp"

namespace fusiondrive::data {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_file(const char* prefix, int frame) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05d.png", prefix, frame);
  return buf;
}

json record_to_json(const FrameRecord& r) {
  return {{"frame", r.frame},
          {"timestamp", r.timestamp},
          {"steer", r.steer},
          {"speed", r.speed},
          {"measured_speed", r.measured_speed},
          {"command", std::string(to_string(r.command))},
          {"noise", r.noise},
          {"pose", {r.pose.x, r.pose.y, r.pose.heading}}};
}

FrameRecord record_from_json(const json& j) {
  FrameRecord r;
  r.frame = j.at("frame").get<int>();
  r.timestamp = j.at("timestamp").get<double>();
  r.steer = j.at("steer").get<double>();
  r.speed = j.at("speed").get<double>();
  r.measured_speed = j.value("measured_speed", 0.0);
  const auto cmd = nav_command_from_string(j.at("command").get<std::string>());
  if (!cmd) throw Error(ErrorCode::kUnknownCommand, "unknown command in records");
  r.command = *cmd;
  r.noise = j.at("noise").get<bool>();
  const auto& p = j.at("pose");
  r.pose = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  return r;
}

uint8_t to_u8(float v) { return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); }

}  // namespace

std::string episode_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "episode_%05d", index);
  return buf;
}

EpisodeWriter::EpisodeWriter(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "records.jsonl", std::ios::trunc);
}

void EpisodeWriter::add(const Sample& sample) {
  const int frame = static_cast<int>(frames_);
  Raster<uint8_t> rgb(sample.rgb.width, sample.rgb.height, 3);
  for (size_t i = 0; i < rgb.data.size(); ++i) rgb.data[i] = to_u8(sample.rgb.data[i]);
  Raster<uint16_t> depth(sample.depth.width, sample.depth.height, 1);
  for (size_t i = 0; i < depth.data.size(); ++i)
    depth.data[i] = static_cast<uint16_t>(std::lround(std::clamp(sample.depth.data[i], 0.0f, 1.0f) * 65535.0f));
  write_png(dir_ / frame_file("rgb", frame), rgb);
  write_png16(dir_ / frame_file("depth", frame), depth);
  write_png(dir_ / frame_file("semantic", frame), sample.semantic);

  FrameRecord r{frame, sample.timestamp, sample.steer_gt, sample.speed_gt, sample.measured_speed,
                sample.nav_command, sample.noise_flag, sample.pose};
  std::ofstream out(dir_ / "records.jsonl", std::ios::app);
  out << record_to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + (dir_ / "records.jsonl").string());
  ++frames_;
  flagged_ += sample.noise_flag ? 1 : 0;
}

std::vector<FrameRecord> read_records(const fs::path& episode_dir) {
  std::ifstream in(episode_dir / "records.jsonl");
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing " + (episode_dir / "records.jsonl").string());
  std::vector<FrameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIo, "bad record in " + episode_dir.string() + ": " + e.what());
    }
  }
  return out;
}

Sample load_sample(const fs::path& episode_dir, const FrameRecord& record) {
  const Raster<uint8_t> rgb = read_png(episode_dir / frame_file("rgb", record.frame));
  const Raster<uint16_t> depth = read_png16(episode_dir / frame_file("depth", record.frame));
  Sample s;
  s.rgb = ImageF(rgb.width, rgb.height, 3);
  for (size_t i = 0; i < rgb.data.size(); ++i) s.rgb.data[i] = rgb.data[i] / 255.0f;
  s.depth = ImageF(depth.width, depth.height, 1);
  for (size_t i = 0; i < depth.data.size(); ++i) s.depth.data[i] = depth.data[i] / 65535.0f;
  s.semantic = read_png(episode_dir / frame_file("semantic", record.frame));
  if (rgb.channels != 3 || s.semantic.channels != 1 || rgb.width != depth.width ||
      rgb.height != depth.height || s.semantic.width != rgb.width || s.semantic.height != rgb.height)
    throw Error(ErrorCode::kShapeMismatch, "frame rasters disagree in " + episode_dir.string());
  s.nav_command = record.command;
  s.steer_gt = record.steer;
  s.speed_gt = record.speed;
  s.measured_speed = record.measured_speed;
  s.noise_flag = record.noise;
  s.pose = record.pose;
  s.timestamp = record.timestamp;
  return s;
}

void write_manifest(const fs::path& dataset_dir, const Manifest& m) {
  json eps = json::array();
  for (const EpisodeInfo& e : m.episodes)
    eps.push_back({{"name", e.name},
                   {"town_id", std::string(sim::to_string(e.town))},
                   {"weather", e.weather},
                   {"seed", e.seed},
                   {"frames", e.frames},
                   {"flagged", e.flagged},
                   {"end", e.end},
                   {"route_length", e.route_length}});
  const json j = {{"episodes", eps},
                  {"image_width", m.image_width},
                  {"image_height", m.image_height},
                  {"dt", m.dt}};
  fs::create_directories(dataset_dir);
  std::ofstream out(dataset_dir / "manifest.json");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest in " + dataset_dir.string());
}

Manifest read_manifest(const fs::path& dataset_dir) {
  std::ifstream in(dataset_dir / "manifest.json");
  if (!in) throw Error(ErrorCode::kMissingArtifact, "no manifest.json in " + dataset_dir.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    m.image_width = j.at("image_width").get<int>();
    m.image_height = j.at("image_height").get<int>();
    m.dt = j.at("dt").get<double>();
    for (const auto& e : j.at("episodes")) {
      EpisodeInfo info;
      info.name = e.at("name").get<std::string>();
      info.town = sim::town_id_from_string(e.at("town_id").get<std::string>());
      info.weather = e.at("weather").get<std::string>();
      info.seed = e.at("seed").get<uint64_t>();
      info.frames = e.at("frames").get<size_t>();
      info.flagged = e.at("flagged").get<size_t>();
      info.end = e.at("end").get<std::string>();
      info.route_length = e.at("route_length").get<double>();
      m.episodes.push_back(std::move(info));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Dataset load_dataset(const fs::path& dataset_dir, sim::TownId town) {
  const Manifest m = read_manifest(dataset_dir);
  Dataset out;
  out.town_id = town;
  for (const EpisodeInfo& e : m.episodes) {
    if (e.town != town) continue;
    const fs::path dir = dataset_dir / e.name;
    for (const FrameRecord& r : read_records(dir)) out.samples.push_back(load_sample(dir, r));
  }
  return out;
}

}  // namespace fusiondrive::data
