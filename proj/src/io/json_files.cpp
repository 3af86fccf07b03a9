// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/io/json_files.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "scisplat/core/errors.hpp"
#include "scisplat/io/scit.hpp"

namespace scisplat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  return j;
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FileFormatError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json intrinsics_to_json(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
}

Intrinsics intrinsics_from_json(const json& j) {
  return {j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
          j.at("cy").get<double>()};
}

}  // namespace

void write_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["version"] = m.version;
  j["height"] = m.height;
  j["width"] = m.width;
  j["channels"] = m.channels;
  j["compression_ratio"] = m.compression_ratio;
  j["overlap_ratio"] = m.overlap_ratio;
  j["tau"] = m.tau;
  j["noise_sigma"] = m.noise_sigma;
  j["seed"] = m.seed;
  j["intrinsics"] = intrinsics_to_json(m.intrinsics);
  j["scene_extent"] = m.scene_extent;
  json files;
  files["measurement"] = m.measurement_file;
  files["masks"] = m.masks_file;
  files["gt_frames"] = m.gt_frame_files;
  if (!m.gt_poses_file.empty()) files["gt_poses"] = m.gt_poses_file;
  if (!m.gt_cloud_dir.empty()) files["gt_cloud"] = m.gt_cloud_dir;
  j["files"] = files;
  save_json(path, j);
}

Manifest read_manifest(const std::string& path) {
  const json j = load_json(path);
  Manifest m;
  try {
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw FileFormatError("unsupported manifest version");
    m.height = j.at("height").get<int>();
    m.width = j.at("width").get<int>();
    m.channels = j.at("channels").get<int>();
    m.compression_ratio = j.at("compression_ratio").get<int>();
    m.overlap_ratio = j.at("overlap_ratio").get<double>();
    m.tau = j.at("tau").get<double>();
    m.noise_sigma = j.at("noise_sigma").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    m.scene_extent = j.at("scene_extent").get<double>();
    const json& files = j.at("files");
    m.measurement_file = files.at("measurement").get<std::string>();
    m.masks_file = files.at("masks").get<std::string>();
    if (files.contains("gt_frames")) {
      m.gt_frame_files = files.at("gt_frames").get<std::vector<std::string>>();
    }
    if (files.contains("gt_poses")) m.gt_poses_file = files.at("gt_poses").get<std::string>();
    if (files.contains("gt_cloud")) m.gt_cloud_dir = files.at("gt_cloud").get<std::string>();
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  return m;
}

void write_dataset(const DatasetBundle& bundle, const std::string& directory) {
  fs::create_directories(directory);
  const fs::path dir(directory);

  Manifest m;
  m.height = bundle.spec.height;
  m.width = bundle.spec.width;
  m.channels = bundle.measurement.image.channels;
  m.compression_ratio = bundle.spec.compression_ratio;
  m.overlap_ratio = bundle.spec.overlap_ratio;
  m.noise_sigma = bundle.spec.noise_sigma;
  m.seed = bundle.spec.seed;
  m.intrinsics = bundle.poses.intrinsics;
  m.scene_extent = (bundle.spec.box_max - bundle.spec.box_min).norm();
  m.measurement_file = "measurement.scit";
  m.masks_file = "masks.scit";
  m.gt_poses_file = "gt_poses.json";
  m.gt_cloud_dir = "gt_cloud";

  write_scit((dir / m.measurement_file).string(), tensor_from_image(bundle.measurement.image));
  write_scit((dir / m.masks_file).string(), tensor_from_masks(bundle.masks));
  for (std::size_t i = 0; i < bundle.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.scit", i);
    m.gt_frame_files.push_back(name);
    write_scit((dir / name).string(), tensor_from_image(bundle.frames[i]));
  }
  write_poses_json((dir / m.gt_poses_file).string(), bundle.poses.poses);
  write_cloud(bundle.cloud, (dir / m.gt_cloud_dir).string());
  write_manifest((dir / "manifest.json").string(), m);
}

LoadedDataset load_dataset(const std::string& manifest_path) {
  LoadedDataset ds;
  ds.manifest = read_manifest(manifest_path);
  const fs::path dir = fs::path(manifest_path).parent_path();
  const Manifest& m = ds.manifest;

  ds.measurement.image = image_from_tensor(read_scit((dir / m.measurement_file).string()));
  ds.measurement.noise_sigma = m.noise_sigma;
  ds.masks = masks_from_tensor(read_scit((dir / m.masks_file).string()));
  ds.masks.nominal_or = m.overlap_ratio;
  ds.masks.seed = m.seed;

  if (ds.measurement.image.height != m.height || ds.measurement.image.width != m.width ||
      ds.measurement.image.channels != m.channels) {
    throw FileFormatError("measurement shape disagrees with manifest");
  }
  if (ds.masks.height != m.height || ds.masks.width != m.width ||
      ds.masks.n_frames != m.compression_ratio) {
    throw FileFormatError("mask stack shape disagrees with manifest");
  }
  if (!ds.measurement.image.all_finite()) throw FileFormatError("measurement has non-finite values");

  for (const std::string& name : m.gt_frame_files) {
    ImagePlane frame = image_from_tensor(read_scit((dir / name).string()));
    if (frame.height != m.height || frame.width != m.width) {
      throw FileFormatError("ground-truth frame shape disagrees with manifest");
    }
    ds.gt_frames.push_back(std::move(frame));
  }
  if (!m.gt_poses_file.empty() && fs::exists(dir / m.gt_poses_file)) {
    PoseSet poses;
    poses.poses = read_poses_json((dir / m.gt_poses_file).string());
    poses.intrinsics = m.intrinsics;
    ds.gt_poses = std::move(poses);
  }
  if (!m.gt_cloud_dir.empty() && fs::exists(dir / m.gt_cloud_dir)) {
    ds.gt_cloud = read_cloud((dir / m.gt_cloud_dir).string());
  }

  // Self-validation: with noiseless ground truth on disk, re-synthesis must
  // reproduce the stored measurement exactly.
  if (!ds.gt_frames.empty() && m.noise_sigma == 0.0) {
    Measurement again = synthesize_measurement(ds.gt_frames, ds.masks, 0.0, 0);
    again.image.quantize_to_f32();
    if (again.image.data != ds.measurement.image.data) {
      throw FileFormatError("dataset failed round-trip validation: " + manifest_path);
    }
  }
  return ds;
}

void write_poses_json(const std::string& path, const std::vector<Pose>& poses) {
  json arr = json::array();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    json entry;
    entry["frame_index"] = static_cast<int>(i + 1);
    json rot = json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rot.push_back(poses[i].rotation(r, c));
    }
    entry["rotation"] = rot;
    entry["translation"] = {poses[i].translation.x(), poses[i].translation.y(),
                            poses[i].translation.z()};
    arr.push_back(entry);
  }
  save_json(path, arr);
}

std::vector<Pose> read_poses_json(const std::string& path) {
  const json arr = load_json(path);
  if (!arr.is_array() || arr.empty()) throw FileFormatError("pose file must be a nonempty array");
  std::vector<std::pair<int, Pose>> indexed;
  try {
    for (const json& entry : arr) {
      Pose pose;
      const auto rot = entry.at("rotation").get<std::vector<double>>();
      const auto trans = entry.at("translation").get<std::vector<double>>();
      if (rot.size() != 9 || trans.size() != 3) {
        throw FileFormatError("pose entries need 9 rotation and 3 translation values");
      }
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[r * 3 + c];
      }
      pose.translation = {trans[0], trans[1], trans[2]};
      if (pose.orthonormality_error() > 1e-6) {
        throw FileFormatError("imported rotation is not orthonormal: " + path);
      }
      indexed.emplace_back(entry.at("frame_index").get<int>(), pose);
    }
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  std::sort(indexed.begin(), indexed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Pose> poses;
  poses.reserve(indexed.size());
  for (auto& [idx, pose] : indexed) poses.push_back(pose);
  return poses;
}

void write_points_json(const std::string& path, const SparsePoints& points) {
  json arr = json::array();
  for (std::size_t i = 0; i < points.positions.size(); ++i) {
    json entry;
    entry["xyz"] = {points.positions[i].x(), points.positions[i].y(), points.positions[i].z()};
    if (points.has_colors()) {
      entry["rgb"] = {points.colors[i].x(), points.colors[i].y(), points.colors[i].z()};
    }
    arr.push_back(entry);
  }
  save_json(path, arr);
}

SparsePoints read_points_json(const std::string& path) {
  const json arr = load_json(path);
  if (!arr.is_array() || arr.empty()) throw FileFormatError("point file must be a nonempty array");
  SparsePoints points;
  const bool with_colors = arr.front().contains("rgb");
  try {
    for (const json& entry : arr) {
      const auto xyz = entry.at("xyz").get<std::vector<double>>();
      if (xyz.size() != 3) throw FileFormatError("xyz needs 3 values");
      points.positions.emplace_back(xyz[0], xyz[1], xyz[2]);
      if (with_colors) {
        const auto rgb = entry.at("rgb").get<std::vector<double>>();
        if (rgb.size() != 3) throw FileFormatError("rgb needs 3 values");
        points.colors.emplace_back(rgb[0], rgb[1], rgb[2]);
      }
    }
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  return points;
}

SceneSpec read_scene_spec(const std::string& path) {
  const json j = load_json(path);
  SceneSpec spec;
  try {
    if (j.contains("gaussian_count")) spec.gaussian_count = j.at("gaussian_count").get<int>();
    if (j.contains("box_min")) {
      const auto v = j.at("box_min").get<std::vector<double>>();
      spec.box_min = {v.at(0), v.at(1), v.at(2)};
    }
    if (j.contains("box_max")) {
      const auto v = j.at("box_max").get<std::vector<double>>();
      spec.box_max = {v.at(0), v.at(1), v.at(2)};
    }
    if (j.contains("palette")) spec.palette = palette_mode_from_string(j.at("palette"));
    if (j.contains("trajectory")) {
      spec.trajectory = trajectory_mode_from_string(j.at("trajectory"));
    }
    if (j.contains("height")) spec.height = j.at("height").get<int>();
    if (j.contains("width")) spec.width = j.at("width").get<int>();
    if (j.contains("compression_ratio")) {
      spec.compression_ratio = j.at("compression_ratio").get<int>();
    }
    if (j.contains("overlap_ratio")) spec.overlap_ratio = j.at("overlap_ratio").get<double>();
    if (j.contains("noise_sigma")) spec.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("trajectory_extent_fraction")) {
      spec.trajectory_extent_fraction = j.at("trajectory_extent_fraction").get<double>();
    }
    if (j.contains("snake_periods")) spec.snake_periods = j.at("snake_periods").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  return spec;
}

void write_scene_spec(const std::string& path, const SceneSpec& spec) {
  json j;
  j["gaussian_count"] = spec.gaussian_count;
  j["box_min"] = {spec.box_min.x(), spec.box_min.y(), spec.box_min.z()};
  j["box_max"] = {spec.box_max.x(), spec.box_max.y(), spec.box_max.z()};
  j["palette"] = to_string(spec.palette);
  j["trajectory"] = to_string(spec.trajectory);
  j["height"] = spec.height;
  j["width"] = spec.width;
  j["compression_ratio"] = spec.compression_ratio;
  j["overlap_ratio"] = spec.overlap_ratio;
  j["noise_sigma"] = spec.noise_sigma;
  j["trajectory_extent_fraction"] = spec.trajectory_extent_fraction;
  j["snake_periods"] = spec.snake_periods;
  j["seed"] = spec.seed;
  save_json(path, j);
}

namespace {

json config_to_json(const TrainConfig& c) {
  json j;
  j["iterations"] = c.iterations;
  j["max_gaussians"] = c.max_gaussians;
  j["loss_mode"] = to_string(c.loss_mode);
  j["lambda_dssim"] = c.lambda_dssim;
  j["lambda_opacity"] = c.lambda_opacity;
  j["lambda_scale"] = c.lambda_scale;
  j["lr_position"] = c.lr_position;
  j["gaussian_lr_decay"] = c.gaussian_lr_decay;
  j["lr_log_scale"] = c.lr_log_scale;
  j["lr_rotation"] = c.lr_rotation;
  j["lr_opacity"] = c.lr_opacity;
  j["lr_color"] = c.lr_color;
  j["scale_lr_by_sqrt_frames"] = c.scale_lr_by_sqrt_frames;
  j["optimize_poses"] = c.optimize_poses;
  j["pose_lr_start"] = c.pose_lr_start;
  j["pose_lr_end"] = c.pose_lr_end;
  j["densify_mode"] = to_string(c.densify_mode);
  j["densify_interval"] = c.densify_interval;
  j["densify_stop_fraction"] = c.densify_stop_fraction;
  j["dead_opacity"] = c.dead_opacity;
  j["growth_fraction"] = c.growth_fraction;
  j["position_noise_coeff"] = c.position_noise_coeff;
  j["adc_grad_threshold"] = c.adc_grad_threshold;
  j["adc_split_scale"] = c.adc_split_scale;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

TrainConfig read_train_config(const std::string& path) {
  const json j = load_json(path);
  TrainConfig c;
  try {
    if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
    if (j.contains("max_gaussians")) c.max_gaussians = j.at("max_gaussians").get<std::size_t>();
    if (j.contains("loss_mode")) c.loss_mode = loss_mode_from_string(j.at("loss_mode"));
    if (j.contains("lambda_dssim")) c.lambda_dssim = j.at("lambda_dssim").get<double>();
    if (j.contains("lambda_opacity")) c.lambda_opacity = j.at("lambda_opacity").get<double>();
    if (j.contains("lambda_scale")) c.lambda_scale = j.at("lambda_scale").get<double>();
    if (j.contains("lr_position")) c.lr_position = j.at("lr_position").get<double>();
    if (j.contains("gaussian_lr_decay")) {
      c.gaussian_lr_decay = j.at("gaussian_lr_decay").get<double>();
    }
    if (j.contains("lr_log_scale")) c.lr_log_scale = j.at("lr_log_scale").get<double>();
    if (j.contains("lr_rotation")) c.lr_rotation = j.at("lr_rotation").get<double>();
    if (j.contains("lr_opacity")) c.lr_opacity = j.at("lr_opacity").get<double>();
    if (j.contains("lr_color")) c.lr_color = j.at("lr_color").get<double>();
    if (j.contains("scale_lr_by_sqrt_frames")) {
      c.scale_lr_by_sqrt_frames = j.at("scale_lr_by_sqrt_frames").get<bool>();
    }
    if (j.contains("optimize_poses")) c.optimize_poses = j.at("optimize_poses").get<bool>();
    if (j.contains("pose_lr_start")) c.pose_lr_start = j.at("pose_lr_start").get<double>();
    if (j.contains("pose_lr_end")) c.pose_lr_end = j.at("pose_lr_end").get<double>();
    if (j.contains("densify_mode")) c.densify_mode = densify_mode_from_string(j.at("densify_mode"));
    if (j.contains("densify_interval")) c.densify_interval = j.at("densify_interval").get<int>();
    if (j.contains("densify_stop_fraction")) {
      c.densify_stop_fraction = j.at("densify_stop_fraction").get<double>();
    }
    if (j.contains("dead_opacity")) c.dead_opacity = j.at("dead_opacity").get<double>();
    if (j.contains("growth_fraction")) c.growth_fraction = j.at("growth_fraction").get<double>();
    if (j.contains("position_noise_coeff")) {
      c.position_noise_coeff = j.at("position_noise_coeff").get<double>();
    }
    if (j.contains("adc_grad_threshold")) {
      c.adc_grad_threshold = j.at("adc_grad_threshold").get<double>();
    }
    if (j.contains("adc_split_scale")) c.adc_split_scale = j.at("adc_split_scale").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw FileFormatError(path + ": " + e.what());
  }
  return c;
}

void write_train_config(const std::string& path, const TrainConfig& config) {
  save_json(path, config_to_json(config));
}

std::uint64_t config_hash(const TrainConfig& config) {
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

Tensor tensor_from_vec3(const std::vector<Eigen::Vector3d>& rows) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(rows.size()), 3};
  t.values.reserve(rows.size() * 3);
  for (const auto& r : rows) {
    for (int k = 0; k < 3; ++k) t.values.push_back(static_cast<float>(r[k]));
  }
  return t;
}

std::vector<Eigen::Vector3d> vec3_from_tensor(const Tensor& t) {
  if (t.dims.size() != 2 || t.dims[1] != 3) throw FileFormatError("expected an (N, 3) tensor");
  std::vector<Eigen::Vector3d> rows(t.dims[0]);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {t.values[i * 3], t.values[i * 3 + 1], t.values[i * 3 + 2]};
  }
  return rows;
}

}  // namespace

void write_cloud(const GaussianCloud& cloud, const std::string& directory) {
  fs::create_directories(directory);
  const fs::path dir(directory);
  write_scit((dir / "positions.scit").string(), tensor_from_vec3(cloud.positions));
  write_scit((dir / "log_scales.scit").string(), tensor_from_vec3(cloud.log_scales));
  Tensor rot;
  rot.dims = {static_cast<std::uint32_t>(cloud.size()), 4};
  for (const auto& q : cloud.rotations) {
    for (int k = 0; k < 4; ++k) rot.values.push_back(static_cast<float>(q[k]));
  }
  write_scit((dir / "rotations.scit").string(), rot);
  Tensor op;
  op.dims = {static_cast<std::uint32_t>(cloud.size())};
  for (double v : cloud.opacity_logits) op.values.push_back(static_cast<float>(v));
  write_scit((dir / "opacity_logits.scit").string(), op);
  write_scit((dir / "color_logits.scit").string(), tensor_from_vec3(cloud.color_logits));
}

GaussianCloud read_cloud(const std::string& directory) {
  const fs::path dir(directory);
  GaussianCloud cloud;
  cloud.positions = vec3_from_tensor(read_scit((dir / "positions.scit").string()));
  cloud.log_scales = vec3_from_tensor(read_scit((dir / "log_scales.scit").string()));
  const Tensor rot = read_scit((dir / "rotations.scit").string());
  if (rot.dims.size() != 2 || rot.dims[1] != 4) {
    throw FileFormatError("rotations must be an (N, 4) tensor");
  }
  cloud.rotations.resize(rot.dims[0]);
  for (std::size_t i = 0; i < cloud.rotations.size(); ++i) {
    cloud.rotations[i] = {rot.values[i * 4], rot.values[i * 4 + 1], rot.values[i * 4 + 2],
                          rot.values[i * 4 + 3]};
  }
  const Tensor op = read_scit((dir / "opacity_logits.scit").string());
  cloud.opacity_logits.assign(op.values.begin(), op.values.end());
  cloud.color_logits = vec3_from_tensor(read_scit((dir / "color_logits.scit").string()));
  const std::size_t n = cloud.positions.size();
  if (cloud.log_scales.size() != n || cloud.rotations.size() != n ||
      cloud.opacity_logits.size() != n || cloud.color_logits.size() != n) {
    throw FileFormatError("cloud attribute tensors disagree on count: " + directory);
  }
  cloud.normalize_rotations();
  return cloud;
}

void write_checkpoint(const Checkpoint& checkpoint, const std::string& directory) {
  fs::create_directories(directory);
  const fs::path dir(directory);
  write_cloud(checkpoint.cloud, (dir / "cloud").string());
  write_poses_json((dir / "poses.json").string(), checkpoint.poses.poses);
  json header;
  header["iteration"] = checkpoint.iteration;
  header["seed"] = checkpoint.seed;
  header["config_hash"] = checkpoint.config_hash;
  header["intrinsics"] = intrinsics_to_json(checkpoint.poses.intrinsics);
  header["height"] = checkpoint.height;
  header["width"] = checkpoint.width;
  save_json((dir / "header.json").string(), header);
}

Checkpoint read_checkpoint(const std::string& directory) {
  const fs::path dir(directory);
  Checkpoint out;
  out.cloud = read_cloud((dir / "cloud").string());
  const json header = load_json((dir / "header.json").string());
  try {
    out.iteration = header.at("iteration").get<int>();
    out.seed = header.at("seed").get<std::uint64_t>();
    out.config_hash = header.at("config_hash").get<std::uint64_t>();
    out.poses.intrinsics = intrinsics_from_json(header.at("intrinsics"));
    out.height = header.value("height", 0);
    out.width = header.value("width", 0);
  } catch (const json::exception& e) {
    throw FileFormatError(directory + ": " + e.what());
  }
  out.poses.poses = read_poses_json((dir / "poses.json").string());
  return out;
}

}  // namespace scisplat
