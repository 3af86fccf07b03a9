// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface tying the pipeline together:
//   synth       build a synthetic dataset from a scene spec
//   encode      frames + masks -> measurement
//   init        measurement -> degraded frames, points, poses, seeded cloud
//   train       joint Gaussian/pose optimization against one measurement
//   render      checkpoint -> frames
//   eval        frames/poses vs ground truth -> metrics CSV
//   check-grad  finite-difference verification of the backward pass

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "scisplat/core/errors.hpp"
#include "scisplat/core/parallel.hpp"
#include "scisplat/core/rng.hpp"
#include "scisplat/init/degraded.hpp"
#include "scisplat/init/seed.hpp"
#include "scisplat/io/json_files.hpp"
#include "scisplat/io/png.hpp"
#include "scisplat/io/scit.hpp"
#include "scisplat/metrics/metrics.hpp"
#include "scisplat/scene/synth.hpp"
#include "scisplat/splat/gradcheck.hpp"
#include "scisplat/splat/render.hpp"
#include "scisplat/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace scisplat;

namespace {

std::string frame_name(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu.scit", stem, i);
  return buf;
}

void write_frames(const std::vector<ImagePlane>& frames, const fs::path& dir, const char* stem,
                  bool png) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_scit((dir / frame_name(stem, i)).string(), tensor_from_image(frames[i]));
    if (png) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s_%03zu.png", stem, i);
      write_png((dir / buf).string(), frames[i]);
    }
  }
}

int run_synth(const std::string& spec_path, const std::string& out_dir, bool png) {
  const SceneSpec spec = read_scene_spec(spec_path);
  const DatasetBundle bundle = build_dataset(spec);
  write_dataset(bundle, out_dir);
  write_scene_spec((fs::path(out_dir) / "scene_spec.json").string(), spec);
  if (png) {
    write_png((fs::path(out_dir) / "measurement.png").string(), [&] {
      ImagePlane preview = bundle.measurement.image;
      for (double& v : preview.data) v /= bundle.masks.n_frames;
      return preview;
    }());
    write_frames(bundle.frames, fs::path(out_dir) / "preview", "frame", true);
  }
  std::cout << "dataset written to " << out_dir << " (" << bundle.frames.size() << " frames, "
            << bundle.cloud.size() << " Gaussians)\n";
  return 0;
}

int run_encode(const std::string& manifest_path, const std::vector<std::string>& frame_files,
               const std::string& masks_file, const std::string& out_file, double sigma,
               std::uint64_t seed) {
  std::vector<ImagePlane> frames;
  MaskStack masks;
  if (!manifest_path.empty()) {
    const LoadedDataset ds = load_dataset(manifest_path);
    if (ds.gt_frames.empty()) throw InvalidSpec("manifest has no ground-truth frames to encode");
    frames = ds.gt_frames;
    masks = ds.masks;
  } else {
    if (frame_files.empty() || masks_file.empty()) {
      throw InvalidSpec("encode needs --manifest, or --frame files plus --masks");
    }
    for (const std::string& f : frame_files) frames.push_back(image_from_tensor(read_scit(f)));
    masks = masks_from_tensor(read_scit(masks_file));
  }
  Measurement y = synthesize_measurement(frames, masks, sigma, seed);
  y.image.quantize_to_f32();
  write_scit(out_file, tensor_from_image(y.image));
  std::cout << "measurement written to " << out_file << "\n";
  return 0;
}

int run_init(const std::string& manifest_path, const std::string& out_dir, double tau_override,
             const std::string& points_file, int random_points, bool gt_points,
             double points_jitter_frac, int points_replicate, int n_points,
             const std::string& poses_file, bool perturb_gt, double sigma_rot_deg,
             double sigma_trans_frac, std::uint64_t seed, bool png) {
  const LoadedDataset ds = load_dataset(manifest_path);
  const double tau = tau_override > 0.0 ? tau_override : ds.manifest.tau;

  const std::vector<DegradedFrame> degraded = extract_degraded_frames(ds.measurement, ds.masks, tau);
  fs::create_directories(out_dir);
  std::vector<ImagePlane> degraded_images;
  for (const DegradedFrame& f : degraded) degraded_images.push_back(f.image);
  write_frames(degraded_images, out_dir, "degraded", png);

  // Poses: imported, perturbed ground truth, or the linear-trajectory spline.
  PoseSet poses;
  poses.intrinsics = ds.manifest.intrinsics;
  if (!poses_file.empty()) {
    poses.poses = read_poses_json(poses_file);
  } else if (perturb_gt) {
    if (!ds.gt_poses) throw InvalidSpec("--perturb-gt needs ground-truth poses in the dataset");
    const double sigma_rot = sigma_rot_deg * M_PI / 180.0;
    const double sigma_trans = sigma_trans_frac * ds.manifest.scene_extent;
    poses = perturb_poses(*ds.gt_poses, sigma_rot, sigma_trans, detail::mix64(seed ^ 0x706f7365ull));
  } else {
    // Quasi-identity endpoints with small random translation perturbations.
    Rng rng(detail::mix64(seed ^ 0x73706c6eull));
    Pose start, end;
    for (int k = 0; k < 3; ++k) {
      start.translation[k] = 0.01 * ds.manifest.scene_extent * rng.normal();
      end.translation[k] = 0.01 * ds.manifest.scene_extent * rng.normal();
    }
    poses = spline_poses(start, end, ds.masks.n_frames, ds.manifest.intrinsics);
  }
  if (static_cast<int>(poses.poses.size()) != ds.masks.n_frames) {
    throw InvalidSpec("pose count does not match the compression ratio");
  }
  write_poses_json((fs::path(out_dir) / "poses.json").string(), poses.poses);

  // Points: imported, sampled from the stored ground-truth cloud (the
  // external-SfM stand-in), or the random-box ablation fixture.
  SparsePoints points;
  if (!points_file.empty()) {
    points = read_points_json(points_file);
  } else if (gt_points) {
    if (!ds.gt_cloud) throw InvalidSpec("--gt-points needs a ground-truth cloud in the dataset");
    points.positions = ds.gt_cloud->positions;
  } else if (random_points > 0) {
    const double side = ds.manifest.scene_extent / std::sqrt(3.0);
    points = random_box_points(Eigen::Vector3d::Constant(-side / 2.0),
                               Eigen::Vector3d::Constant(side / 2.0),
                               static_cast<std::size_t>(random_points),
                               detail::mix64(seed ^ 0x626f78ull));
  } else {
    throw InvalidSpec("init needs one of --points, --gt-points or --random-points");
  }
  if (points_replicate > 1) {
    // A handful of exact landmarks is not what estimators return; replicate
    // before jittering to emulate a dense noisy surface cloud.
    SparsePoints dense;
    dense.positions.reserve(points.positions.size() * points_replicate);
    for (int r = 0; r < points_replicate; ++r) {
      for (const auto& p : points.positions) dense.positions.push_back(p);
      if (points.has_colors()) {
        for (const auto& c : points.colors) dense.colors.push_back(c);
      }
    }
    points = std::move(dense);
  }
  if (points_jitter_frac > 0.0) {
    // Imported geometry is never exact; emulate estimator noise.
    Rng jitter_rng(detail::mix64(seed ^ 0x6a697474ull));
    const double sigma = points_jitter_frac * ds.manifest.scene_extent;
    for (Eigen::Vector3d& p : points.positions) {
      for (int k = 0; k < 3; ++k) p[k] += sigma * jitter_rng.normal();
    }
  }
  points = downsample_points(points, static_cast<std::size_t>(n_points),
                             detail::mix64(seed ^ 0x646f776eull));
  write_points_json((fs::path(out_dir) / "points.json").string(), points);

  const GaussianCloud cloud = init_gaussians(points, degraded, poses);
  write_cloud(cloud, (fs::path(out_dir) / "cloud").string());
  std::cout << "initialization written to " << out_dir << " (" << cloud.size()
            << " Gaussians, tau " << tau << ")\n";
  return 0;
}

int run_train(const std::string& manifest_path, const std::string& init_dir,
              const std::string& out_dir, const std::string& config_path, int iterations_override,
              int pose_opt_override, const std::string& densify_override,
              const std::string& loss_override, std::int64_t seed_override, int log_every) {
  const LoadedDataset ds = load_dataset(manifest_path);

  TrainConfig config;
  if (!config_path.empty()) config = read_train_config(config_path);
  if (iterations_override >= 0) config.iterations = iterations_override;
  if (pose_opt_override >= 0) config.optimize_poses = pose_opt_override != 0;
  if (!densify_override.empty()) config.densify_mode = densify_mode_from_string(densify_override);
  if (!loss_override.empty()) config.loss_mode = loss_mode_from_string(loss_override);
  if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);

  GaussianCloud cloud = read_cloud((fs::path(init_dir) / "cloud").string());
  PoseSet poses;
  poses.poses = read_poses_json((fs::path(init_dir) / "poses.json").string());
  poses.intrinsics = ds.manifest.intrinsics;

  std::cout << "training " << cloud.size() << " Gaussians for " << config.iterations
            << " iterations (pose optimization " << (config.optimize_poses ? "on" : "off")
            << ", densify " << to_string(config.densify_mode) << ")\n";

  TrainState state = train(ds.measurement, ds.masks, std::move(cloud), std::move(poses), config);

  if (log_every > 0) {
    for (std::size_t i = 0; i < state.loss_history.size();
         i += static_cast<std::size_t>(log_every)) {
      std::printf("iter %6zu  loss %.6g\n", i, state.loss_history[i]);
    }
    if (!state.loss_history.empty()) {
      std::printf("iter %6zu  loss %.6g (final)\n", state.loss_history.size() - 1,
                  state.loss_history.back());
    }
  }

  fs::create_directories(out_dir);
  Checkpoint ckpt;
  ckpt.cloud = std::move(state.cloud);
  ckpt.poses = std::move(state.poses);
  ckpt.iteration = state.iteration;
  ckpt.seed = config.seed;
  ckpt.config_hash = config_hash(config);
  ckpt.height = ds.manifest.height;
  ckpt.width = ds.manifest.width;
  write_checkpoint(ckpt, out_dir);
  write_train_config((fs::path(out_dir) / "train_config.json").string(), config);
  std::ofstream history((fs::path(out_dir) / "loss_history.csv").string());
  history << "iteration,loss\n";
  for (std::size_t i = 0; i < state.loss_history.size(); ++i) {
    history << i << "," << state.loss_history[i] << "\n";
  }
  std::cout << "checkpoint written to " << out_dir << " (" << ckpt.cloud.size()
            << " Gaussians, final loss "
            << (state.loss_history.empty() ? 0.0 : state.loss_history.back()) << ")\n";
  return 0;
}

int run_render(const std::string& checkpoint_dir, const std::string& out_dir, bool png) {
  const Checkpoint ckpt = read_checkpoint(checkpoint_dir);
  if (ckpt.height <= 0 || ckpt.width <= 0) throw InvalidSpec("checkpoint lacks image dimensions");
  const std::vector<ImagePlane> frames =
      render_views(ckpt.cloud, ckpt.poses, ckpt.height, ckpt.width);
  write_frames(frames, out_dir, "frame", png);
  std::cout << frames.size() << " frames written to " << out_dir << "\n";
  return 0;
}

int run_eval(const std::string& manifest_path, const std::string& frames_dir,
             const std::string& poses_file, const std::string& out_csv,
             const std::string& scene_name) {
  const LoadedDataset ds = load_dataset(manifest_path);
  if (ds.gt_frames.empty()) throw InvalidSpec("dataset has no ground-truth frames to compare to");

  std::vector<ImagePlane> frames;
  for (std::size_t i = 0; i < ds.gt_frames.size(); ++i) {
    const fs::path p = fs::path(frames_dir) / frame_name("frame", i);
    if (!fs::exists(p)) throw FileFormatError("missing rendered frame: " + p.string());
    frames.push_back(image_from_tensor(read_scit(p.string())));
  }

  const std::string scene = scene_name.empty()
                                ? fs::path(manifest_path).parent_path().filename().string()
                                : scene_name;
  std::ofstream csv(out_csv);
  if (!csv) throw FileFormatError("cannot open for writing: " + out_csv);
  csv << "scene,frame,psnr,ssim,lpips,ate\n";
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    ImagePlane rendered = frames[i];
    if (rendered.channels == 3 && ds.gt_frames[i].channels == 1) {
      ImagePlane gray(rendered.height, rendered.width, 1);
      for (std::size_t p = 0; p < rendered.pixel_count(); ++p) {
        gray.data[p] =
            (rendered.data[p * 3] + rendered.data[p * 3 + 1] + rendered.data[p * 3 + 2]) / 3.0;
      }
      rendered = std::move(gray);
    }
    const double p = psnr(rendered, ds.gt_frames[i]);
    const double s = ssim(rendered, ds.gt_frames[i]);
    psnr_sum += p;
    ssim_sum += s;
    csv << scene << "," << (i + 1) << "," << p << "," << s << ",n/a,\n";
  }

  std::string ate_text = "n/a";
  if (ds.gt_poses && !poses_file.empty()) {
    const std::vector<Pose> estimated = read_poses_json(poses_file);
    if (estimated.size() == ds.gt_poses->poses.size()) {
      const double err =
          ate(trajectory_from_poses(estimated), trajectory_from_poses(ds.gt_poses->poses));
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.8g", err);
      ate_text = buf;
    }
  }
  const double n = static_cast<double>(frames.size());
  csv << scene << ",summary," << (psnr_sum / n) << "," << (ssim_sum / n) << ",n/a," << ate_text
      << "\n";
  std::cout << "metrics written to " << out_csv << " (mean PSNR " << (psnr_sum / n)
            << " dB, mean SSIM " << (ssim_sum / n) << ", ATE " << ate_text << ")\n";
  return 0;
}

int run_check_grad(std::uint64_t seed, int scenes, int gaussians, int views, int size, double step,
                   double tolerance) {
  bool all_pass = true;
  for (int s = 0; s < scenes; ++s) {
    GaussianCloud cloud;
    PoseSet poses;
    make_gradcheck_scene(seed + static_cast<std::uint64_t>(s), gaussians, views, size, size, cloud,
                         poses);
    const GradCheckReport report =
        finite_diff_check(cloud, poses, size, size, step, tolerance, seed + s);
    std::cout << "scene " << s << " (seed " << (seed + s) << "):\n" << report.to_string();
    all_pass = all_pass && report.pass;
  }
  std::cout << (all_pass ? "gradient check passed\n" : "gradient check FAILED\n");
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snapshot-compressive-imaging reconstruction via Gaussian splatting"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "max worker threads (0 = hardware)")
      ->envname("SCISPLAT_THREADS");

  // synth
  auto* synth = app.add_subcommand("synth", "build a synthetic dataset from a scene spec");
  std::string synth_spec, synth_out;
  bool synth_png = false;
  synth->add_option("--spec", synth_spec, "scene spec JSON")->required();
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_flag("--png", synth_png, "also write PNG previews");

  // encode
  auto* encode = app.add_subcommand("encode", "frames + masks -> measurement");
  std::string enc_manifest, enc_masks, enc_out;
  std::vector<std::string> enc_frames;
  double enc_sigma = 0.0;
  std::uint64_t enc_seed = 0;
  encode->add_option("--manifest", enc_manifest, "encode a dataset's ground-truth frames");
  encode->add_option("--frame", enc_frames, "frame SCIT files in order");
  encode->add_option("--masks", enc_masks, "mask stack SCIT file");
  encode->add_option("--out", enc_out, "output measurement SCIT")->required();
  encode->add_option("--sigma", enc_sigma, "additive noise standard deviation");
  encode->add_option("--seed", enc_seed, "noise seed");

  // init
  auto* init = app.add_subcommand("init", "degraded frames, points and poses from a measurement");
  std::string init_manifest, init_out, init_points, init_poses;
  double init_tau = -1.0;
  int init_random_points = 0;
  bool init_gt_points = false;
  double init_points_jitter = 0.0;
  int init_points_replicate = 1;
  int init_n_points = 10000;
  bool init_perturb = false;
  double init_sigma_rot = 0.5, init_sigma_trans = 0.01;
  std::uint64_t init_seed = 0;
  bool init_png = false;
  init->add_option("--manifest", init_manifest)->required();
  init->add_option("--out", init_out)->required();
  init->add_option("--tau", init_tau, "selection threshold (default: manifest value)");
  init->add_option("--points", init_points, "import points JSON (external SfM output)");
  init->add_flag("--gt-points", init_gt_points, "seed from the stored ground-truth cloud");
  init->add_option("--points-jitter", init_points_jitter,
                   "Gaussian noise on point positions, fraction of scene extent");
  init->add_option("--points-replicate", init_points_replicate,
                   "replicate points this many times before jittering");
  init->add_option("--random-points", init_random_points, "random-box ablation point count");
  init->add_option("--n-points", init_n_points, "downsample target");
  init->add_option("--poses", init_poses, "import poses JSON (external SfM output)");
  init->add_flag("--perturb-gt", init_perturb, "perturb ground-truth poses");
  init->add_option("--sigma-rot-deg", init_sigma_rot, "pose perturbation rotation sigma, degrees");
  init->add_option("--sigma-trans", init_sigma_trans,
                   "pose perturbation translation sigma, fraction of scene extent");
  init->add_option("--seed", init_seed);
  init->add_flag("--png", init_png, "also write PNG previews");

  // train
  auto* tr = app.add_subcommand("train", "joint Gaussian/pose optimization");
  std::string tr_manifest, tr_init, tr_out, tr_config, tr_densify, tr_loss;
  int tr_iterations = -1, tr_pose_opt = -1, tr_log_every = 500;
  std::int64_t tr_seed = -1;
  tr->add_option("--manifest", tr_manifest)->required();
  tr->add_option("--init", tr_init, "initialization directory from `init`")->required();
  tr->add_option("--out", tr_out, "checkpoint output directory")->required();
  tr->add_option("--config", tr_config, "training config JSON");
  tr->add_option("--iterations", tr_iterations);
  tr->add_option("--pose-opt", tr_pose_opt, "1 to optimize poses, 0 to freeze them");
  tr->add_option("--densify", tr_densify, "mcmc | adc | off");
  tr->add_option("--loss", tr_loss, "l1_dssim | mse");
  tr->add_option("--seed", tr_seed);
  tr->add_option("--log-every", tr_log_every, "print loss every N iterations (0 = quiet)");

  // render
  auto* render = app.add_subcommand("render", "checkpoint -> frames");
  std::string render_ckpt, render_out;
  bool render_png = false;
  render->add_option("--checkpoint", render_ckpt)->required();
  render->add_option("--out", render_out)->required();
  render->add_flag("--png", render_png);

  // eval
  auto* ev = app.add_subcommand("eval", "PSNR/SSIM/ATE against ground truth");
  std::string ev_manifest, ev_frames, ev_poses, ev_out, ev_scene;
  ev->add_option("--manifest", ev_manifest)->required();
  ev->add_option("--frames", ev_frames, "directory of rendered frame_###.scit")->required();
  ev->add_option("--poses", ev_poses, "estimated poses JSON");
  ev->add_option("--out", ev_out, "metrics CSV path")->required();
  ev->add_option("--scene", ev_scene, "scene label (default: dataset directory name)");

  // check-grad
  auto* cg = app.add_subcommand("check-grad", "finite-difference gradient verification");
  std::uint64_t cg_seed = 7;
  int cg_scenes = 3, cg_gaussians = 8, cg_views = 2, cg_size = 16;
  double cg_step = 1e-4, cg_tol = 1e-3;
  cg->add_option("--seed", cg_seed);
  cg->add_option("--scenes", cg_scenes);
  cg->add_option("--gaussians", cg_gaussians);
  cg->add_option("--views", cg_views);
  cg->add_option("--size", cg_size, "image side length (<= 32)");
  cg->add_option("--step", cg_step);
  cg->add_option("--tol", cg_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  set_thread_limit(threads);
  try {
    if (synth->parsed()) return run_synth(synth_spec, synth_out, synth_png);
    if (encode->parsed()) {
      return run_encode(enc_manifest, enc_frames, enc_masks, enc_out, enc_sigma, enc_seed);
    }
    if (init->parsed()) {
      return run_init(init_manifest, init_out, init_tau, init_points, init_random_points,
                      init_gt_points, init_points_jitter, init_points_replicate, init_n_points,
                      init_poses, init_perturb, init_sigma_rot, init_sigma_trans, init_seed,
                      init_png);
    }
    if (tr->parsed()) {
      return run_train(tr_manifest, tr_init, tr_out, tr_config, tr_iterations, tr_pose_opt,
                       tr_densify, tr_loss, tr_seed, tr_log_every);
    }
    if (render->parsed()) return run_render(render_ckpt, render_out, render_png);
    if (ev->parsed()) return run_eval(ev_manifest, ev_frames, ev_poses, ev_out, ev_scene);
    if (cg->parsed()) {
      return run_check_grad(cg_seed, cg_scenes, cg_gaussians, cg_views, cg_size, cg_step, cg_tol);
    }
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const InvalidRatio& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const FileFormatError& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const ShapeMismatch& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const LengthMismatch& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const TooSmall& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const InvalidStep& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const EmptySelection& e) {
    std::cerr << "error: " << e.what() << "\n"; return 1;
  } catch (const Error& e) {
    std::cerr << "runtime failure: " << e.what() << "\n"; return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n"; return 2;
  }
  return 0;
}
