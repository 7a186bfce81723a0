// Command-line front end: corruption, training, evaluation, baselines,
// visualization and saliency editing.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pixelrl/checkpoint.hpp"
#include "pixelrl/config.hpp"
#include "pixelrl/dataset.hpp"
#include "pixelrl/eval.hpp"
#include "pixelrl/metrics.hpp"
#include "pixelrl/png_io.hpp"
#include "pixelrl/run_io.hpp"
#include "pixelrl/saliency.hpp"
#include "pixelrl/synth.hpp"
#include "pixelrl/trainer.hpp"

using namespace pixelrl;

namespace {

struct Common {
  std::string out;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> t_max;
  std::optional<std::string> task;
};

void add_common(CLI::App* app, Common& c, bool needs_out = true) {
  auto* o = app->add_option("--out", c.out, "Output directory");
  if (needs_out) o->required();
  app->add_flag("--force", c.force, "Allow writing into a non-empty output directory");
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidInput("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + p.string());
  out << text;
}

TrainConfig build_config(const std::string& file, const std::vector<std::string>& sets, const Common& c) {
  TrainConfig cfg = parse_config(read_text(file));
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.task) cfg.task = parse_task(*c.task);
  if (c.seed) cfg.seed = *c.seed;
  if (c.t_max) cfg.t_max = *c.t_max;
  validate(cfg);
  return cfg;
}

// Paired corrupted/clean set as written by `corrupt`.
struct PairedSet {
  std::vector<std::string> names;
  std::vector<ImagePlane> corrupted, clean;
};

PairedSet load_paired(const fs::path& dir, int channels) {
  PairedSet s;
  for (const auto& f : list_pngs(dir / "corrupted")) {
    const fs::path clean = dir / "clean" / f.filename();
    if (!fs::exists(clean)) throw InvalidInput("missing clean image for " + f.filename().string());
    s.names.push_back(f.stem().string());
    s.corrupted.push_back(read_png(f, channels));
    s.clean.push_back(read_png(clean, channels));
  }
  if (s.names.empty()) throw InvalidInput("no corrupted/*.png under " + dir.string());
  return s;
}

void write_saliency_png(const fs::path& p, const ScalarField& s) {
  ImagePlane img(s.height(), s.width(), 1);
  std::copy(s.data().begin(), s.data().end(), img.data().begin());
  write_png(p, img);
}

double masked_mean(const ScalarField& s, const ImagePlane& mask, bool inside) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if ((mask.data()[i] > 0.5) == inside) {
      sum += s[i];
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

// ---- subcommands ----------------------------------------------------------

int cmd_corrupt(const std::string& input, const std::string& noise, double level, const std::string& docs,
                const Common& c) {
  const Task task = parse_task(c.task.value_or("denoise"));
  if (task != Task::Denoise && task != Task::Restore) throw InvalidInput("corrupt: task must be denoise or restore");
  const auto files = list_pngs(input);
  if (files.empty()) throw InvalidInput("corrupt: no PNG images in " + input);
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  fs::create_directories(out / "clean");
  fs::create_directories(out / "corrupted");
  if (task == Task::Restore) fs::create_directories(out / "masks");
  const std::uint64_t seed = c.seed.value_or(0);
  const NoiseKind kind = parse_noise_kind(noise);
  const auto documents = load_documents(docs.empty() ? std::nullopt : std::optional<fs::path>(docs));

  RunManifest m;
  m.command = "corrupt";
  m.task = to_string(task);
  m.seed = seed;
  m.datasets = {input};
  if (task == Task::Denoise) {
    m.extra["noise"] = to_string(kind);
    m.extra["level"] = std::to_string(level);
  }
  double psnr_sum = 0.0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const ImagePlane clean = read_png(files[i], 1);
    const std::uint64_t s = mix_seed(seed, i);
    const std::string name = files[i].filename().string();
    ImagePlane corrupted;
    if (task == Task::Denoise) {
      corrupted = add_noise(clean, kind, level, s);
    } else {
      const std::size_t doc = s % documents.size();
      const TextOverlay ov = overlay_text(clean, documents[doc], s);
      corrupted = ov.image;
      write_png(out / "masks" / name, ov.mask);
      m.extra["document." + name] = std::to_string(doc);
    }
    write_png(out / "clean" / name, clean);
    write_png(out / "corrupted" / name, corrupted);
    m.extra["seed." + name] = std::to_string(s);
    psnr_sum += psnr(corrupted, clean);
  }
  const double mean = psnr_sum / static_cast<double>(files.size());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", mean);
  m.extra["mean_psnr"] = buf;
  m.write(out / "manifest.json");
  std::printf("corrupted %zu images, mean PSNR %.4f dB\n", files.size(), mean);
  return 0;
}

int cmd_train(const std::string& config, const std::vector<std::string>& sets, const std::string& data,
              const std::string& resume, const Common& c) {
  TrainConfig cfg = build_config(config, sets, c);
  if (!data.empty()) cfg.data_dir = data;
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  write_text(out / "config.txt", config_to_text(cfg));
  const TrainingData td = load_training_data(cfg);
  std::optional<Checkpoint> from;
  if (!resume.empty()) from = load_checkpoint(resume);
  const auto every = std::max(1, cfg.max_episode / 20);
  TrainRun run = run_training(cfg, td, from, out, [&](const EpisodeMetrics& m) {
    if ((m.episode + 1) % every == 0 || m.episode == 0)
      std::fprintf(stderr, "episode %d  lr %.3g  r_hat %.4f  policy %.4g  value %.4g  %.1fs\n", m.episode, m.lr,
                   m.r_hat, m.policy_loss, m.value_loss, m.wall_time);
  });
  RunManifest m;
  m.command = "train";
  m.task = to_string(cfg.task);
  m.seed = cfg.seed;
  m.config = config_to_text(cfg);
  m.datasets = {cfg.data_dir.empty() ? "synthetic" : cfg.data_dir};
  m.checkpoint = run.checkpoints.empty() ? "" : run.checkpoints.back().string();
  m.metrics = (out / "metrics.csv").string();
  if (!resume.empty()) m.extra["resumed_from"] = resume;
  m.write(out / "manifest.json");
  std::printf("trained to episode %d (%s); checkpoint %s\n", run.final_checkpoint.episode,
              to_string(cfg.phase).c_str(), m.checkpoint.c_str());
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data, bool augment8, const Common& c) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const TrainConfig cfg = parse_config(ckpt.config_text);
  const Task task = c.task ? parse_task(*c.task) : cfg.task;
  if (task == Task::Saliency) throw InvalidInput("eval: use saliency-edit for the saliency task");
  const int t_max = c.t_max.value_or(cfg.t_max);
  const PairedSet set = load_paired(data, image_channels_for(task));
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  fs::create_directories(out / "restored");
  const TaskParams params = task_params_for(cfg);
  std::vector<ImagePlane> restored(set.names.size());
  const EvalReport rep = evaluate(set.names, set.corrupted, set.clean, [&](const ImagePlane& img, std::size_t i) {
    restored[i] = restore_image(ckpt.network, task, img, t_max, params, augment8);
    return restored[i];
  });
  for (std::size_t i = 0; i < restored.size(); ++i) write_png(out / "restored" / (set.names[i] + ".png"), restored[i]);
  write_text(out / "report.csv", report_csv(rep));
  RunManifest m;
  m.command = "eval";
  m.task = to_string(task);
  m.seed = cfg.seed;
  m.config = ckpt.config_text;
  m.datasets = {data};
  m.checkpoint = ckpt_path;
  m.extra["t_max"] = std::to_string(t_max);
  m.extra["augment8"] = augment8 ? "true" : "false";
  m.write(out / "manifest.json");
  std::printf("mean PSNR %.4f -> %.4f dB, SSIM %.4f -> %.4f over %zu images\n", rep.mean_psnr_in, rep.mean_psnr_out,
              rep.mean_ssim_in, rep.mean_ssim_out, rep.rows.size());
  return 0;
}

int cmd_baseline_random(const std::string& data, const Common& c) {
  const Task task = parse_task(c.task.value_or("denoise"));
  if (task == Task::Saliency) throw InvalidInput("baseline-random: saliency task is not supported");
  const int t_max = c.t_max.value_or(5);
  const std::uint64_t seed = c.seed.value_or(0);
  const PairedSet set = load_paired(data, image_channels_for(task));
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  const EvalReport rep = evaluate(set.names, set.corrupted, set.clean, [&](const ImagePlane& img, std::size_t i) {
    return random_rollout(task, img, std::nullopt, t_max, TaskParams{}, mix_seed(seed, i)).images.back();
  });
  write_text(out / "report.csv", report_csv(rep));
  RunManifest m;
  m.command = "baseline-random";
  m.task = to_string(task);
  m.seed = seed;
  m.datasets = {data};
  m.extra["t_max"] = std::to_string(t_max);
  m.write(out / "manifest.json");
  std::printf("random agents: mean PSNR %.4f -> %.4f dB, SSIM %.4f -> %.4f over %zu images\n", rep.mean_psnr_in,
              rep.mean_psnr_out, rep.mean_ssim_in, rep.mean_ssim_out, rep.rows.size());
  return 0;
}

int cmd_visualize(const std::string& ckpt_path, const std::string& image, const std::string& mask_path,
                  const Common& c) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const TrainConfig cfg = parse_config(ckpt.config_text);
  const int t_max = c.t_max.value_or(cfg.t_max);
  if (t_max < 1) throw InvalidInput("visualize: t_max must be >= 1");
  const ImagePlane input = read_png(image, image_channels_for(cfg.task));
  std::optional<ImagePlane> mask;
  if (cfg.task == Task::Saliency) {
    if (mask_path.empty()) throw InvalidInput("visualize: saliency task needs --mask");
    mask = read_png(mask_path, 1);
  }
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  const ActionSet set = ActionSet::build(action_domain_for(cfg.task));
  const Rollout r = policy_rollout(ckpt.network, cfg.task, input, mask, t_max, task_params_for(cfg), SampleMode::Greedy);
  std::string counts = "step";
  for (const auto& a : set.actions()) counts += "," + a.name;
  counts += "\n";
  char name[64];
  for (std::size_t t = 0; t < r.images.size(); ++t) {
    std::snprintf(name, sizeof name, "image_%02zu.png", t);
    write_png(out / name, r.images[t]);
  }
  for (std::size_t t = 0; t < r.actions.size(); ++t) {
    std::snprintf(name, sizeof name, "actions_%02zu.png", t + 1);
    write_action_map_png(out / name, r.actions[t], set.size());
    counts += std::to_string(t + 1);
    for (auto n : action_counts(r.actions[t], set.size())) counts += "," + std::to_string(n);
    counts += "\n";
  }
  write_text(out / "action_counts.csv", counts);
  write_text(out / "legend.tsv", palette_legend(set));
  write_text(out / "actions.tsv", set.manifest());
  std::printf("wrote %d steps to %s\n", t_max, out.string().c_str());
  return 0;
}

int cmd_saliency_edit(const std::string& image, const std::string& mask_path, const std::string& config,
                      const std::vector<std::string>& sets, const Common& c) {
  Common cc = c;
  cc.task = "saliency";
  const TrainConfig cfg = build_config(config, sets, cc);
  const ImagePlane img = read_png(image, 3);
  const ImagePlane mask = read_png(mask_path, 1);
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  const SaliencyEdit res = saliency_edit(img, mask, cfg);
  write_png(out / "edited.png", res.edited);
  const SaliencyEstimator est = task_params_for(cfg).estimator;
  const ScalarField before = est.estimate(img), after = est.estimate(res.edited);
  write_saliency_png(out / "saliency_before.png", before);
  write_saliency_png(out / "saliency_after.png", after);
  std::ofstream csv(out / "metrics.csv");
  csv << kMetricsSchema << "\n" << kMetricsHeader << "\n";
  for (const auto& m : res.metrics) csv << metrics_row(m) << "\n";
  RunManifest m;
  m.command = "saliency-edit";
  m.task = "saliency";
  m.seed = cfg.seed;
  m.config = config_to_text(cfg);
  m.datasets = {image, mask_path};
  m.metrics = (out / "metrics.csv").string();
  m.write(out / "manifest.json");
  std::printf("saliency inside %.4f -> %.4f, outside %.4f -> %.4f, SSIM %.4f\n", masked_mean(before, mask, true),
              masked_mean(after, mask, true), masked_mean(before, mask, false), masked_mean(after, mask, false),
              ssim(res.edited, img));
  return 0;
}

int cmd_saliency_map(const std::string& image, const std::string& method, const std::string& out) {
  SaliencyEstimator est;
  est.method = parse_saliency_method(method);
  write_saliency_png(out, est.estimate(read_png(image, 3)));
  return 0;
}

int cmd_synth(const std::string& kind, int count, int size, const std::string& style, const Common& c) {
  const fs::path out(c.out);
  prepare_output_dir(out, c.force);
  const std::uint64_t seed = c.seed.value_or(0);
  fs::create_directories(out / "images");
  char name[64];
  if (kind == "color") fs::create_directories(out / "targets");
  if (kind == "saliency") fs::create_directories(out / "masks");
  for (int i = 0; i < count; ++i) {
    std::snprintf(name, sizeof name, "synth_%04d.png", i);
    const std::uint64_t s = mix_seed(seed, i);
    if (kind == "gray") {
      write_png(out / "images" / name, synth_scene(size, size, 1, s));
    } else if (kind == "color") {
      const ImagePlane img = synth_scene(size, size, 3, s);
      write_png(out / "images" / name, img);
      write_png(out / "targets" / name, apply_color_style(img, parse_color_style(style)));
    } else if (kind == "saliency") {
      const SaliencyPair p = synth_saliency_pair(size, size, s);
      write_png(out / "images" / name, p.image);
      write_png(out / "masks" / name, p.mask);
    } else {
      throw InvalidInput("synth: kind must be gray, color or saliency");
    }
  }
  std::printf("wrote %d %s images to %s\n", count, kind.c_str(), out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pixel-wise actor-critic image processing"};
  app.require_subcommand(1);

  Common common;
  auto add_task = [&](CLI::App* sub) { sub->add_option("--task", common.task, "denoise|restore|color|saliency"); };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", common.seed, "Random seed"); };
  auto add_tmax = [&](CLI::App* sub) { sub->add_option("--t-max", common.t_max, "Steps per episode"); };

  std::string input, noise = "gaussian", docs, config, data, resume, ckpt, image, mask, method = "spectral-residual";
  std::string kind = "gray", style = "warm-contrast", map_out;
  double level = 25.0;
  int count = 16, size = 96;
  bool augment8 = false;
  std::vector<std::string> sets;

  auto* corrupt = app.add_subcommand("corrupt", "Synthesize a corrupted test set");
  corrupt->add_option("--input", input, "Directory of clean PNG images")->required();
  corrupt->add_option("--noise", noise, "gaussian|poisson|saltpepper");
  corrupt->add_option("--level", level, "sigma (0-255 scale), peak, or density");
  corrupt->add_option("--documents", docs, "Directory of .txt documents (restore task)");
  corrupt->add_option("--task", common.task, "denoise|restore");
  add_seed(corrupt);
  add_common(corrupt, common);

  auto* train = app.add_subcommand("train", "Train an agent");
  train->add_option("--config", config, "key = value config file")->required();
  train->add_option("--set", sets, "Override a config key (key=value), repeatable");
  train->add_option("--data", data, "Training image directory (default: synthetic scenes)");
  train->add_option("--resume", resume, "Checkpoint to resume from");
  add_task(train);
  add_seed(train);
  add_tmax(train);
  add_common(train, common);

  auto* eval = app.add_subcommand("eval", "Greedy evaluation on a corrupted/clean set");
  eval->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  eval->add_option("--data", data, "Directory with corrupted/ and clean/ subdirectories")->required();
  eval->add_flag("--augment8", augment8, "Average the eight dihedral variants");
  add_task(eval);
  add_tmax(eval);
  add_common(eval, common);

  auto* baseline = app.add_subcommand("baseline-random", "Uniform random per-pixel actions");
  baseline->add_option("--data", data, "Directory with corrupted/ and clean/ subdirectories")->required();
  add_task(baseline);
  add_seed(baseline);
  add_tmax(baseline);
  add_common(baseline, common);

  auto* viz = app.add_subcommand("visualize", "Per-step images, action maps and action counts");
  viz->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  viz->add_option("--image", image, "Input PNG")->required();
  viz->add_option("--mask", mask, "Mask PNG (saliency task)");
  add_tmax(viz);
  add_common(viz, common);

  auto* sal = app.add_subcommand("saliency-edit", "Per-image saliency retargeting");
  sal->add_option("--image", image, "RGB PNG")->required();
  sal->add_option("--mask", mask, "Target region mask PNG")->required();
  sal->add_option("--config", config, "key = value config file")->required();
  sal->add_option("--set", sets, "Override a config key (key=value), repeatable");
  add_seed(sal);
  add_tmax(sal);
  add_common(sal, common);

  auto* smap = app.add_subcommand("saliency-map", "Write the saliency map of an image as a gray PNG");
  smap->add_option("--image", image, "Input PNG")->required();
  smap->add_option("--method", method, "spectral-residual|fine-grained-contrast");
  smap->add_option("--out", map_out, "Output PNG")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic image set");
  synth->add_option("--kind", kind, "gray|color|saliency");
  synth->add_option("--count", count, "Number of images");
  synth->add_option("--size", size, "Image side in pixels");
  synth->add_option("--style", style, "Color target style (kind=color)");
  add_seed(synth);
  add_common(synth, common);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*corrupt) return cmd_corrupt(input, noise, level, docs, common);
    if (*train) return cmd_train(config, sets, data, resume, common);
    if (*eval) return cmd_eval(ckpt, data, augment8, common);
    if (*baseline) return cmd_baseline_random(data, common);
    if (*viz) return cmd_visualize(ckpt, image, mask, common);
    if (*sal) return cmd_saliency_edit(image, mask, config, sets, common);
    if (*smap) return cmd_saliency_map(image, method, map_out);
    if (*synth) return cmd_synth(kind, count, size, style, common);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
