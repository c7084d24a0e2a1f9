// danae: command-line front end for the KF + denoising-autoencoder pipeline.
//
//   danae synth    --out-dir DIR [--config FILE] [--<key> VALUE ...]
//   danae kf       --imu FILE --out FILE [--dataset synthetic|oxiod|ucs] [--vicon FILE] [--gt-out FILE]
//   danae train    --kf FILE --gt FILE --angle A --model-out FILE [--epochs N] [--seed S] ...
//   danae denoise  --model FILE --kf FILE --angle A --out FILE
//   danae eval     --kf FILE --danae FILE --gt FILE --out FILE [--plot-data FILE] ...
//   danae pipeline --out-dir DIR [synth flags] [--epochs N] [--angles roll,pitch] ...
//
// Exit codes: 0 ok, 2 usage/config, 3 data, 4 numerical.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "danae/danae.hpp"

namespace fs = std::filesystem;
using namespace danae;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::vector<std::string> g_argv;

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void config(const std::string& key, json value) { config_[key] = std::move(value); }
  void input(const std::string& role, const std::string& path) { inputs_[role] = path; }
  void output(const std::string& role, const std::string& path) { outputs_[role] = path; }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const std::string& path) const {
    json j;
    j["command"] = command_;
    j["tool_version"] = DANAE_VERSION;
    j["argv"] = g_argv;
    j["seed"] = seed_ ? json(*seed_) : json(nullptr);
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  json inputs_ = json::object();
  json outputs_ = json::object();
  std::optional<std::uint64_t> seed_;
};

std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(std::string(what) + ": '" + text + "' is not a seed");
  return v;
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("DANAE_SEED");
  if (!s || !*s) return std::nullopt;
  return parse_seed(s, "DANAE_SEED");
}

// flag > DANAE_SEED > fallback
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, std::uint64_t fallback) {
  if (flag->count() > 0) return flag_value;
  if (auto e = env_seed()) return *e;
  return fallback;
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

DanaeModel load_model(const std::string& path) {
  try {
    return DanaeModel::load(path);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid checkpoint: ") + e.what());
  }
}

std::array<bool, 3> parse_angle_set(const std::vector<std::string>& names) {
  std::array<bool, 3> set{false, false, false};
  for (const auto& n : names) set[index_of(parse_angle(n))] = true;
  return set;
}

// --- synth ---------------------------------------------------------------

struct SynthFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_synth_flags(CLI::App* cmd, SynthFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value synthesis config")->check(CLI::ExistingFile);
  for (const auto& key : SynthConfig::keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option_function<std::string>(
        flag, [&f, key](const std::string& v) { f.overrides[key] = v; }, "override synthesis key '" + key + "'");
  }
}

SynthConfig resolve_synth(const SynthFlags& f) {
  SynthConfig cfg = f.config_path.empty() ? SynthConfig{} : SynthConfig::from_file(f.config_path);
  if (auto e = env_seed()) cfg.seed = *e;
  for (const auto& [k, v] : f.overrides) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

void record_synth(Manifest& m, const SynthConfig& cfg) {
  for (const auto& [k, v] : cfg.to_key_values()) m.config(k, v);
  m.seed(cfg.seed);
}

void write_synth(const SynthConfig& cfg, const std::string& out_dir, Manifest& m) {
  fs::create_directories(out_dir);
  const auto ds = synth_trajectory(cfg);
  const auto imu = (fs::path(out_dir) / "imu.csv").string();
  const auto gt = (fs::path(out_dir) / "gt.csv").string();
  write_imu_series(imu, ds.imu);
  write_angle_series(gt, ds.truth);
  m.output("imu", imu);
  m.output("gt", gt);
  std::cout << "synth: " << ds.imu.size() << " samples -> " << out_dir << "\n";
}

// --- kf ------------------------------------------------------------------

struct KfFlags {
  std::string imu, out, dataset = "synthetic", vicon, gt_out;
};

void run_kf_command(const KfFlags& f, Manifest& m) {
  const auto source = parse_source(f.dataset);
  Dataset ds;
  switch (source) {
    case SourceKind::synthetic:
      ds.imu = read_imu_series(f.imu);
      break;
    case SourceKind::oxiod:
      if (f.vicon.empty()) throw ConfigError("--dataset oxiod needs --vicon");
      ds = load_oxiod(f.imu, f.vicon);
      m.input("vicon", f.vicon);
      break;
    case SourceKind::ucs:
      ds = load_ucs(f.imu);
      break;
  }
  m.input("imu", f.imu);
  m.config("dataset", f.dataset);
  if (ds.imu.size() < 2) throw DataError("'" + f.imu + "': a series needs at least 2 samples");

  KfRunLog log;
  const auto est = run_kf(ds.imu, KfConfig{}, &log);
  ensure_parent(f.out);
  write_angle_series(f.out, est);
  m.output("kf", f.out);
  if (!log.skipped_updates.empty())
    std::cerr << "kf: " << log.skipped_updates.size() << " degenerate samples ran predict-only\n";

  if (!f.gt_out.empty()) {
    if (ds.truth.size() == 0) throw ConfigError("--gt-out needs a dataset with ground truth (oxiod or ucs)");
    ensure_parent(f.gt_out);
    write_angle_series(f.gt_out, ds.truth);
    m.output("gt", f.gt_out);
    m.config("truth_reliable", json::array({ds.truth_reliable[0], ds.truth_reliable[1], ds.truth_reliable[2]}));
  }
  std::cout << "kf: " << est.size() << " estimates -> " << f.out << "\n";
}

// --- train ---------------------------------------------------------------

struct TrainFlags {
  std::string kf, gt, angle, model_out, loss_log;
  std::size_t epochs = 50, stride = 1, width = kDefaultWidth, batch = 16;
  double lr = 0.002, train_fraction = 0.8;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool quiet = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_paths) {
  if (with_paths) {
    cmd->add_option("--kf", f.kf, "KF angle series")->required()->check(CLI::ExistingFile);
    cmd->add_option("--gt", f.gt, "ground-truth angle series")->required()->check(CLI::ExistingFile);
    cmd->add_option("--angle", f.angle, "roll, pitch or yaw")->required();
    cmd->add_option("--model-out", f.model_out, "checkpoint to write")->required();
    cmd->add_option("--loss-log", f.loss_log, "epoch,mean_loss CSV (default <model-out>.loss.csv)");
  }
  cmd->add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
  f.seed_opt = cmd->add_option("--seed", f.seed, "initialization and shuffling seed (default DANAE_SEED or 0)");
  cmd->add_option("--stride", f.stride, "training window stride")->capture_default_str();
  cmd->add_option("--width", f.width, "hidden channels")->capture_default_str();
  cmd->add_option("--batch", f.batch, "mini-batch size")->capture_default_str();
  cmd->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--train-fraction", f.train_fraction, "leading fraction of the series used for training (1 = all)")
      ->capture_default_str();
  cmd->add_flag("--quiet", f.quiet, "no per-epoch progress");
}

TrainConfig train_config(const TrainFlags& f, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch;
  cfg.lr = f.lr;
  cfg.seed = seed;
  cfg.validate();
  if (f.width < 1) throw ConfigError("--width must be >= 1");
  if (f.stride < 1) throw ConfigError("--stride must be >= 1");
  if (!(f.train_fraction > 0.0 && f.train_fraction <= 1.0)) throw ConfigError("--train-fraction must be in (0, 1]");
  return cfg;
}

std::size_t train_cut(std::size_t n, double fraction) {
  return fraction >= 1.0 ? n : split_index(n, FractionSplit{fraction});
}

void record_train(Manifest& m, const TrainFlags& f, std::uint64_t seed) {
  m.seed(seed);
  m.config("epochs", f.epochs);
  m.config("stride", f.stride);
  m.config("width", f.width);
  m.config("batch", f.batch);
  m.config("lr", f.lr);
  m.config("train_fraction", f.train_fraction);
}

std::vector<double> fit_angle(const AngleSeries& kf, const AngleSeries& gt, AngleId angle, const TrainFlags& f,
                              const TrainConfig& cfg, const std::string& model_out, const std::string& loss_log) {
  if (kf.size() != gt.size())
    throw ShapeError("KF and ground-truth series differ in length (" + std::to_string(kf.size()) + " vs " +
                     std::to_string(gt.size()) + ")");
  const std::size_t cut = train_cut(kf.size(), f.train_fraction);
  if (cut < kWindowLength)
    throw DataError("training segment has " + std::to_string(cut) + " samples, needs >= " +
                    std::to_string(kWindowLength));
  const auto ws = make_windows(kf.slice(0, cut), gt.slice(0, cut), angle, f.stride);
  auto model = build_model(cfg.seed, f.width);
  const auto history = train(model, ws, cfg, [&](std::size_t epoch, double loss) {
    if (!std::isfinite(loss)) throw NumericalError("training loss diverged at epoch " + std::to_string(epoch + 1));
    if (!f.quiet) std::cerr << "train " << angle_name(angle) << ": epoch " << epoch + 1 << " loss " << loss << "\n";
  });
  ensure_parent(model_out);
  model.save(model_out);
  std::vector<double> epochs(history.size());
  std::iota(epochs.begin(), epochs.end(), 1.0);
  write_csv(loss_log, {"epoch", "mean_loss"}, {epochs, history});
  std::cout << "train " << angle_name(angle) << ": " << ws.size() << " windows, loss " << history.front() << " -> "
            << history.back() << "\n";
  return history;
}

// --- eval ----------------------------------------------------------------

struct EvalFlags {
  std::string kf, danae, gt, out, csv, plot_data, plot_angle = "roll";
  std::vector<std::string> exclude;
  double eval_from = 0.0;
  bool no_wrap = false;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f, bool with_paths) {
  if (with_paths) {
    cmd->add_option("--kf", f.kf, "KF angle series")->required()->check(CLI::ExistingFile);
    cmd->add_option("--danae", f.danae, "denoised angle series")->required()->check(CLI::ExistingFile);
    cmd->add_option("--gt", f.gt, "ground-truth angle series")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "plain-text report")->required();
    cmd->add_option("--csv", f.csv, "CSV report (default <out>.csv)");
    cmd->add_option("--plot-data", f.plot_data, "t,gt,kf,danae CSV for one angle");
    cmd->add_option("--plot-angle", f.plot_angle, "angle for --plot-data")->capture_default_str();
  }
  cmd->add_option("--eval-from", f.eval_from, "score only samples after this leading fraction")->capture_default_str();
  cmd->add_option("--exclude", f.exclude, "angles left out of the report (e.g. yaw for UCS)")->delimiter(',');
  cmd->add_flag("--no-wrap", f.no_wrap, "plain differences instead of circular ones");
}

MetricsReport evaluate(const AngleSeries& kf, const AngleSeries& dn, const AngleSeries& gt, const EvalFlags& f,
                       const std::string& out, const std::string& csv, const std::string& plot_data, Manifest& m) {
  if (kf.size() != gt.size() || dn.size() != gt.size())
    throw ShapeError("kf, danae and gt series must have equal lengths (" + std::to_string(kf.size()) + ", " +
                     std::to_string(dn.size()) + ", " + std::to_string(gt.size()) + ")");
  if (!(f.eval_from >= 0.0 && f.eval_from < 1.0)) throw ConfigError("--eval-from must be in [0, 1)");
  const std::size_t from = f.eval_from > 0.0 ? split_index(gt.size(), FractionSplit{f.eval_from}) : 0;
  if (from >= gt.size()) throw DataError("evaluation segment is empty");

  std::array<bool, 3> included{true, true, true};
  const auto excluded = parse_angle_set(f.exclude);
  for (std::size_t i = 0; i < 3; ++i) included[i] = !excluded[i];

  const auto n = gt.size();
  const auto report = build_report(kf.slice(from, n), dn.slice(from, n), gt.slice(from, n), included, !f.no_wrap);
  const auto text = render_table(report);
  ensure_parent(out);
  write_text(out, text);
  write_text(csv, report_csv(report));
  m.output("report", out);
  m.output("report_csv", csv);
  m.config("eval_from", f.eval_from);
  m.config("exclude", f.exclude);
  m.config("wrap", !f.no_wrap);

  if (!plot_data.empty()) {
    const auto id = parse_angle(f.plot_angle);
    const auto t = gt.slice(from, n).t;
    emit_plot_data(t,
                   {{"gt", gt.slice(from, n).channel(id)},
                    {"kf", kf.slice(from, n).channel(id)},
                    {"danae", dn.slice(from, n).channel(id)}},
                   plot_data);
    m.output("plot_data", plot_data);
    m.config("plot_angle", f.plot_angle);
  }
  std::cout << text;
  return report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ParseError*>(&e))
    return kExitData;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidInputError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const ShapeError*>(&e))
    return kExitUsage;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  g_argv.assign(argv, argv + argc);

  CLI::App app{"DANAE attitude pipeline: Kalman filter estimates refined by a denoising autoencoder"};
  app.set_version_flag("--version", DANAE_VERSION);
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic IMU recording with exact ground truth");
  SynthFlags synth_flags;
  std::string synth_out;
  synth_cmd->add_option("--out-dir", synth_out, "directory for imu.csv and gt.csv")->required();
  add_synth_flags(synth_cmd, synth_flags);

  // kf
  auto* kf_cmd = app.add_subcommand("kf", "run the linear Kalman filter over an IMU recording");
  KfFlags kf_flags;
  kf_cmd->add_option("--imu", kf_flags.imu, "IMU file (canonical 10-column, OxIOD IMU or UCS log)")->required();
  kf_cmd->add_option("--out", kf_flags.out, "angle series to write")->required();
  kf_cmd->add_option("--dataset", kf_flags.dataset, "synthetic, oxiod or ucs")->capture_default_str();
  kf_cmd->add_option("--vicon", kf_flags.vicon, "OxIOD Vicon file");
  kf_cmd->add_option("--gt-out", kf_flags.gt_out, "write the dataset ground truth as an angle series");

  // train
  auto* train_cmd = app.add_subcommand("train", "train one per-angle denoising autoencoder");
  TrainFlags train_flags;
  add_train_flags(train_cmd, train_flags, true);

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "denoise one angle of a KF series with a trained model");
  std::string dn_model, dn_kf, dn_angle, dn_out;
  denoise_cmd->add_option("--model", dn_model, "checkpoint")->required();
  denoise_cmd->add_option("--kf", dn_kf, "KF angle series")->required();
  denoise_cmd->add_option("--angle", dn_angle, "roll, pitch or yaw")->required();
  denoise_cmd->add_option("--out", dn_out, "angle series to write")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "compare KF and denoised estimates against ground truth");
  EvalFlags eval_flags;
  add_eval_flags(eval_cmd, eval_flags, true);

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "synth, kf, train, denoise and eval in one run");
  std::string pipe_out;
  SynthFlags pipe_synth;
  TrainFlags pipe_train;
  EvalFlags pipe_eval;
  std::vector<std::string> pipe_angles{"roll", "pitch"};
  pipe_cmd->add_option("--out-dir", pipe_out, "directory for every artifact")->required();
  pipe_cmd->add_option("--angles", pipe_angles, "angles to train and denoise")->delimiter(',')->capture_default_str();
  add_synth_flags(pipe_cmd, pipe_synth);
  // The pipeline seed also seeds the synthesis; --seed is taken by the synth keys.
  pipe_cmd->remove_option(pipe_cmd->get_option("--seed"));
  add_train_flags(pipe_cmd, pipe_train, false);
  add_eval_flags(pipe_cmd, pipe_eval, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      Manifest m("synth");
      const auto cfg = resolve_synth(synth_flags);
      if (!synth_flags.config_path.empty()) m.input("config", synth_flags.config_path);
      record_synth(m, cfg);
      write_synth(cfg, synth_out, m);
      m.write((fs::path(synth_out) / "manifest.json").string());
    } else if (*kf_cmd) {
      Manifest m("kf");
      run_kf_command(kf_flags, m);
      m.write(manifest_path(kf_flags.out));
    } else if (*train_cmd) {
      Manifest m("train");
      const auto angle = parse_angle(train_flags.angle);
      const auto seed = resolve_seed(train_flags.seed_opt, train_flags.seed, 0);
      const auto cfg = train_config(train_flags, seed);
      const auto kf = read_angle_series(train_flags.kf);
      const auto gt = read_angle_series(train_flags.gt);
      const auto loss_log = train_flags.loss_log.empty() ? train_flags.model_out + ".loss.csv" : train_flags.loss_log;
      record_train(m, train_flags, seed);
      m.config("angle", train_flags.angle);
      m.input("kf", train_flags.kf);
      m.input("gt", train_flags.gt);
      fit_angle(kf, gt, angle, train_flags, cfg, train_flags.model_out, loss_log);
      m.output("model", train_flags.model_out);
      m.output("loss_log", loss_log);
      m.write(manifest_path(train_flags.model_out));
    } else if (*denoise_cmd) {
      Manifest m("denoise");
      const auto angle = parse_angle(dn_angle);
      const auto model = load_model(dn_model);
      const auto kf = read_angle_series(dn_kf);
      if (kf.size() < model.window_length())
        throw DataError("'" + dn_kf + "' has " + std::to_string(kf.size()) + " samples, needs >= " +
                        std::to_string(model.window_length()));
      const auto out = denoise_series(model, kf, angle);
      ensure_parent(dn_out);
      write_angle_series(dn_out, out);
      m.config("angle", dn_angle);
      m.input("model", dn_model);
      m.input("kf", dn_kf);
      m.output("denoised", dn_out);
      m.write(manifest_path(dn_out));
      std::cout << "denoise " << dn_angle << ": " << out.size() << " samples -> " << dn_out << "\n";
    } else if (*eval_cmd) {
      Manifest m("eval");
      const auto kf = read_angle_series(eval_flags.kf);
      const auto dn = read_angle_series(eval_flags.danae);
      const auto gt = read_angle_series(eval_flags.gt);
      m.input("kf", eval_flags.kf);
      m.input("danae", eval_flags.danae);
      m.input("gt", eval_flags.gt);
      const auto csv = eval_flags.csv.empty() ? eval_flags.out + ".csv" : eval_flags.csv;
      evaluate(kf, dn, gt, eval_flags, eval_flags.out, csv, eval_flags.plot_data, m);
      m.write(manifest_path(eval_flags.out));
    } else if (*pipe_cmd) {
      const fs::path dir(pipe_out);
      fs::create_directories(dir);
      auto at = [&](const std::string& name) { return (dir / name).string(); };

      // One seed drives synthesis and training unless a synth config pins its own.
      const auto seed = resolve_seed(pipe_train.seed_opt, pipe_train.seed, 42);
      auto synth_flags_seeded = pipe_synth;
      if (pipe_train.seed_opt->count() > 0 || env_seed()) synth_flags_seeded.overrides["seed"] = std::to_string(seed);
      const auto scfg = resolve_synth(synth_flags_seeded);
      const auto tcfg = train_config(pipe_train, scfg.seed);

      Manifest ms("synth");
      record_synth(ms, scfg);
      write_synth(scfg, pipe_out, ms);
      ms.write(at("manifest.json"));

      Manifest mk("kf");
      KfFlags kf;
      kf.imu = at("imu.csv");
      kf.out = at("kf.csv");
      run_kf_command(kf, mk);
      mk.write(manifest_path(kf.out));

      const auto kf_series = read_angle_series(at("kf.csv"));
      const auto gt = read_angle_series(at("gt.csv"));
      AngleSeries denoised = kf_series;
      for (const auto& name : pipe_angles) {
        const auto angle = parse_angle(name);
        const auto model_path = at("model_" + name + ".ckpt");
        Manifest mt("train");
        record_train(mt, pipe_train, tcfg.seed);
        mt.config("angle", name);
        mt.input("kf", at("kf.csv"));
        mt.input("gt", at("gt.csv"));
        fit_angle(kf_series, gt, angle, pipe_train, tcfg, model_path, model_path + ".loss.csv");
        mt.output("model", model_path);
        mt.output("loss_log", model_path + ".loss.csv");
        mt.write(manifest_path(model_path));

        denoised = denoise_series(load_model(model_path), denoised, angle);
      }
      Manifest md("denoise");
      md.config("angles", pipe_angles);
      md.input("kf", at("kf.csv"));
      write_angle_series(at("danae.csv"), denoised);
      md.output("denoised", at("danae.csv"));
      md.write(manifest_path(at("danae.csv")));

      Manifest me("eval");
      auto ef = pipe_eval;
      if (ef.eval_from == 0.0 && pipe_train.train_fraction < 1.0) ef.eval_from = pipe_train.train_fraction;
      if (ef.exclude.empty())
        for (auto id : kAllAngles)
          if (std::find(pipe_angles.begin(), pipe_angles.end(), std::string(angle_name(id))) == pipe_angles.end())
            ef.exclude.emplace_back(angle_name(id));
      ef.plot_angle = pipe_angles.empty() ? "roll" : pipe_angles.front();
      me.input("kf", at("kf.csv"));
      me.input("danae", at("danae.csv"));
      me.input("gt", at("gt.csv"));
      evaluate(kf_series, denoised, gt, ef, at("report.txt"), at("report.csv"), at("plot_data.csv"), me);
      me.write(manifest_path(at("report.txt")));
    }
  } catch (const std::exception& e) {
    std::cerr << "danae: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
