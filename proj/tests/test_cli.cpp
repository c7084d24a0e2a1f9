#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "danae/dataio/csv.hpp"
#include "danae/dataio/split.hpp"
#include "danae/evalkit.hpp"

using namespace danae;
namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) { return std::string(DANAE_FIXTURE_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t data_rows(const std::string& path) { return read_csv(path).rows.size(); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("danae_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the tool with `args`; `env` is prepended verbatim (e.g. "DANAE_SEED=3").
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "env -u DANAE_SEED " + env + " '" + DANAE_CLI_PATH + "' " + args + " > '" +
                            at("stdout.txt") + "' 2> '" + at("stderr.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return slurp(at("stderr.txt")); }

  // 20 s noiseless recording in dir/clean.
  void make_clean() const {
    ASSERT_EQ(run("synth --out-dir " + at("clean") +
                  " --duration 20 --gyro-sigma 0 --gyro-bias 0 --accel-sigma 0 --mag-sigma 0"),
              0)
        << stderr_text();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("synth"), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("synth --out-dir x --no-such-flag 1"), 2);
}

TEST_F(Cli, SynthDefaultConfig) {
  ASSERT_EQ(run("synth --out-dir " + at("s")), 0) << stderr_text();
  EXPECT_EQ(data_rows(at("s/imu.csv")), 12000u);
  EXPECT_EQ(data_rows(at("s/gt.csv")), 12000u);
  EXPECT_EQ(read_csv(at("s/imu.csv")).columns, 10u);
  const auto manifest = slurp(at("s/manifest.json"));
  EXPECT_NE(manifest.find("\"command\": \"synth\""), std::string::npos);
  EXPECT_NE(manifest.find("\"seed\": 42"), std::string::npos);
  EXPECT_NE(manifest.find("\"mag_dip\""), std::string::npos);
  EXPECT_NE(manifest.find("wall_clock_seconds"), std::string::npos);
}

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --duration 5 --seed 9 --out-dir " + at("a")), 0);
  ASSERT_EQ(run("synth --duration 5 --seed 9 --out-dir " + at("b")), 0);
  ASSERT_EQ(run("synth --duration 5 --seed 10 --out-dir " + at("c")), 0);
  EXPECT_EQ(slurp(at("a/imu.csv")), slurp(at("b/imu.csv")));
  EXPECT_EQ(slurp(at("a/gt.csv")), slurp(at("b/gt.csv")));
  EXPECT_NE(slurp(at("a/imu.csv")), slurp(at("c/imu.csv")));
}

TEST_F(Cli, SeedFromEnvironmentAndFlagWins) {
  ASSERT_EQ(run("synth --duration 5 --seed 9 --out-dir " + at("flag")), 0);
  ASSERT_EQ(run("synth --duration 5 --out-dir " + at("env"), "DANAE_SEED=9"), 0);
  ASSERT_EQ(run("synth --duration 5 --seed 9 --out-dir " + at("both"), "DANAE_SEED=1234"), 0);
  EXPECT_EQ(slurp(at("flag/imu.csv")), slurp(at("env/imu.csv")));
  EXPECT_EQ(slurp(at("flag/imu.csv")), slurp(at("both/imu.csv")));
  EXPECT_EQ(run("synth --duration 5 --out-dir " + at("bad"), "DANAE_SEED=abc"), 2);
}

TEST_F(Cli, SynthConfigFileAndOverrides) {
  std::ofstream(at("s.cfg")) << "duration = 4\nrate = 50\nroll_amplitude = 0.1\n";
  ASSERT_EQ(run("synth --config " + at("s.cfg") + " --rate 25 --out-dir " + at("s")), 0) << stderr_text();
  EXPECT_EQ(data_rows(at("s/imu.csv")), 100u);
  EXPECT_NE(slurp(at("s/manifest.json")).find("\"rate\": \"25\""), std::string::npos);
}

TEST_F(Cli, SynthBadConfig) {
  EXPECT_EQ(run("synth --rate 0 --out-dir " + at("s")), 2);
  EXPECT_NE(stderr_text().find("rate"), std::string::npos);
  EXPECT_EQ(run("synth --pitch-amplitude 1.5 --out-dir " + at("s")), 2);
  std::ofstream(at("bad.cfg")) << "colour = red\n";
  EXPECT_EQ(run("synth --config " + at("bad.cfg") + " --out-dir " + at("s")), 2);
}

TEST_F(Cli, KfNoiselessSynthetic) {
  make_clean();
  ASSERT_EQ(run("kf --imu " + at("clean/imu.csv") + " --out " + at("kf.csv")), 0) << stderr_text();
  const auto kf = read_angle_series(at("kf.csv"));
  const auto gt = read_angle_series(at("clean/gt.csv"));
  ASSERT_EQ(kf.size(), gt.size());
  for (auto id : kAllAngles) EXPECT_LT(deviations(kf, gt, id, true).rmse, 0.01) << angle_name(id);
  EXPECT_TRUE(fs::exists(at("kf.csv.manifest.json")));
}

TEST_F(Cli, KfInputErrors) {
  EXPECT_EQ(run("kf --imu " + at("missing.csv") + " --out " + at("kf.csv")), 2);
  EXPECT_EQ(run("kf --imu " + fixture("oxiod_imu.csv") + " --dataset oxiod --out " + at("kf.csv")), 2);
  EXPECT_EQ(run("kf --imu " + fixture("oxiod_imu.csv") + " --dataset mars --out " + at("kf.csv")), 2);
  EXPECT_EQ(run("kf --imu " + fixture("oxiod_imu_shuffled.csv") + " --dataset oxiod --vicon " +
                fixture("oxiod_vicon.csv") + " --out " + at("kf.csv")),
            3);
  EXPECT_NE(stderr_text().find("line 60"), std::string::npos);
  EXPECT_EQ(run("kf --imu " + fixture("ucs_missing_orientation.csv") + " --dataset ucs --out " + at("kf.csv")), 3);
  EXPECT_EQ(run("kf --imu " + fixture("empty.csv") + " --out " + at("kf.csv")), 3);
}

TEST_F(Cli, KfDatasets) {
  ASSERT_EQ(run("kf --imu " + fixture("oxiod_imu.csv") + " --dataset oxiod --vicon " + fixture("oxiod_vicon.csv") +
                " --out " + at("ox.csv") + " --gt-out " + at("ox_gt.csv")),
            0)
      << stderr_text();
  EXPECT_EQ(data_rows(at("ox.csv")), 200u);
  EXPECT_EQ(data_rows(at("ox_gt.csv")), 200u);
  ASSERT_EQ(run("kf --imu " + fixture("ucs.csv") + " --dataset ucs --out " + at("ucs.csv") + " --gt-out " +
                at("ucs_gt.csv")),
            0)
      << stderr_text();
  EXPECT_NE(slurp(at("ucs.csv.manifest.json")).find("truth_reliable"), std::string::npos);
}

TEST_F(Cli, TrainDenoiseEvalRoundTrip) {
  ASSERT_EQ(run("synth --duration 20 --out-dir " + at("s")), 0);
  ASSERT_EQ(run("kf --imu " + at("s/imu.csv") + " --out " + at("kf.csv")), 0);
  const std::string train = "train --kf " + at("kf.csv") + " --gt " + at("s/gt.csv") +
                            " --angle roll --width 16 --stride 5 --quiet --model-out ";
  ASSERT_EQ(run(train + at("roll.ckpt") + " --epochs 50 --seed 3"), 0) << stderr_text();
  const auto loss = read_csv(at("roll.ckpt.loss.csv"));
  ASSERT_EQ(loss.rows.size(), 50u);
  EXPECT_EQ(loss.header, (std::vector<std::string>{"epoch", "mean_loss"}));
  EXPECT_LT(loss.rows.back()[1], loss.rows.front()[1]);
  EXPECT_TRUE(fs::exists(at("roll.ckpt.manifest.json")));

  ASSERT_EQ(run("denoise --model " + at("roll.ckpt") + " --kf " + at("kf.csv") + " --angle roll --out " +
                at("d1.csv")),
            0)
      << stderr_text();
  ASSERT_EQ(run("denoise --model " + at("roll.ckpt") + " --kf " + at("kf.csv") + " --angle roll --out " +
                at("d2.csv")),
            0);
  EXPECT_EQ(slurp(at("d1.csv")), slurp(at("d2.csv")));
  const auto kf = read_angle_series(at("kf.csv"));
  const auto dn = read_angle_series(at("d1.csv"));
  ASSERT_EQ(dn.size(), kf.size());
  EXPECT_EQ(dn.channel(AngleId::pitch), kf.channel(AngleId::pitch));

  ASSERT_EQ(run("eval --kf " + at("kf.csv") + " --danae " + at("d1.csv") + " --gt " + at("s/gt.csv") +
                " --out " + at("report.txt") + " --plot-data " + at("plot.csv") + " --eval-from 0.8"),
            0)
      << stderr_text();
  EXPECT_NE(slurp(at("report.txt")).find("RMSE reduction"), std::string::npos);
  EXPECT_NE(slurp(at("report.txt.csv")).find("mean,all"), std::string::npos);
  const auto plot = read_csv(at("plot.csv"));
  EXPECT_EQ(plot.columns, 4u);
  EXPECT_EQ(plot.rows.size(), kf.size() - split_index(kf.size(), FractionSplit{0.8}));
}

TEST_F(Cli, TrainIsDeterministicUnderSeed) {
  make_clean();
  ASSERT_EQ(run("kf --imu " + at("clean/imu.csv") + " --out " + at("kf.csv")), 0);
  const std::string train = "train --kf " + at("kf.csv") + " --gt " + at("clean/gt.csv") +
                            " --angle pitch --width 8 --stride 20 --epochs 3 --quiet --model-out ";
  ASSERT_EQ(run(train + at("a.ckpt") + " --seed 5"), 0);
  ASSERT_EQ(run(train + at("b.ckpt"), "DANAE_SEED=5"), 0);
  EXPECT_EQ(slurp(at("a.ckpt")), slurp(at("b.ckpt")));
}

TEST_F(Cli, TrainRejectsBadSettings) {
  make_clean();
  ASSERT_EQ(run("kf --imu " + at("clean/imu.csv") + " --out " + at("kf.csv")), 0);
  const std::string train =
      "train --kf " + at("kf.csv") + " --gt " + at("clean/gt.csv") + " --model-out " + at("m.ckpt") + " ";
  EXPECT_EQ(run(train + "--angle roll --epochs 0"), 2);
  EXPECT_EQ(run(train + "--angle heave --epochs 1"), 2);
  EXPECT_EQ(run(train + "--angle roll --epochs 1 --train-fraction 1.5"), 2);
  EXPECT_EQ(run(train + "--angle roll --epochs 1 --stride 0"), 2);
  EXPECT_FALSE(fs::exists(at("m.ckpt")));
}

TEST_F(Cli, TrainDivergenceIsNumericalError) {
  make_clean();
  ASSERT_EQ(run("kf --imu " + at("clean/imu.csv") + " --out " + at("kf.csv")), 0);
  EXPECT_EQ(run("train --kf " + at("kf.csv") + " --gt " + at("clean/gt.csv") + " --model-out " + at("m.ckpt") +
                " --angle roll --width 8 --stride 20 --epochs 5 --lr 1e300 --quiet"),
            4)
      << stderr_text();
}

TEST_F(Cli, DenoiseCorruptCheckpoint) {
  make_clean();
  ASSERT_EQ(run("kf --imu " + at("clean/imu.csv") + " --out " + at("kf.csv")), 0);
  std::ofstream(at("bad.ckpt")) << "NOTACHECKPOINT and some bytes";
  EXPECT_EQ(run("denoise --model " + at("bad.ckpt") + " --kf " + at("kf.csv") + " --angle roll --out " +
                at("d.csv")),
            2);
  EXPECT_NE(stderr_text().find("checkpoint"), std::string::npos);
  EXPECT_EQ(run("denoise --model " + at("none.ckpt") + " --kf " + at("kf.csv") + " --angle roll --out " +
                at("d.csv")),
            2);
}

TEST_F(Cli, EvalPerfectDenoiser) {
  make_clean();
  ASSERT_EQ(run("synth --duration 20 --out-dir " + at("noisy")), 0);
  ASSERT_EQ(run("kf --imu " + at("noisy/imu.csv") + " --out " + at("kf.csv")), 0);
  ASSERT_EQ(run("eval --kf " + at("kf.csv") + " --danae " + at("clean/gt.csv") + " --gt " + at("clean/gt.csv") +
                " --out " + at("r.txt") + " --csv " + at("r.csv")),
            0)
      << stderr_text();
  const auto csv = slurp(at("r.csv"));
  EXPECT_NE(csv.find("danae,roll,0,0,0,100\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("mean,all,,,,100\n"), std::string::npos) << csv;
  EXPECT_NE(slurp(at("r.txt")).find("100.0%"), std::string::npos);
}

TEST_F(Cli, EvalLengthMismatch) {
  ASSERT_EQ(run("synth --duration 20 --out-dir " + at("a")), 0);
  ASSERT_EQ(run("synth --duration 10 --out-dir " + at("b")), 0);
  EXPECT_EQ(run("eval --kf " + at("a/gt.csv") + " --danae " + at("b/gt.csv") + " --gt " + at("a/gt.csv") +
                " --out " + at("r.txt")),
            2);
  EXPECT_NE(stderr_text().find("equal lengths"), std::string::npos);
  EXPECT_FALSE(fs::exists(at("r.txt")));
}

TEST_F(Cli, PipelineProducesEveryArtifact) {
  ASSERT_EQ(run("pipeline --out-dir " + at("p") +
                " --duration 20 --epochs 2 --width 8 --stride 10 --angles roll --seed 4 --quiet"),
            0)
      << stderr_text();
  for (const char* f : {"imu.csv", "gt.csv", "manifest.json", "kf.csv", "kf.csv.manifest.json", "model_roll.ckpt",
                        "model_roll.ckpt.loss.csv", "model_roll.ckpt.manifest.json", "danae.csv",
                        "danae.csv.manifest.json", "report.txt", "report.csv", "report.txt.manifest.json",
                        "plot_data.csv"})
    EXPECT_TRUE(fs::exists(at(std::string("p/") + f))) << f;
  const auto csv = slurp(at("p/report.csv"));
  EXPECT_NE(csv.find("danae,roll"), std::string::npos);
  EXPECT_EQ(csv.find("pitch"), std::string::npos);
  EXPECT_NE(slurp(at("p/manifest.json")).find("\"seed\": 4"), std::string::npos);
}
