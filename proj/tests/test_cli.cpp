#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& tmp_dir() {
  static const fs::path dir = [] {
    fs::path d = SHEEPPAIN_TEST_TMP;
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

Run run(const std::string& args) {
  const fs::path err = tmp_dir() /
      (::testing::UnitTest::GetInstance()->current_test_info()->name() + std::string("_err.txt"));
  const std::string cmd = std::string("\"") + SHEEPPAIN_CLI + "\" " + args + " 2>\"" +
                          err.string() + "\"";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string test_name() {
  return ::testing::UnitTest::GetInstance()->current_test_info()->name();
}

// Small trained model, files prefixed by the running test's name so tests can
// run in parallel.
fs::path trained_checkpoint() {
  const std::string tag = test_name();
  const fs::path data = tmp_dir() / (tag + "_train.jsonl");
  const fs::path cfg = tmp_dir() / (tag + "_config.json");
  const fs::path out = tmp_dir() / (tag + "_model.json");
  write_file(cfg, R"({"train":{"epochs":20}})");
  run("-q gen-data --seed 1 --samples 60 --separation 1 --out " + q(data));
  run("-q train --data " + q(data) + " --config " + q(cfg) + " --out-checkpoint " + q(out));
  return out;
}

}  // namespace

TEST(Cli, ValidateGoodFile) {
  const fs::path f = tmp_dir() / "good.jsonl";
  write_file(f,
             R"({"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":0.9})"
             "\n"
             R"({"frame_id":1,"timestamp":2,"class":"NSU","bbox":[0,0,5,5],"confidence":0.9})"
             "\n");
  const auto r = run("validate " + q(f));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("detections=2"), std::string::npos);
  EXPECT_NE(r.out.find("frames=2"), std::string::npos);
}

TEST(Cli, ValidateMalformedNamesLine) {
  const fs::path f = tmp_dir() / "bad.jsonl";
  write_file(f,
             R"({"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":0.9})"
             "\n"
             R"({"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":1.7})"
             "\n");
  const auto r = run("validate " + q(f));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("\"line\":2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("confidence"), std::string::npos) << r.err;

  const auto p = run("validate --permissive " + q(f));
  EXPECT_EQ(p.status, 0);
  EXPECT_NE(p.out.find("skipped=1"), std::string::npos);
}

TEST(Cli, MissingFileIsError) {
  const auto r = run("validate " + q(tmp_dir() / "nope.jsonl"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("\"error\""), std::string::npos);
}

TEST(Cli, UsageError) {
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("gen-data --samples -3 --out x").status, 1);
}

TEST(Cli, GradcheckPasses) {
  const auto r = run("gradcheck --trials 20 --seed 7");
  EXPECT_EQ(r.status, 0);
  const auto pos = r.out.find("max_relative_error=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(r.out.substr(pos + 19)), 1e-4);
}

TEST(Cli, OraclePasses) {
  const auto r = run("oracle --trials 100 --seed 3");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("mismatches=0"), std::string::npos);
}

TEST(Cli, GenDataIsByteIdentical) {
  const fs::path a = tmp_dir() / "a.jsonl", b = tmp_dir() / "b.jsonl";
  ASSERT_EQ(run("-q gen-data --seed 5 --samples 10 --separation 0.8 --out " + q(a)).status, 0);
  ASSERT_EQ(run("-q gen-data --seed 5 --samples 10 --separation 0.8 --out " + q(b)).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a.string() + ".labels"), slurp(b.string() + ".labels"));
  EXPECT_FALSE(slurp(a).empty());
}

TEST(Cli, TrainWritesHistoryAndCheckpoint) {
  const auto ckpt = trained_checkpoint();
  EXPECT_TRUE(fs::exists(ckpt));
  const fs::path data = tmp_dir() / (test_name() + "_train.jsonl");
  const fs::path cfg = tmp_dir() / (test_name() + "_config.json");
  const fs::path out2 = tmp_dir() / (test_name() + "_model2.json");
  const auto r = run("-q train --data " + q(data) + " --config " + q(cfg) +
                     " --out-checkpoint " + q(out2));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("epoch\tloss\taccuracy\n", 0), 0u);
  EXPECT_TRUE(r.err.empty()) << r.err;
  EXPECT_EQ(slurp(ckpt), slurp(out2));
}

TEST(Cli, ScoreAllPainZeroIsZero) {
  const fs::path f = tmp_dir() / "zero.jsonl";
  write_file(f,
             R"({"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":0.9})"
             "\n"
             R"({"frame_id":0,"timestamp":1,"class":"EyE","bbox":[9,0,5,5],"confidence":0.9})"
             "\n"
             R"({"frame_id":0,"timestamp":1,"class":"NNC","bbox":[0,9,5,5],"confidence":0.9})"
             "\n");
  const auto r = run("-q score --detections " + q(f) + " --checkpoint " + q(trained_checkpoint()));
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("\"nps\":0.0"), std::string::npos) << r.out;
}

TEST(Cli, TrackRisingScenario) {
  const fs::path f = tmp_dir() / "scenario.jsonl";
  ASSERT_EQ(run("-q gen-data --seed 2 --scenario rising --out " + q(f)).status, 0);
  const auto r = run("-q track --frames " + q(f) + " --checkpoint " + q(trained_checkpoint()));
  EXPECT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "timestamp\tnps\texpressions");
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const double nps = std::stod(line.substr(t1 + 1));
    EXPECT_GE(nps, prev);
    prev = nps;
    ++rows;
  }
  EXPECT_EQ(rows, 50);
}

TEST(Cli, BadCheckpointIsValidationError) {
  const fs::path f = tmp_dir() / "broken_ckpt.json";
  write_file(f, "{\"format\":\"other\"}");
  const fs::path d = tmp_dir() / "one.jsonl";
  write_file(d, R"({"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":0.9})");
  const auto r = run("score --detections " + q(d) + " --checkpoint " + q(f));
  EXPECT_EQ(r.status, 1);
}
