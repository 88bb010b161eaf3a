#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

#include "scslab/cli/cache.hpp"
#include "scslab/cli/config.hpp"
#include "scslab/cli/report.hpp"
#include "scslab/qarith/hecke.hpp"

using namespace scslab;
using namespace scslab::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("scslab_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<qarith::HeckeEigenform> sample_forms() {
  auto forms = qarith::hecke_eigenforms(24, 200);
  forms[0].sym2_l1 = 0.123456789;
  forms[1].petersson_norm = 1e-20;
  return forms;
}

}  // namespace

TEST(Cache, RoundTripIsBitIdentical) {
  TempDir dir;
  const auto forms = sample_forms();
  const std::string path = cache_path(dir.path().string(), 24, 200);
  cache_store(path, forms);
  const auto back = cache_load(path, 24, 200);
  ASSERT_EQ(back.size(), forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    ASSERT_EQ(back[i].lambda.size(), forms[i].lambda.size());
    EXPECT_EQ(std::memcmp(back[i].lambda.data(), forms[i].lambda.data(), forms[i].lambda.size() * sizeof(double)), 0);
    EXPECT_EQ(back[i].sym2_l1, forms[i].sym2_l1);
    EXPECT_EQ(back[i].petersson_norm, forms[i].petersson_norm);
    EXPECT_EQ(back[i].k, 24);
  }
  EXPECT_FALSE(fs::exists(path + ".tmp"));
}

TEST(Cache, TruncatedFileIsRefused) {
  TempDir dir;
  const std::string path = dir / "eig.bin";
  cache_store(path, sample_forms());
  const std::string full = slurp(path);
  for (const std::size_t len : {std::size_t{0}, std::size_t{5}, std::size_t{40}, full.size() / 2, full.size() - 1}) {
    spit(path, full.substr(0, len));
    EXPECT_THROW(cache_load(path, 24, 200), CacheError) << len;
  }
}

TEST(Cache, TagMismatchIsRefused) {
  TempDir dir;
  const std::string path = dir / "eig.bin";
  cache_store(path, sample_forms());
  std::string bytes = slurp(path);
  const auto at = bytes.find("EIG-1");
  ASSERT_NE(at, std::string::npos);
  bytes[at + 4] = '2';
  spit(path, bytes);
  try {
    cache_load(path, 24, 200);
    FAIL() << "loaded a file with a foreign tag";
  } catch (const CacheError& e) {
    EXPECT_NE(std::string(e.what()).find("format tag"), std::string::npos);
  }
}

TEST(Cache, HeaderAndChecksumAreChecked) {
  TempDir dir;
  const std::string path = dir / "eig.bin";
  cache_store(path, sample_forms());
  EXPECT_THROW(cache_load(path, 26, 200), CacheError);
  EXPECT_THROW(cache_load(path, 24, 199), CacheError);
  std::string bytes = slurp(path);
  bytes[bytes.size() - 100] ^= 1;
  spit(path, bytes);
  EXPECT_THROW(cache_load(path, 24, 200), CacheError);
  EXPECT_THROW(cache_load(dir / "missing.bin", 24, 200), CacheError);
  EXPECT_EQ(fs::path(cache_path("d", 24, 200)).filename(), "eig_k24_n200.bin");
}

TEST(Config, XGridMiniLanguage) {
  const auto a = parse_xgrid("4:30:2");
  ASSERT_EQ(a.size(), 14u);
  EXPECT_EQ(a.front(), 4.0);
  EXPECT_EQ(a.back(), 30.0);
  const auto g = parse_xgrid("1024:65536:x2");
  ASSERT_EQ(g.size(), 7u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], 1024.0 * (1 << i));
  EXPECT_EQ(parse_xgrid("100:100000:x10").size(), 4u);
  EXPECT_EQ(parse_xgrid("2.5"), std::vector<double>{2.5});
  for (const char* bad : {"", "4:30", "4:30:0", "4:3:1", "0:10:1", "4:30:x1", "4:30:xq", "a:b:c", "1:2:3:4"}) {
    try {
      parse_xgrid(bad);
      FAIL() << bad;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), "xgrid") << bad;
    }
  }
  EXPECT_EQ(parse_list("1,2,3,4", "h"), (std::vector<long>{1, 2, 3, 4}));
  EXPECT_THROW(parse_list("1,,2", "h"), ConfigError);
  EXPECT_THROW(parse_list("0", "h"), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  auto field_of = [](const RunConfig& c) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("ok");
  };
  RunConfig c;
  c.command = Command::Variance;
  c.xgrid = "4:8:2";
  EXPECT_EQ(field_of(c), "ok");
  c.k = 13;
  EXPECT_EQ(field_of(c), "k");
  c.k = 12;
  c.h2 = 0;
  EXPECT_EQ(field_of(c), "h2");
  c.h2 = 1;
  c.window = "bump:2:1";
  EXPECT_EQ(field_of(c), "window");
  c.window = "bump:1:2";
  c.plot = "p.gp";
  EXPECT_EQ(field_of(c), "plot");
  c.plot.clear();
  c.xgrid.clear();
  EXPECT_EQ(field_of(c), "xgrid");
  c.command = Command::MeanSquare;
  c.xgrid = "10.5:20:1";
  EXPECT_EQ(field_of(c), "xgrid");
  c.command = Command::Sum;
  c.xgrid.clear();
  EXPECT_EQ(field_of(c), "x");
  c.threads = 0;
  EXPECT_EQ(field_of(c), "threads");
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  RunConfig c;
  c.command = Command::SmoothScan;
  c.k = 16;
  c.hs = {1, 3};
  c.x = 12.5;
  c.xgrid = "100:1000:x10";
  c.window = "cosine:1:3";
  c.threads = 2;
  const auto j = to_json(c);
  const RunConfig back = config_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_THROW(config_from_json(nlohmann::json{{"kk", 12}}), ConfigError);
  try {
    config_from_json(nlohmann::json{{"k", "twelve"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "k");
  }
}

TEST(Report, VarianceCsvSchema) {
  RunConfig c;
  c.command = Command::Variance;
  c.k = 1000;
  c.xgrid = "4:8:2";
  const auto env = run(c);
  const auto rows = lines(env.csv);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "# scslab-csv 1 variance");
  EXPECT_EQ(rows[1].rfind("X,lhs_petersson,main_term,residual,tail_bound,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("4,", 0), 0u);
  EXPECT_TRUE(env.has_phase("experiment"));
  EXPECT_FALSE(env.payload["eigen_route"].get<bool>());
  EXPECT_EQ(env.to_json()["config"]["k"], 1000);
}

TEST(Report, EigenSecondRunIsCacheHit) {
  TempDir dir;
  RunConfig c;
  c.command = Command::Eigen;
  c.k = 24;
  c.n = 100;
  c.cache_dir = dir.path().string();
  const auto first = run(c);
  EXPECT_TRUE(first.has_phase("compute"));
  EXPECT_FALSE(first.has_phase("load"));
  EXPECT_EQ(first.payload["cache"]["status"], "miss");
  const auto second = run(c);
  EXPECT_TRUE(second.has_phase("load"));
  EXPECT_FALSE(second.has_phase("compute"));
  EXPECT_EQ(second.payload["cache"]["status"], "hit");
  EXPECT_EQ(first.csv, second.csv);
  EXPECT_EQ(lines(first.csv)[1], "n,f1,f2");
}

TEST(Report, MeanSquareJsonCarriesFits) {
  TempDir dir;
  RunConfig c;
  c.command = Command::MeanSquare;
  c.k = 12;
  c.hs = {1, 2, 3, 4};
  c.xgrid = "64:1024:x2";
  c.cache_dir = dir.path().string();
  c.json = dir / "m.json";
  write_outputs(run(c));
  const auto j = nlohmann::json::parse(slurp(c.json));
  ASSERT_EQ(j["payload"]["fits"].size(), 4u);
  for (const auto& fit : j["payload"]["fits"]) {
    EXPECT_TRUE(fit["exponent"].is_number());
    EXPECT_EQ(fit["points"], 5);
  }
  EXPECT_EQ(j["config"]["xgrid"], "64:1024:x2");
  EXPECT_TRUE(j.contains("version"));
  EXPECT_TRUE(j.contains("timings"));
}

TEST(Report, ReplayingTheEmbeddedConfigReproducesTheCsv) {
  TempDir dir;
  RunConfig c;
  c.command = Command::SmoothScan;
  c.k = 12;
  c.hs = {1, 2};
  c.xgrid = "100:10000:x10";
  c.cache_dir = dir.path().string();
  c.threads = 2;
  const auto env = run(c);
  const RunConfig replay = config_from_json(nlohmann::json::parse(env.to_json()["config"].dump()));
  const auto again = run(replay);
  EXPECT_EQ(env.csv, again.csv);
  EXPECT_EQ(env.payload["points"].dump(), again.payload["points"].dump());
  EXPECT_EQ(again.payload["cache"]["status"], "hit");
}

TEST(Report, OutputsAreWrittenTogetherOrNotAtAll) {
  TempDir dir;
  RunConfig c;
  c.command = Command::Sum;
  c.k = 12;
  c.xgrid = "10:50:10";
  c.cache_dir = dir / "cache";
  c.csv = dir / "s.csv";
  c.json = dir / "s.json";
  c.plot = dir / "s.gp";
  const auto env = run(c);
  write_outputs(env);
  EXPECT_EQ(slurp(c.csv), env.csv);
  EXPECT_NE(slurp(c.plot).find(fs::absolute(c.csv).string()), std::string::npos);
  for (const auto& e : fs::directory_iterator(dir.path()))
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();

  auto bad = env;
  spit(dir / "blocker", "x");
  bad.config.csv = dir / "fresh.csv";
  bad.config.json = dir / "fresh.json";
  bad.config.plot = dir / "blocker/s.gp";  // parent is a regular file
  EXPECT_ANY_THROW(write_outputs(bad));
  EXPECT_FALSE(fs::exists(bad.config.csv));
  EXPECT_FALSE(fs::exists(bad.config.json));
  for (const auto& e : fs::directory_iterator(dir.path()))
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
}

TEST(Report, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(4.0), "4");
  EXPECT_EQ(format_number(-1.0 / 3.0 * 1e-300), "-3.3333333333333334e-301");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}
