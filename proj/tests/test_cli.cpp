#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adic/cli.hpp"
#include "adic/json_io.hpp"

using namespace adic;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "adic");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "adic_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("build then verify a two-sided tree") {
  const fs::path tree = scratch_dir() / "two_sided.json";
  const Run b = run({"build", "--alphas", "1,2,3", "--out", tree.string()});
  REQUIRE(b.code == kExitOk);
  const Json doc = parse_json(slurp(tree));
  CHECK(doc["type"] == "tree");
  CHECK(doc["version"] == 1);
  const Run v = run({"verify", tree.string()});
  CHECK(v.code == kExitOk);
  CHECK(v.out == "ok tree\n");

  const Run s = run({"scan", "--tree", tree.string()});
  REQUIRE(s.code == kExitOk);
  const Json report = parse_json(s.out);
  CHECK(report["type"] == "doubling");
  CHECK(report["body"]["worst_ratio"] == "27/1");
}

TEST_CASE("Lebesgue scan and CSV output") {
  const fs::path csv = scratch_dir() / "lebesgue.csv";
  const Run s = run({"scan", "--csv", csv.string()});
  REQUIRE(s.code == kExitOk);
  CHECK(parse_json(s.out)["body"]["worst_ratio"] == "1/1");
  const std::string text = slurp(csv);
  CHECK(text.rfind("level,scale,worst_ratio,scale_approx,worst_ratio_approx\n", 0) == 0);
  CHECK(text.find("1/1") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::vector<std::vector<std::string>> commands{
      {"build", "--bases", "3,5", "--alphas", "1,2"},
      {"find-x", "--bases", "3,5", "--epsilon", "1/128", "--workers", "4"},
      {"select", "--u", "3", "--v", "2", "--epsilon", "1/16"},
      {"diag", "--functional", "vmo-step"},
      {"nt", "order", "--u", "3", "--v", "2"},
  };
  for (const auto& c : commands) {
    CAPTURE(c[0]);
    const Run a = run(c), b = run(c);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("every certificate document verifies") {
  const fs::path dir = scratch_dir();
  const std::vector<std::pair<std::string, std::vector<std::string>>> docs{
      {"sel.json", {"select", "--u", "3", "--v", "2", "--epsilon", "1/16"}},
      {"two.json", {"select", "--u", "3", "--v", "2", "--epsilon", "1/16", "--two-base", "1,0"}},
      {"fam.json", {"select", "--u", "9", "--v", "2", "--alpha-list", "1,2"}},
      {"x.json", {"find-x", "--bases", "3", "--epsilon", "1/100"}},
      {"pairs.json", {"nt", "pairs", "--u", "3", "--v", "2", "--m1", "2"}},
      {"order.json", {"nt", "order", "--u", "3", "--v", "2"}},
      {"rel.json", {"nt", "dependence", "--bases", "3,9"}},
      {"fin.json", {"build", "--bases", "3", "--alphas", "1"}},
      {"cmp.json", {"build", "--bases", "3,5", "--alphas", "1,2", "--compact"}},
  };
  for (const auto& [name, args] : docs) {
    CAPTURE(name);
    std::vector<std::string> full = args;
    full.push_back("--out");
    full.push_back((dir / name).string());
    REQUIRE(run(full).code == kExitOk);
    const Run v = run({"verify", (dir / name).string()});
    CHECK(v.code == kExitOk);
    CHECK(v.out.rfind("ok ", 0) == 0);
  }
}

TEST_CASE("tampered documents fail verification") {
  const fs::path dir = scratch_dir();
  const fs::path sel = dir / "tamper_sel.json";
  REQUIRE(run({"select", "--u", "3", "--v", "2", "--epsilon", "1/16", "--out", sel.string()}).code == kExitOk);
  Json doc = parse_json(slurp(sel));
  doc["body"]["j"] = "8";
  spit(sel, dump(doc));
  const Run v = run({"verify", sel.string()});
  CHECK(v.code == kExitVerification);
  CHECK(v.err.find("verification failed") != std::string::npos);

  const fs::path tree = dir / "tamper_tree.json";
  REQUIRE(run({"build", "--alphas", "1", "--out", tree.string()}).code == kExitOk);
  std::string text = slurp(tree);
  const auto at = text.find("\"1/2\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 5, "\"1/3\"");
  spit(tree, text);
  CHECK(run({"verify", tree.string()}).code == kExitVerification);

  spit(dir / "junk.json", "{ not json");
  CHECK(run({"verify", (dir / "junk.json").string()}).code == kExitValidation);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"select", "--u", "3", "--v", "2", "--epsilon", "zero"}).code == kExitValidation);
  CHECK(run({"select", "--u", "6", "--v", "3", "--epsilon", "1/16"}).code == kExitValidation);
  CHECK(run({"build", "--params", "2,1/2,2"}).code == kExitValidation);
  CHECK(run({"find-x", "--bases", "3", "--epsilon", "1/100", "--x-max", "80"}).code == kExitSearch);
  const Run bad = run({"build", "--params", "2,1/2,x"});
  CHECK(bad.code == kExitValidation);
  CHECK(bad.err.find("--params") != std::string::npos);
  CHECK(run({"verify", (scratch_dir() / "missing.json").string()}).code != kExitOk);
  CHECK(exit_code_for(ErrorKind::ContainmentFailure) == kExitVerification);
  CHECK(exit_code_for(ErrorKind::NoValidK) == kExitSearch);
  CHECK(exit_code_for(ErrorKind::BoundaryStraddle) == kExitOther);
}

TEST_CASE("config files supply flags") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "build.ini";
  spit(cfg, "[build]\nalphas = 1,2\nparams = \"3,1/2,2\"\n");
  const Run a = run({"--config", cfg.string(), "build"});
  REQUIRE(a.code == kExitOk);
  const Run b = run({"build", "--alphas", "1,2", "--params", "3,1/2,2"});
  CHECK(a.out == b.out);
}

TEST_CASE("output directory and diagnostic CSV") {
  const fs::path dir = scratch_dir() / "outdir";
  fs::remove_all(dir);
  const fs::path tree = scratch_dir() / "diag_tree.json";
  REQUIRE(run({"build", "--alphas", "1,2", "--out", tree.string()}).code == kExitOk);
  const Run d = run({"--output-dir", dir.string(), "diag", "--tree", tree.string(), "--functional", "bmo", "--family",
                     "adic:2", "--out", "bmo.json", "--csv", "bmo.csv"});
  REQUIRE(d.code == kExitOk);
  CHECK(d.out.empty());
  CHECK(parse_json(slurp(dir / "bmo.json"))["type"] == "diagnostic");
  CHECK(slurp(dir / "bmo.csv").rfind("left,right,value_lo,value_hi,value_approx\n", 0) == 0);
}
