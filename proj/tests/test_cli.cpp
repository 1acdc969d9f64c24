#include "adaptci/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using adaptci::json;

namespace {

struct Workdir {
  fs::path dir;
  Workdir()
  {
    dir = fs::temp_directory_path() / ("adaptci_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args)
{
  const std::string cmd = std::string(ADAPTCI_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text)
{
  std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST_CASE("command-line interface")
{
  Workdir w;
  const std::string data = w.path("d.csv"), cfg = w.path("l.json");
  REQUIRE(run("stand-in --n 400 --mc-draws 10000 --write-data " + data + " --out " + w.path("s.json")) == 0);
  write(cfg, R"({"V":[1,2],"norm":{"p":2},"levels":[{"gamma":1.0,"C":1.0},{"gamma":0.001,"C":1.0}],"support_radius":0.5})");
  const std::string common = "--data " + data + " --classes " + cfg + " --x0 median --estimate-sigma";

  SUBCASE("ci writes bounds and a run record")
  {
    REQUIRE(run("ci " + common + " --method bonferroni --out " + w.path("r.json")) == 0);
    const json r = json::parse(slurp(w.path("r.json")));
    CHECK(r["lower"].get<double>() < r["upper"].get<double>());
    CHECK(r["per_level"].size() == 2);
    CHECK(r["method"] == "bonferroni");
    CHECK(r["run_record"]["command"] == "ci");
    CHECK(r.contains("seed"));
    REQUIRE(run("ci " + common + " --method minimax --level first --out " + w.path("m.json")) == 0);
    CHECK(json::parse(slurp(w.path("m.json")))["half_length"].get<double>() > 0.0);
  }
  SUBCASE("ci refuses a ladder that does not nest unless forced")
  {
    const std::string wide = w.path("wide.json");
    write(wide, R"({"V":[1,2],"norm":{"p":2},"levels":[{"gamma":1.0,"C":1.0},{"gamma":0.001,"C":1.0}]})");
    const std::string args = "ci --data " + data + " --classes " + wide + " --x0 median --estimate-sigma";
    CHECK(run(args) == 2);
    CHECK(run(args + " --force --out " + w.path("f.json")) == 0);
  }
  SUBCASE("modulus and calibrate")
  {
    REQUIRE(run("modulus " + common + " --from 2 --to 1 --delta 1.5 --out " + w.path("mod.json")) == 0);
    const json m = json::parse(slurp(w.path("mod.json")));
    CHECK(m["delta"].get<double>() == 1.5);
    CHECK(m["D_nonzero_count"].get<int>() > 0);
    CHECK(run("modulus " + common + " --from 2 --to 1 --delta 1.5 --b 1") == 2);
    REQUIRE(run("calibrate " + common + " --mc-draws 10000 --out " + w.path("cal.json")) == 0);
    const json c = json::parse(slurp(w.path("cal.json")));
    CHECK(c["tau_star"].get<double>() >= c["tau_naive"].get<double>());
  }
  SUBCASE("exit codes")
  {
    CHECK(run("ci --no-such-flag") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("ci --data " + w.path("missing.csv") + " --classes " + cfg) == 2);
    CHECK(run("sigma --data " + data + " --bandwidth 1e-9") == 3);
    CHECK(run("simulate --table 9") == 2);
  }
  SUBCASE("simulate output is byte-identical across runs and thread counts")
  {
    for (const char* ext : {"md", "csv", "json"}) {
      const std::string a = w.path(std::string("a.") + ext), b = w.path(std::string("b.") + ext);
      REQUIRE(run("--threads 1 simulate --table 1 --n 100 --reps 50 --seed 7 --out " + a) == 0);
      REQUIRE(run("--threads 3 simulate --table 1 --n 100 --reps 50 --seed 7 --out " + b) == 0);
      CHECK(slurp(a) == slurp(b));
      CHECK_FALSE(slurp(a).empty());
    }
  }
}
