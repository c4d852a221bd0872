#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kCli = LOOPFIELD_CLI;
const std::string kNet = R"('{"path":{"count":2,"C":1,"kappa":1}}')";

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("green prints G, g and det ratios") {
  const auto r = run("green --net " + kNet);
  CHECK(r.code == 0);
  CHECK(r.out.rfind("quantity,i,j,value\n", 0) == 0);
  CHECK(r.out.find("G,0,1,0.33333333333333") != std::string::npos);
  CHECK(r.out.find("g,0,1,0.5") != std::string::npos);
  CHECK(r.out.find("det_ratio,0,1,0.86602540378443") != std::string::npos);
}

TEST_CASE("samplers write one row per replica") {
  for (const std::string sub : {"sample-gff", "sample-loops"}) {
    const std::string path = "cli_" + sub + ".csv";
    const auto r = run(sub + " --net " + kNet + " --replicas 25 --seed 3 --out " + path);
    CHECK(r.code == 0);
    const std::string text = slurp(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 26);
    CHECK(text.rfind("replica,", 0) == 0);
    std::remove(path.c_str());
  }
}

TEST_CASE("checks exit 0 on success and write the JSON report") {
  const auto r = run("connectivity --net " + kNet + " --replicas 4000 --seed 2 --out cli_conn.json");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("test,exact,statistic,stderr,z,p,pass\n", 0) == 0);
  const std::string json = slurp("cli_conn.json");
  CHECK(json.find("\"all_pass\": true") != std::string::npos);
  std::remove("cli_conn.json");
}

TEST_CASE("same seed gives byte-identical reports") {
  const std::string args = "det-ratio --net " + kNet + " --replicas 3000 --seed 4 --out ";
  CHECK(run(args + "cli_a.json").code == 0);
  CHECK(run(args + "cli_b.json --threads 2").code == 0);
  CHECK(slurp("cli_a.json") == slurp("cli_b.json"));
  CHECK(!slurp("cli_a.json").empty());
  std::remove("cli_a.json");
  std::remove("cli_b.json");
}

TEST_CASE("a failing check exits 1 and a bad config exits 2") {
  {
    std::ofstream out("cli_strict.json");
    out << R"({"experiment": "det-ratio", "network": {"path": {"count": 2, "C": 1, "kappa": 1}},)"
        << R"( "replicas": 100, "max_abs_z": 1e-12})";
  }
  CHECK(run("run --config cli_strict.json").code == 1);
  {
    std::ofstream out("cli_bad.json");
    out << R"({"experiment": "det-ratio", "nonsense": 1})";
  }
  CHECK(run("run --config cli_bad.json").code == 2);
  std::remove("cli_strict.json");
  std::remove("cli_bad.json");
}
