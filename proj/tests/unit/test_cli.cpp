#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "", bool merge_stderr = false) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" VARCALC_CLI_PATH "\" " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string problem(const std::string& name) { return "\"" VARCALC_PROBLEMS_DIR "/" + name + "\""; }

// Writes a problem file into a per-process scratch directory.
std::string scratch(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / ("varcalc_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return "\"" + p.string() + "\"";
}

json parse(const Run& r) {
  INFO(r.out);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("analyze on the worked example reports every determined condition as holding") {
  const Run r = run("analyze " + problem("example_4_6.json") + " --json");
  REQUIRE(r.code == 0);
  const json j = parse(r);
  CHECK(j["tool"] == "varcalc");
  CHECK(j["command"] == "analyze");
  for (const auto& [name, c] : j["growth"]["conditions"].items()) {
    INFO(name);
    CHECK(c["verdict"] != "fails");
  }
  CHECK(j["growth"]["conditions"]["(vi) positive second subderivative"]["verdict"] == "holds");
  CHECK(j["growth"]["consistency"] == true);
  CHECK(j["growth"]["qg_modulus"]["lower"] == "+inf");
  CHECK(j["multipliers"]["points"][0][0].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("analyze on the quadratic file reports the smallest eigenvalue as modulus") {
  const Run r = run("analyze " + problem("quadratic.json") + " --json");
  REQUIRE(r.code == 0);
  const json j = parse(r);
  varcalc::Mat Q(3, 3);
  Q << 2, 0.5, 0, 0.5, 1, 0.25, 0, 0.25, 3;
  const double lmin = testing::lambda_min_bisect(Q);
  CHECK(j["growth"]["qg_modulus"]["lower"].get<double>() == doctest::Approx(lmin).epsilon(1e-9));
  CHECK(j["growth"]["qg_modulus"]["upper"].get<double>() == doctest::Approx(lmin).epsilon(1e-9));
  CHECK(j["seed"] == 11);
}

TEST_CASE("saddle file fails consistently") {
  const Run r = run("analyze " + problem("saddle_box.json") + " --json");
  REQUIRE(r.code == 0);
  const json j = parse(r);
  CHECK(j["growth"]["conditions"]["(vi) positive second subderivative"]["verdict"] == "fails");
  CHECK(j["growth"]["consistency"] == true);
}

TEST_CASE("non-stationary point is invalid input") {
  const Run r = run("analyze " + problem("nonstationary.json"), "", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("not stationary") != std::string::npos);
}

TEST_CASE("second subderivative command") {
  const Run r = run("d2 " + problem("halfline.json") + " --w 1 --json");
  REQUIRE(r.code == 0);
  CHECK(parse(r)["d2"] == "+inf");
  const Run t = run("d2 " + problem("halfline.json") + " --w -1");
  REQUIRE(t.code == 0);
  CHECK(t.out.find("d2: 0") != std::string::npos);
}

TEST_CASE("parabolic command") {
  const Run r = run("parabolic " + problem("halfline.json") + " --w 0 --z 1 --json");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("+inf") != std::string::npos);
  CHECK(run("parabolic " + problem("halfline.json") + " --w 1 --z 0").code == 2);
}

TEST_CASE("estimate command and witness dump") {
  const std::string csv = (fs::temp_directory_path() / ("varcalc_w_" + std::to_string(::getpid()) + ".csv")).string();
  const Run r = run("estimate " + problem("halfline.json") + " --object d2 --w -1 --json --witness-csv \"" + csv + "\"");
  REQUIRE(r.code == 0);
  const json j = parse(r);
  CHECK(j["estimate"]["value"].get<double>() == 0.0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "level,t,d0,quotient");
  fs::remove(csv);

  const Run s = run("estimate " + problem("halfline.json") + " --object subderivative --w 1 --schedule t0=0.01,levels=5 --json");
  REQUIRE(s.code == 0);
  const json k = parse(s);
  CHECK(k["estimate"]["diverging"] == true);
  CHECK(k["estimate"]["level_minima"].size() == 5);
  CHECK(run("estimate " + problem("halfline.json") + " --object d2 --w 1 --schedule ratio=2").code == 2);
  CHECK(run("estimate " + problem("halfline.json") + " --object d2 --w 1 --schedule bogus=2").code == 2);
}

TEST_CASE("falsify-prox finds a verified counterexample on the wiggle example") {
  const Run r = run("falsify-prox " + problem("example_3_2.json") + " --r-max 1000 --eps 0.01 --json");
  REQUIRE(r.code == 0);
  const json j = parse(r);
  REQUIRE(j["runs"].size() == 1);
  CHECK(j["runs"][0]["counterexample"]["verified"] == true);
}

TEST_CASE("catalog subcommands") {
  const Run l = run("catalog list --json");
  REQUIRE(l.code == 0);
  CHECK(l.out.find("example_4_6") != std::string::npos);
  const Run r = run("catalog run example_4_6 --json");
  CHECK(r.code == 0);
  const json j = parse(r);
  for (const auto& f : j["entry"]["facts"]) CHECK(f["ok"] == true);
  CHECK(run("catalog run random_qp:3:2").code == 0);
  CHECK(run("catalog run nonexistent").code == 2);
}

TEST_CASE("reports are byte-identical for identical inputs") {
  for (const char* f : {"example_4_6.json", "quadratic.json", "saddle_box.json"}) {
    const Run a = run("analyze " + problem(f) + " --json");
    const Run b = run("analyze " + problem(f) + " --json");
    CHECK(a.out == b.out);
  }
  const Run e1 = run("estimate " + problem("quadratic.json") + " --object d2 --w 1,0,0 --json");
  const Run e2 = run("estimate " + problem("quadratic.json") + " --object d2 --w 1,0,0 --json");
  CHECK(e1.out == e2.out);
}

TEST_CASE("seed precedence: flag over environment over file") {
  CHECK(parse(run("analyze " + problem("quadratic.json") + " --json"))["seed"] == 11);
  CHECK(parse(run("analyze " + problem("quadratic.json") + " --json", "VARCALC_SEED=5"))["seed"] == 5);
  CHECK(parse(run("analyze " + problem("quadratic.json") + " --json --seed 9", "VARCALC_SEED=5"))["seed"] == 9);
  CHECK(run("analyze " + problem("quadratic.json"), "VARCALC_SEED=abc").code == 2);
}

TEST_CASE("schema errors carry a JSON pointer and exit 2") {
  const std::string unknown = scratch("unknown.json", R"({"n": 1, "phi": {"expr": "x0^2"}, "x_bar": [0], "colour": 1})");
  Run r = run("analyze " + unknown, "", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("/colour") != std::string::npos);

  const std::string badtype = scratch("badtype.json", R"({"n": "one", "x_bar": [0]})");
  r = run("analyze " + badtype, "", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("/n") != std::string::npos);

  const std::string dims = scratch("dims.json", R"({"n": 2, "phi": {"expr": "x0^2"}, "x_bar": [0]})");
  r = run("analyze " + dims, "", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("/x_bar") != std::string::npos);

  const std::string nested = scratch("nested.json",
                                     R"({"n": 1, "phi": {"expr": "x0^2"}, "x_bar": [0], "options": {"schedule": {"t0": -1}}})");
  r = run("analyze " + nested, "", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("/options/schedule/t0") != std::string::npos);

  const std::string broken = scratch("broken.json", "{ not json");
  CHECK(run("analyze " + broken).code == 2);
  CHECK(run("analyze /nonexistent/file.json").code == 2);
}

TEST_CASE("flag validation") {
  CHECK(run("d2 " + problem("halfline.json")).code == 2);              // --w missing
  CHECK(run("d2 " + problem("halfline.json") + " --w 1,2").code == 2);  // wrong dimension
  CHECK(run("d2 " + problem("halfline.json") + " --w x").code == 2);
  CHECK(run("estimate " + problem("halfline.json") + " --object nope --w 1").code == 2);
  CHECK(run("no-such-command").code == 2);
  const Run v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("text reports mirror the JSON content") {
  const Run t = run("analyze " + problem("example_4_6.json"));
  REQUIRE(t.code == 0);
  CHECK(t.out.find("(vi) positive second subderivative") != std::string::npos);
  CHECK(t.out.find("consistency: true") != std::string::npos);
}
