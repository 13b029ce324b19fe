#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "rankbench/car.hpp"
#include "rankbench/io.hpp"

using namespace rankbench;

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string cli() { return std::string(RANKBENCH_CLI); }

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("convert writes a rank network that round-trips") {
  const std::string out = temp_path("cli_rank.json");
  auto r = run_cmd(cli() + " convert --epsilon 0.1 --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("kappa=0:") != std::string::npos);
  RankNetwork rn = read_rank_network(out);
  CHECK(validate(rn).ok());

  const std::string out2 = temp_path("cli_rank2.json");
  write_rank_network(rn, out2);
  CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("convert rejects an out-of-range epsilon with a usage exit") {
  auto r = run_cmd(cli() + " convert --epsilon 1.5 --out " + temp_path("cli_x.json"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("a deterministic table converts to ranks 0 and inf only") {
  Network net;
  net.add_variable("A", {"absent", "present"});
  net.add_variable("B", {"absent", "present"});
  net.set_prior("A", {1.0, 0.0});
  net.set_table("B", {"A"}, {{1.0, 0.0}, {0.0, 1.0}});
  const std::string netfile = temp_path("cli_det.json");
  write_network(net, netfile);

  auto r = run_cmd(cli() + " convert --network " + netfile + " --epsilon 0.1 --out " +
                   temp_path("cli_det_rank.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("kappa=0: 3") != std::string::npos);
  CHECK(r.out.find("kappa=inf: 3") != std::string::npos);
  CHECK(r.out.find("kappa=1:") == std::string::npos);
}

TEST_CASE("infer without evidence echoes the priors") {
  auto r = run_cmd(cli() + " infer --engine numeric");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("starter") != std::string::npos);
  CHECK(r.out.find("present=0.000160") != std::string::npos);   // starter prior
  CHECK(r.out.find("present=0.001000") != std::string::npos);   // spark-plugs prior
}

TEST_CASE("infer with the kappa engine prints a normalized plausible set") {
  auto r = run_cmd(cli() + " infer --engine kappa --epsilon 0.1 --evidence engine-start=absent");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("plausible set (min rank 0, size 8)") != std::string::npos);
}

TEST_CASE("infer on the full modal starter case keeps starter plausible") {
  CarModel model = build_reference_model();
  Evidence modal = modal_findings(model, "starter");
  std::string cmd = cli() + " infer --engine kappa --epsilon 0.1";
  for (const auto& [k, v] : modal) cmd += " --evidence " + k + "=" + v;
  auto r = run_cmd(cmd);
  CHECK(r.exit_code == 0);
  auto line = r.out.substr(r.out.find("plausible set"));
  CHECK(line.find("starter") != std::string::npos);
  CHECK(line.find("min rank 0") != std::string::npos);
}

TEST_CASE("contradictory evidence yields a diagnostic message and usage exit") {
  auto r = run_cmd(cli() +
                   " infer --engine numeric"
                   " --evidence engine-start=present --evidence engine-turn-over=absent");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("no support") != std::string::npos);
}

TEST_CASE("cases writes the 116-case suite") {
  const std::string out = temp_path("cli_cases.json");
  auto r = run_cmd(cli() + " cases --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(read_cases(out).size() == 116);
}

TEST_CASE("run produces deterministic results and figure files") {
  const std::string subset = temp_path("cli_subset.json");
  {
    CarModel model = build_reference_model();
    auto cases = generate_cases(model);
    std::ofstream out(subset);
    out << "[";
    for (int i = 0; i < 24; ++i) out << (i ? "," : "") << '"' << cases[i].id << '"';
    out << "]";
  }
  const std::string dir1 = temp_path("cli_run1");
  const std::string dir2 = temp_path("cli_run2");
  const std::string flags = " run --subset " + subset +
                            " --odds-factor 1 --odds-factor 10 --epsilon 0.1 --seed 7 --out ";
  auto r1 = run_cmd(cli() + flags + dir1);
  CHECK(r1.exit_code == 0);
  auto r2 = run_cmd(cli() + flags + dir2);
  CHECK(r2.exit_code == 0);

  namespace fs = std::filesystem;
  for (const char* name : {"results.csv", "fig3.csv", "fig4.csv", "fig5.csv", "fig6.csv"}) {
    const std::string a = (fs::path(dir1) / name).string();
    const std::string b = (fs::path(dir2) / name).string();
    REQUIRE(fs::exists(a));
    CHECK(slurp(a) == slurp(b));
  }
}

TEST_CASE("run reports failures through the exit code") {
  const std::string cases_file = temp_path("cli_badcases.json");
  {
    std::ofstream out(cases_file);
    out << R"([{"case-id":"bad-01","true-fault":"starter","n-findings":1,
               "evidence":{"engine-start":"no-such-value"}}])";
  }
  auto r = run_cmd(cli() + " run --cases " + cases_file + " --odds-factor 1 --epsilon 0.1 --out " +
                   temp_path("cli_badrun"));
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("failed") != std::string::npos);
}

TEST_CASE("report rebuilds figures from an existing results file") {
  const std::string dir = temp_path("cli_rerun");
  auto r1 = run_cmd(cli() + " run --odds-factor 1 --epsilon 0.1 --out " + dir);
  REQUIRE(r1.exit_code == 0);

  const std::string dir2 = temp_path("cli_rereport");
  auto r2 = run_cmd(cli() + " report --records " + dir + "/results.csv --out " + dir2);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(dir2 + "/fig4.csv") == slurp(dir + "/fig4.csv"));
}

TEST_CASE("diagnose asserts, undoes, and quits") {
  auto r = run_cmd("printf 'absent\\nundo\\nengine-start=absent\\nquit\\n' | " + cli() +
                   " diagnose --epsilon 0.1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("--- posteriors #1 (1 findings)") != std::string::npos);
  CHECK(r.out.find("--- posteriors #2 (0 findings)") != std::string::npos);
  CHECK(r.out.find("--- posteriors #3 (1 findings)") != std::string::npos);

  // the state after assert+undo+assert matches the first assertion
  auto block = [&](const char* marker) {
    auto start = r.out.find(marker);
    REQUIRE(start != std::string::npos);
    start = r.out.find('\n', start) + 1;  // drop the numbered header
    auto end = r.out.find("min rank", start);
    REQUIRE(end != std::string::npos);
    end = r.out.find('\n', end);
    return r.out.substr(start, end - start);
  };
  std::string first = block("--- posteriors #1");
  std::string third = block("--- posteriors #3");
  CHECK(first == third);
  CHECK(first.find("plausible set size 8") != std::string::npos);
}

TEST_CASE("diagnose re-prompts on unknown findings without changing state") {
  auto r = run_cmd("printf 'bogus=absent\\nengine-start=banana\\nquit\\n' | " + cli() +
                   " diagnose --epsilon 0.1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("unknown finding: bogus") != std::string::npos);
  CHECK(r.out.find("value 'banana' not in the domain") != std::string::npos);
  CHECK(r.out.find("--- posteriors") == std::string::npos);
}

TEST_CASE("diagnose after ten assertions matches infer on the same evidence") {
  CarModel model = build_reference_model();
  Evidence modal = modal_findings(model, "battery");
  std::string input;
  for (const auto& [k, v] : modal) input += k + "=" + v + "\\n";
  input += "quit\\n";
  auto repl = run_cmd("printf '" + input + "' | " + cli() + " diagnose --epsilon 0.1");
  CHECK(repl.exit_code == 0);

  std::string cmd = cli() + " infer --engine kappa --epsilon 0.1";
  for (const auto& [k, v] : modal) cmd += " --evidence " + k + "=" + v;
  auto infer = run_cmd(cmd);

  // same plausible-set size and membership marker for the true fault
  auto set_line = infer.out.substr(infer.out.find("plausible set"));
  auto size_pos = set_line.find("size ");
  const std::string size = set_line.substr(size_pos + 5, set_line.find(")") - size_pos - 5);
  CHECK(repl.out.find("plausible set size " + size) != std::string::npos);
  CHECK(set_line.find("battery") != std::string::npos);
}
