// Subprocess driver for the command-line tool: exercises every subcommand
// and the documented exit-code contract (0 certified/ok, 1 unsolvable or
// failed verification, 2 invalid input, 3 pipeline failure).
// Usage: cli_workflow <path-to-binary>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int checks = 0, failed = 0;
std::string binary;
fs::path dir;

int run(const std::string& args) {
  std::string cmd = binary + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  if (st == -1 || !WIFEXITED(st)) return -1;
  return WEXITSTATUS(st);
}

void expect(const std::string& args, int want) {
  ++checks;
  int got = run(args);
  if (got != want) {
    ++failed;
    std::cout << "FAIL: `" << args << "` exited " << got << ", expected " << want << "\n";
  }
}

void expect_true(bool cond, const std::string& what) {
  ++checks;
  if (!cond) {
    ++failed;
    std::cout << "FAIL: " << what << "\n";
  }
}

std::string path(const std::string& name) { return (dir / name).string(); }

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: cli_workflow <binary>\n";
    return 2;
  }
  binary = argv[1];
  dir = fs::temp_directory_path() / ("padsolve_cli_test_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Generate, solve, lift, verify: the happy path.
  expect("gen --p 5 --tau 1 --s 1600 --seed 9 -o " + path("sys.txt"), 0);
  expect("solve " + path("sys.txt") + " --lift-to 10 --certificate-out " + path("cert.txt") +
             " --solution-out " + path("sol.txt") + " --log " + path("run.jsonl"),
         0);
  expect("verify " + path("sys.txt") + " --certificate " + path("cert.txt"), 0);
  expect_true(fs::exists(path("sol.txt")), "solve --solution-out wrote a solution file");

  // The run log is one JSON object per line, starting with a run record.
  {
    std::ifstream log(path("run.jsonl"));
    std::string line;
    std::size_t records = 0;
    bool ok = static_cast<bool>(log);
    bool saw_run = false, saw_contraction = false;
    while (std::getline(log, line)) {
      try {
        auto j = nlohmann::json::parse(line);
        std::string kind = j.at("record");
        if (kind == "run") saw_run = j.at("status") == "certified";
        if (kind == "contraction") saw_contraction = true;
        ++records;
      } catch (...) {
        ok = false;
      }
    }
    expect_true(ok && records > 0, "run log parses as line-delimited JSON");
    expect_true(saw_run && saw_contraction, "run log carries run and contraction records");
  }

  // A broken certificate fails verification with exit 1.
  {
    std::ofstream bad(path("bad.cert"));
    bad << "0\n1\n";
  }
  expect("verify " + path("sys.txt") + " --certificate " + path("bad.cert"), 1);
  expect("verify " + path("sys.txt") + " --certificate " + path("missing.cert"), 2);

  // Normalization: a raw profile already in shape round-trips with exit 0.
  expect("gen --p 3 --tau 1 --s 40 --seed 5 --profile raw -o " + path("raw.txt"), 0);
  expect("normalize " + path("raw.txt") + " -o " + path("norm.txt"), 0);
  expect("solve " + path("norm.txt") + " --mode opportunistic", 0);

  // Oracle on a tiny system agrees with opportunistic solve.
  expect("gen --p 3 --tau 1 --s 10 --seed 2 -o " + path("tiny.txt"), 0);
  int oracle_code = run("oracle " + path("tiny.txt") + " --certificate-out " + path("tiny.cert"));
  int solve_code = run("solve " + path("tiny.txt") + " --mode opportunistic");
  expect_true(oracle_code == solve_code && (oracle_code == 0 || oracle_code == 1),
              "oracle and opportunistic solve agree on solvability");
  if (oracle_code == 0)
    expect("verify " + path("tiny.txt") + " --certificate " + path("tiny.cert"), 0);

  // Guaranteed-mode rejections and pipeline failures keep their exit codes.
  expect("solve " + path("tiny.txt"), 2);  // p = 3 outside the guaranteed cases
  expect("gen --p 5 --tau 1 --s 30 --seed 3 -o " + path("small5.txt"), 0);
  expect("solve " + path("small5.txt"), 2);  // below the size bound
  expect("solve " + path("small5.txt") + " --mode opportunistic --no-oracle-fallback", 3);
  expect("solve " + path("small5.txt") + " --mode opportunistic", 0);

  // Strict constants move the guaranteed threshold.
  expect("solve " + path("sys.txt") + " --strict-constants", 2);

  // Lemma suites: pass, fail arguments, unknown names.
  expect("lemma olson --p 3 --samples 500 --seed 1", 0);
  expect("lemma davenport --p 3 --exhaustive", 0);
  expect("lemma alon --p 5 --samples 50 --seed 2", 0);
  expect("lemma alon --exhaustive", 2);
  expect("lemma nosuch", 2);
  expect("lemma cd --p 99991 --exhaustive", 2);

  // Malformed input files are invalid, exit 2.
  {
    std::ofstream junk(path("junk.txt"));
    junk << "3 1 3 2\n1 2\n";  // missing a column line
  }
  expect("solve " + path("junk.txt"), 2);
  expect("solve " + path("junk.txt") + " --mode opportunistic", 2);
  expect("normalize " + path("junk.txt"), 2);
  expect("oracle " + path("junk.txt"), 2);
  expect("gen --p 4 --tau 1 --s 5", 2);

  // Batch mode: worst exit code wins, every file reported.
  fs::create_directories(path("batch"));
  expect("gen --p 5 --tau 1 --s 1600 --seed 11 -o " + path("batch/a.txt"), 0);
  expect("gen --p 5 --tau 1 --s 1600 --seed 12 -o " + path("batch/b.txt"), 0);
  expect("solve --batch " + path("batch"), 0);
  expect("gen --p 5 --tau 1 --s 30 --seed 13 -o " + path("batch/c.txt"), 0);
  expect("solve --batch " + path("batch"), 2);
  expect("solve --batch " + path("nodir"), 2);

  // Unknown flags and missing subcommands are CLI errors.
  ++checks;
  if (run("solve") == 0 || run("") == 0 || run("--nonsense") == 0) {
    ++failed;
    std::cout << "FAIL: malformed command lines must not exit 0\n";
  }

  fs::remove_all(dir);
  if (failed == 0) {
    std::cout << "cli workflow: " << checks << " checks passed\n";
    return 0;
  }
  std::cout << "cli workflow: " << failed << " of " << checks << " checks failed\n";
  return 1;
}
