#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "clinrel_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " > " + (workdir() / "stdout.txt").string() +
                          " 2> " + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus_path() {
  static const std::string path = [] {
    auto p = (workdir() / "g.jsonl").string();
    REQUIRE(run("generate --out " + p + " --docs 8 --seed 3 --min-sentences 3 --max-sentences 6") == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("") == 1);
  CHECK(run("train --bogus-flag") == 1);
  CHECK(run("train --corpus " + corpus_path() + " --out " + (workdir() / "m.json").string() +
            " --algorithm knn --k 0") == 1);
  CHECK(run("train --corpus " + corpus_path() + " --out x --algorithm nope") == 1);
  CHECK(run("train --corpus " + corpus_path() + " --out x --tau 1.5") == 1);
  const auto err = read(workdir() / "stderr.txt");
  CHECK(err.rfind("error: ", 0) == 0);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);
}

TEST_CASE("data errors exit 2") {
  const auto bad = workdir() / "bad.jsonl";
  std::ofstream(bad) << "{\"id\": \"d1\", \"text\": 5}\n";
  CHECK(run("train --corpus " + bad.string() + " --out " + (workdir() / "m.json").string()) == 2);
  CHECK(run("train --corpus /nonexistent/c.jsonl --out " + (workdir() / "m.json").string()) == 2);
  const auto bad_model = workdir() / "bad_model.json";
  std::ofstream(bad_model) << "{\"format\": \"something\"}\n";
  CHECK(run("predict --model " + bad_model.string() + " --corpus " + corpus_path() + " --out " +
            (workdir() / "p.jsonl").string()) == 2);
}

TEST_CASE("train, predict and evaluate round trip") {
  const auto model = (workdir() / "svm.json").string();
  CHECK(run("train --corpus " + corpus_path() + " --out " + model + " --algorithm svm --tau 0.8 --c 0.7 --degree 2") ==
        0);
  CHECK(fs::exists(model));
  const auto pred = (workdir() / "pred.jsonl").string();
  CHECK(run("predict --model " + model + " --corpus " + corpus_path() + " --out " + pred) == 0);
  CHECK(fs::exists(pred));
  const auto out_dir = workdir() / "eval";
  CHECK(run("evaluate --key " + corpus_path() + " --response " + pred + " --out-dir " + out_dir.string()) == 0);
  CHECK(read(workdir() / "stdout.txt").rfind("Relationship type\tMetric (%)", 0) == 0);
  CHECK(run("evaluate --key " + corpus_path() + " --model " + model + " --out-dir " + out_dir.string()) == 0);
}

TEST_CASE("tau experiment prints five columns") {
  const auto out_dir = workdir() / "tau";
  CHECK(run("experiment tau --corpus " + corpus_path() + " --values 1.0,0.8,0.6,0.4,0.2 --folds 2 --out-dir " +
            out_dir.string()) == 0);
  const auto table = read(out_dir / "tau.tsv");
  std::istringstream lines(table);
  std::string caption, header;
  std::getline(lines, caption);
  std::getline(lines, header);
  CHECK(caption == "\tUneven margin (τ)");
  // Leading blank cell, metric label, then one column per tau value.
  CHECK(header == "\tMetric (%)\t1.0\t0.8\t0.6\t0.4\t0.2");
  for (std::string row; std::getline(lines, row);) CHECK(std::count(row.begin(), row.end(), '\t') == 6);
  CHECK(fs::exists(out_dir / "tau.json"));
  CHECK(read(workdir() / "stdout.txt") == table);
}

TEST_CASE("generate is deterministic") {
  const auto a = (workdir() / "a.jsonl").string(), b = (workdir() / "b.jsonl").string();
  CHECK(run("generate --out " + a + " --docs 3 --seed 9") == 0);
  CHECK(run("generate --out " + b + " --docs 3 --seed 9") == 0);
  CHECK(read(a) == read(b));
  CHECK_FALSE(read(a).empty());
}
