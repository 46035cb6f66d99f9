// End-to-end checks of the command-line tool. The binary path arrives as
// argv[1] from CTest.

#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "cdec/data_io.hpp"
#include "doctest.h"

namespace {

std::string g_binary;
std::string g_dir;

int run(const std::string &args) {
  const std::string command = g_binary + " " + args + " 2>/dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path_of(const std::string &name) { return g_dir + "/" + name; }

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("synth -> cdec -> metrics round trip") {
  const auto samples = path_of("corpus.jsonl");
  CHECK(run("synth --output " + samples +
            " --k 6 --s 3 --n-id 80 --n-ood 80 --concentration-id 0.2"
            " --concentration-ood 0.2 --spread-id 300 --spread-ood 2"
            " --seed 9") == 0);

  const auto report = path_of("report.jsonl");
  CHECK(run("cdec --input " + samples + " --output " + report +
            " --gamma 0.1 --epsilon 0.01 --jobs 2") == 0);
  const auto loaded = cdec::load_report(report);
  CHECK(loaded.records.size() == 160);
  REQUIRE(loaded.summary.has_value());
  CHECK(loaded.summary->n == 160);
  CHECK(loaded.summary->n_errors == 0);

  const auto metrics = path_of("metrics.jsonl");
  CHECK(run("metrics --input " + report + " --output " + metrics) == 0);
  std::ifstream in(metrics);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"ece\"") != std::string::npos);
  CHECK(text.find("\"auroc\"") != std::string::npos);
}

TEST_CASE("idec rejects multi-member rows without the collapse flag") {
  const auto samples = path_of("multi.jsonl");
  write_text(samples,
             R"({"id":"m","ensemble":[[0.5,0.5],[0.6,0.4],[0.7,0.3]]})" "\n");
  const auto report = path_of("idec_report.jsonl");
  CHECK(run("idec --input " + samples + " --output " + report) == 3);
  CHECK(run("idec --input " + samples + " --output " + report +
            " --collapse-ensemble") == 0);
}

TEST_CASE("idec reports d*, xi and conservativeness") {
  const auto samples = path_of("worked.jsonl");
  write_text(samples,
             R"({"id":"w","ensemble":[[0.7,0.2,0.08,0.02]],"true_label":1})"
             "\n");
  const auto report = path_of("worked_report.jsonl");
  CHECK(run("idec --input " + samples + " --output " + report +
            " --gamma 0.05 --epsilon 1.0") == 0);
  const auto loaded = cdec::load_report(report);
  REQUIRE(loaded.records.size() == 1);
  CHECK(loaded.records[0].kind == "predict");
  CHECK(loaded.records[0].region == std::vector<int>{0, 1, 2});
  CHECK(*loaded.records[0].d_star == doctest::Approx(30.0 / 19.0).epsilon(1e-9));
  CHECK(loaded.records[0].conservativeness.has_value());
}

TEST_CASE("empty input file exits 0 with a bare summary") {
  const auto samples = path_of("empty.jsonl");
  write_text(samples, "");
  const auto report = path_of("empty_report.jsonl");
  CHECK(run("cdec --input " + samples + " --output " + report) == 0);
  const auto loaded = cdec::load_report(report);
  CHECK(loaded.records.empty());
  REQUIRE(loaded.summary.has_value());
  CHECK(loaded.summary->n == 0);
}

TEST_CASE("exit codes: usage 2, data 3") {
  CHECK(run("cdec --input x") == 2);                 // missing --output
  CHECK(run("bogus-verb") == 2);
  const auto report = path_of("unused.jsonl");
  CHECK(run("cdec --input /nonexistent.jsonl --output " + report) == 3);
  CHECK(run("cdec --input /dev/null --output " + report +
            " --gamma 1.5") == 2);                   // bad config value

  const auto bad = path_of("bad.jsonl");
  write_text(bad, R"({"id":"b","ensemble":[[0.7,0.5]]})" "\n");
  CHECK(run("cdec --input " + bad + " --output " + report) == 3);
}

TEST_CASE("reports are deterministic and flags override the config file") {
  const auto samples = path_of("det.jsonl");
  CHECK(run("synth --output " + samples +
            " --k 5 --s 3 --n-id 50 --concentration-id 0.3 --spread-id 50"
            " --seed 21") == 0);

  const auto r1 = path_of("det1.jsonl");
  const auto r2 = path_of("det2.jsonl");
  CHECK(run("cdec --input " + samples + " --output " + r1 +
            " --gamma 0.1 --epsilon 0.01 --jobs 3") == 0);
  CHECK(run("cdec --input " + samples + " --output " + r2 +
            " --gamma 0.1 --epsilon 0.01") == 0);
  std::ifstream in1(r1), in2(r2);
  const std::string text1((std::istreambuf_iterator<char>(in1)),
                          std::istreambuf_iterator<char>());
  const std::string text2((std::istreambuf_iterator<char>(in2)),
                          std::istreambuf_iterator<char>());
  CHECK(text1 == text2);

  // The --gamma flag wins over the config file value.
  const auto config = path_of("config.json");
  write_text(config, R"({"gamma":0.4,"epsilon":0.01})");
  const auto r3 = path_of("det3.jsonl");
  CHECK(run("cdec --input " + samples + " --output " + r3 + " --config " +
            config + " --gamma 0.1") == 0);
  std::ifstream in3(r3);
  const std::string text3((std::istreambuf_iterator<char>(in3)),
                          std::istreambuf_iterator<char>());
  CHECK(text3 == text1);
}

TEST_CASE("ablate writes one row per grid entry") {
  const auto samples = path_of("deep.jsonl");
  CHECK(run("synth --output " + samples +
            " --k 5 --s 6 --n-id 40 --concentration-id 0.3 --spread-id 20"
            " --seed 3") == 0);
  const auto table = path_of("ablate.jsonl");
  CHECK(run("ablate --input " + samples + " --output " + table +
            " --grid 1,3,6 --epsilon 0.01") == 0);
  std::ifstream in(table);
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 3);
}

int main(int argc, char **argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <binary>\n");
    return 1;
  }
  g_binary = argv[1];
  char tmpl[] = "/tmp/cdec_cli_XXXXXX";
  if (!mkdtemp(tmpl)) return 1;
  g_dir = tmpl;

  doctest::Context context;
  const int rc = context.run();
  if (std::system(("rm -rf " + g_dir).c_str()) != 0)
    std::fprintf(stderr, "cleanup of %s failed\n", g_dir.c_str());
  return rc;
}
