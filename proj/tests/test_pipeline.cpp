#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "igkit/error.hpp"
#include "igkit/pipeline.hpp"
#include "support.hpp"

using namespace igkit;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" IGKIT_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fixture_args(const std::string& corpus = "asf_like.jsonl",
                         const std::string& gold = "gold.jsonl") {
  return " --corpus \"" + test::fixture(corpus).string() + "\" --gold \"" +
         test::fixture(gold).string() + "\" --taxonomy \"" +
         test::fixture("taxonomy.conf").string() + "\"";
}

PipelineConfig fixture_config(const fs::path& out) {
  PipelineConfig c;
  c.corpus = test::fixture("asf_like.jsonl");
  c.gold = test::fixture("gold.jsonl");
  c.taxonomy = test::fixture("taxonomy.conf");
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("extract without a model fails with a diagnostic") {
  const auto dir = test::scratch_dir("no_model");
  PipelineConfig c = fixture_config(dir);
  run_stage(Stage::Ingest, c);
  try {
    run_stage(Stage::Extract, c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("model") != std::string::npos);
  }
  CHECK(run_cli("extract --out \"" + dir.string() + "\"" + fixture_args()) != 0);
}

TEST_CASE("later stages name the missing artifact") {
  const auto dir = test::scratch_dir("missing");
  PipelineConfig c = fixture_config(dir);
  try {
    run_stage(Stage::Analyze, c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  c.corpus = "/nonexistent/corpus.jsonl";
  CHECK_THROWS_AS(run_stage(Stage::Ingest, c), Error);
}

TEST_CASE("stage by stage equals all, and reruns are byte-identical") {
  const auto a = test::scratch_dir("stages");
  const auto b = test::scratch_dir("all_once");
  const auto c = test::scratch_dir("all_twice");
  for (const char* stage : {"ingest", "train", "extract", "cluster", "analyze", "report"}) {
    REQUIRE(run_cli(std::string(stage) + " --out \"" + a.string() + "\"" + fixture_args()) == 0);
  }
  REQUIRE(run_cli("all --out \"" + b.string() + "\"" + fixture_args()) == 0);
  REQUIRE(run_cli("all --out \"" + c.string() + "\"" + fixture_args()) == 0);
  const auto sa = test::snapshot(a);
  CHECK(sa == test::snapshot(b));
  CHECK(test::snapshot(b) == test::snapshot(c));
  CHECK(sa.contains("report.md"));
  const std::string md = sa.at("report.md");
  CHECK(md.find("chi2=") != std::string::npos);
  CHECK(md.find("chi2=", md.find("chi2=") + 1) != std::string::npos);
}

TEST_CASE("IG_SEED is used when --seed is absent") {
  const auto env_dir = test::scratch_dir("env_seed");
  const auto flag_dir = test::scratch_dir("flag_seed");
  REQUIRE(run_cli("ingest --out \"" + env_dir.string() + "\"" + fixture_args()) == 0);
  REQUIRE(run_cli("ingest --out \"" + flag_dir.string() + "\"" + fixture_args()) == 0);
  REQUIRE(run_cli("train --out \"" + env_dir.string() + "\"" + fixture_args(), "IG_SEED=7") == 0);
  REQUIRE(run_cli("train --seed 7 --out \"" + flag_dir.string() + "\"" + fixture_args()) == 0);
  const std::string model = test::read_file(env_dir / "model.tsv");
  CHECK(model.find("# seed=7\n") != std::string::npos);
  CHECK(model == test::read_file(flag_dir / "model.tsv"));
}

TEST_CASE("bad flags exit nonzero") {
  CHECK(run_cli("explode") != 0);
  CHECK(run_cli("all --format xml") != 0);
  CHECK(run_cli("cluster --min-cluster-size 1 --out \"" + test::scratch_dir("bad").string() + "\"" +
                fixture_args()) != 0);
}

TEST_CASE("zero deontic spans leaves the tests skipped") {
  const auto dir = test::scratch_dir("no_deontic");
  const fs::path corpus = dir / "corpus.jsonl";
  const fs::path gold = dir / "gold.jsonl";
  write_text_file(corpus,
                  R"({"doc_id":"d","statement_id":"s1","text":"The mentor reviews releases."})" "\n"
                  R"({"doc_id":"d","statement_id":"s2","text":"The podling votes."})" "\n");
  write_text_file(gold,
                  R"({"statement_id":"s1","labels":["A","A","I","B","NONE"]})" "\n"
                  R"({"statement_id":"s2","labels":["A","A","I","NONE"]})" "\n");
  PipelineConfig c;
  c.corpus = corpus;
  c.gold = gold;
  c.taxonomy = test::fixture("taxonomy.conf");
  c.out = dir / "run";
  run_stage(Stage::All, c);
  const std::string md = test::read_file(c.out / "report.md");
  CHECK(md.find("Test skipped") != std::string::npos);
  CHECK(md.find("chi2=") == std::string::npos);
}

TEST_CASE("analysis jsonl round trip") {
  AnalysisRecord r;
  r.statement_id = "s1";
  r.doc_id = "d";
  r.agent_category = AgentCategory::Authority;
  r.deontic_class = DeonticClass::Proscriptive;
  r.deontic_text = "must not";
  AnalysisRecord empty;
  empty.statement_id = "s2";
  empty.doc_id = "d";
  const std::vector<AnalysisRecord> records = {r, empty};
  std::stringstream buffer;
  write_analysis_jsonl(records, buffer);
  CHECK(read_analysis_jsonl(buffer) == records);
}
