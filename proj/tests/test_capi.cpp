#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <fstream>
#include <string>

#include "clap/capi.h"
#include "doctest.h"

TEST_CASE("version and error strings are always available") {
  CHECK(clap_version() != nullptr);
  CHECK(clap_last_error() != nullptr);
}

TEST_CASE("null arguments are rejected") {
  CHECK(clap_domain_parse(nullptr, nullptr) == CLAP_ERR_INVALID_ARG);
  CHECK(clap_run_experiment(nullptr) == CLAP_ERR_INVALID_ARG);
  CHECK(clap_report(nullptr, "x") == CLAP_ERR_INVALID_ARG);
  CHECK(clap_plot("x", nullptr) == CLAP_ERR_INVALID_ARG);
  clap_domain* d = nullptr;
  CHECK(clap_mutate_chain(d, 0, 1, nullptr, nullptr) == CLAP_ERR_INVALID_ARG);
}

TEST_CASE("parse failures set codes and messages") {
  clap_domain* d = nullptr;
  CHECK(clap_domain_parse("(not pddl", &d) == CLAP_ERR_PARSE);
  CHECK(std::strlen(clap_last_error()) > 0);
  CHECK(clap_domain_parse_file("/nonexistent.ppddl", &d) != CLAP_OK);
}

TEST_CASE("parse, serialize, reparse round trip") {
  clap_domain* d = nullptr;
  REQUIRE(clap_domain_parse_file("domains/warehouse.ppddl", &d) == CLAP_OK);
  char* text = nullptr;
  REQUIRE(clap_domain_serialize(d, &text) == CLAP_OK);
  REQUIRE(text != nullptr);
  clap_domain* d2 = nullptr;
  CHECK(clap_domain_parse(text, &d2) == CLAP_OK);
  char* text2 = nullptr;
  REQUIRE(clap_domain_serialize(d2, &text2) == CLAP_OK);
  CHECK(std::string(text) == text2);
  clap_string_free(text);
  clap_string_free(text2);
  clap_domain_free(d);
  clap_domain_free(d2);
}

TEST_CASE("mutate chain produces a spec and a valid domain") {
  clap_domain* d = nullptr;
  REQUIRE(clap_domain_parse_file("domains/blocksworld.ppddl", &d) == CLAP_OK);
  clap_domain* out = nullptr;
  char* spec = nullptr;
  REQUIRE(clap_mutate_chain(d, 11, 3, &out, &spec) == CLAP_OK);
  REQUIRE(out != nullptr);
  REQUIRE(spec != nullptr);
  CHECK(std::string(spec).find("\"edits\"") != std::string::npos);
  char* text = nullptr;
  CHECK(clap_domain_serialize(out, &text) == CLAP_OK);
  clap_string_free(text);
  clap_string_free(spec);
  clap_domain_free(out);
  CHECK(clap_mutate_chain(d, 11, 0, nullptr, nullptr) == CLAP_ERR_INVALID_ARG);
  clap_domain_free(d);
}

TEST_CASE("experiment, report and plot through the C surface") {
  {
    std::ofstream f("/tmp/clap_capi_manifest.txt");
    f << "domain = domains/bandit_a.ppddl\n"
         "problem = domains/bandit_p1.ppddl\n"
         "tasks = 1\nbudget = 300\nmethods = oracle\nseeds = 0\n"
         "eval_every = 100\nout = /tmp/clap_capi_out\n";
  }
  REQUIRE(clap_run_experiment("/tmp/clap_capi_manifest.txt") == CLAP_OK);
  CHECK(clap_report("/tmp/clap_capi_out/metrics.jsonl", "/tmp/clap_capi_out/re.csv") == CLAP_OK);
  CHECK(clap_plot("/tmp/clap_capi_out/metrics.jsonl", "/tmp/clap_capi_out/re.svg") == CLAP_OK);
  CHECK(clap_report("/tmp/clap_capi_out/missing.jsonl", "/tmp/x.csv") != CLAP_OK);

  std::ifstream csv("/tmp/clap_capi_out/re.csv");
  CHECK(csv.good());
  std::ifstream svg("/tmp/clap_capi_out/re.svg");
  CHECK(svg.good());
}

TEST_CASE("bad manifest is a validation error") {
  {
    std::ofstream f("/tmp/clap_capi_bad.txt");
    f << "problem = only\n";
  }
  CHECK(clap_run_experiment("/tmp/clap_capi_bad.txt") == CLAP_ERR_VALIDATION);
}
