// clap command-line front end. Talks to the core exclusively through the
// C API in clap/capi.h.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "clap/capi.h"

namespace {

int fail(clap_status st, const std::string& what) {
  std::cerr << "error: " << what << ": " << clap_last_error() << " (code " << st << ")\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clap: continual learning and planning benchmark toolkit"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "benchmark commands");
  bench->require_subcommand(1);

  std::string manifest_path;
  auto* run = bench->add_subcommand("run", "run every (method x seed) cell of a manifest");
  run->add_option("--manifest", manifest_path, "plain-text key=value manifest")->required();

  std::string mut_domain, mut_out;
  uint64_t mut_seed = 0;
  int mut_chain = 1;
  auto* mutate = bench->add_subcommand("mutate", "apply a chain of random domain mutations");
  mutate->add_option("--domain", mut_domain, "input domain file")->required();
  mutate->add_option("--seed", mut_seed, "rng seed");
  mutate->add_option("--chain", mut_chain, "number of successive mutations")
      ->check(CLI::PositiveNumber);
  mutate->add_option("--out", mut_out, "write the mutated domain here (default: stdout)");

  std::string rep_in, rep_out;
  auto* report = bench->add_subcommand("report", "aggregate a metrics.jsonl into CSV");
  report->add_option("--in", rep_in, "metrics.jsonl path")->required();
  report->add_option("--out", rep_out, "aggregate CSV path")->required();

  std::string plot_in, plot_out;
  auto* plot = bench->add_subcommand("plot", "render learning curves as SVG");
  plot->add_option("--in", plot_in, "metrics.jsonl path")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    clap_status st = clap_run_experiment(manifest_path.c_str());
    if (st != CLAP_OK) return fail(st, "bench run");
    std::cout << "experiment complete\n";
    return 0;
  }

  if (mutate->parsed()) {
    clap_domain* in = nullptr;
    clap_status st = clap_domain_parse_file(mut_domain.c_str(), &in);
    if (st != CLAP_OK) return fail(st, "parse " + mut_domain);
    clap_domain* out = nullptr;
    char* spec_json = nullptr;
    st = clap_mutate_chain(in, mut_seed, mut_chain, &out, &spec_json);
    clap_domain_free(in);
    if (st != CLAP_OK) return fail(st, "mutate");
    char* text = nullptr;
    st = clap_domain_serialize(out, &text);
    clap_domain_free(out);
    if (st != CLAP_OK) {
      clap_string_free(spec_json);
      return fail(st, "serialize");
    }
    if (mut_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(mut_out);
      f << text;
    }
    std::cerr << spec_json << "\n";
    clap_string_free(text);
    clap_string_free(spec_json);
    return 0;
  }

  if (report->parsed()) {
    clap_status st = clap_report(rep_in.c_str(), rep_out.c_str());
    if (st != CLAP_OK) return fail(st, "bench report");
    return 0;
  }

  if (plot->parsed()) {
    clap_status st = clap_plot(plot_in.c_str(), plot_out.c_str());
    if (st != CLAP_OK) return fail(st, "bench plot");
    return 0;
  }

  return 0;
}
