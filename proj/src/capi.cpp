#include "clap/capi.h"

#include <cstdlib>
#include <cstring>
#include <random>
#include <string>

#include "clap/bench.hpp"
#include "clap/ppddl.hpp"

struct clap_domain {
  clap::ppddl::LiftedDomain domain;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
clap_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const clap::ppddl::ParseError& e) {
    g_last_error = e.what();
    return CLAP_ERR_PARSE;
  } catch (const clap::ppddl::ValidationError& e) {
    g_last_error = e.what();
    return CLAP_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CLAP_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return CLAP_ERR_RUNTIME;
  }
}

}  // namespace

extern "C" {

const char* clap_version(void) { return "1.0.0"; }

const char* clap_last_error(void) { return g_last_error.c_str(); }

clap_status clap_domain_parse(const char* text, clap_domain** out) {
  if (!text || !out) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    auto* h = new clap_domain{};
    h->domain = clap::ppddl::parse_domain(text);
    *out = h;
    return CLAP_OK;
  });
}

clap_status clap_domain_parse_file(const char* path, clap_domain** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    auto* h = new clap_domain{};
    h->domain = clap::ppddl::parse_domain_file(path);
    *out = h;
    return CLAP_OK;
  });
}

clap_status clap_domain_serialize(const clap_domain* d, char** out_text) {
  if (!d || !out_text) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    *out_text = dup_string(clap::ppddl::serialize_domain(d->domain));
    return *out_text ? CLAP_OK : CLAP_ERR_RUNTIME;
  });
}

void clap_domain_free(clap_domain* d) { delete d; }

clap_status clap_mutate_chain(const clap_domain* d, uint64_t seed, int chain,
                              clap_domain** out_domain, char** out_spec_json) {
  if (!d || chain < 1) {
    g_last_error = !d ? "null argument" : "chain must be >= 1";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    std::mt19937_64 rng(seed);
    clap::ppddl::LiftedDomain cur = d->domain;
    nlohmann::json specs = nlohmann::json::array();
    for (int i = 0; i < chain; ++i) {
      auto [next, spec] = clap::bench::mutate_domain(cur, rng);
      spec.seed = seed;
      cur = std::move(next);
      specs.push_back(spec.to_json());
    }
    if (out_domain) {
      auto* h = new clap_domain{};
      h->domain = std::move(cur);
      *out_domain = h;
    }
    if (out_spec_json) *out_spec_json = dup_string(specs.dump(2));
    return CLAP_OK;
  });
}

clap_status clap_run_experiment(const char* manifest_path) {
  if (!manifest_path) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    clap::bench::run_experiment(clap::bench::Manifest::load(manifest_path));
    return CLAP_OK;
  });
}

clap_status clap_report(const char* metrics_path, const char* csv_path) {
  if (!metrics_path || !csv_path) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    clap::bench::report(clap::bench::read_metrics(metrics_path), csv_path);
    return CLAP_OK;
  });
}

clap_status clap_plot(const char* metrics_path, const char* svg_path) {
  if (!metrics_path || !svg_path) {
    g_last_error = "null argument";
    return CLAP_ERR_INVALID_ARG;
  }
  return guarded([&] {
    clap::bench::plot(clap::bench::read_metrics(metrics_path), svg_path);
    return CLAP_OK;
  });
}

void clap_string_free(char* s) { std::free(s); }

}  // extern "C"
