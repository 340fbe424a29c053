// Command-line front end; talks to the engine only through the C interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pnm/pnm.h"

namespace {

constexpr unsigned long long kDefaultSeed = 20240601ULL;

struct SpecDeleter {
  void operator()(pnm_spec* s) const { pnm_spec_free(s); }
};
struct CalculusDeleter {
  void operator()(pnm_calculus* c) const { pnm_calculus_free(c); }
};
using SpecPtr = std::unique_ptr<pnm_spec, SpecDeleter>;
using CalculusPtr = std::unique_ptr<pnm_calculus, CalculusDeleter>;

int exit_code(pnm_status s) {
  switch (s) {
    case PNM_OK: return 0;
    case PNM_FAILS: return 1;
    case PNM_RESOURCE_ERROR: return 3;
    default: return 2;
  }
}

int report_error(pnm_status s) {
  std::cerr << "error: " << pnm_last_error() << "\n";
  return exit_code(s);
}

/// Writes owned text to a file or stdout and frees it.
bool emit(char* text, const std::string& path) {
  if (!text) return true;
  bool ok = true;
  if (path.empty()) {
    std::fputs(text, stdout);
  } else {
    std::ofstream out(path, std::ios::binary);
    out << text;
    ok = static_cast<bool>(out);
    if (!ok) std::cerr << "error: cannot write " << path << "\n";
  }
  pnm_string_free(text);
  return ok;
}

int finish(pnm_status s, char** slot, const std::string& path) {
  char* text = *slot;
  if (s != PNM_OK && s != PNM_FAILS) {
    pnm_string_free(text);
    return report_error(s);
  }
  if (!emit(text, path)) return 2;
  if (s == PNM_FAILS && *pnm_last_error()) std::cerr << pnm_last_error() << "\n";
  return exit_code(s);
}

int load(const std::string& path, SpecPtr& out) {
  pnm_spec* raw = nullptr;
  pnm_status s = pnm_spec_load(path.c_str(), &raw);
  out.reset(raw);
  return s == PNM_OK ? 0 : report_error(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for finite partial non-deterministic matrices"};
  app.require_subcommand(1);
  unsigned jobs = 1;
  unsigned long long seed = kDefaultSeed;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--seed", seed, "Seed for sampled runs")->capture_default_str();

  std::string input, output, gamma, delta, render = "text", check;
  unsigned depth = 3, oracle_depth = 1;
  bool sharp = false, oracle = false, raw = false;
  std::size_t max_nodes = 0, sample = 0;
  double timeout = 0;
  pnm_verify_options vopt;
  pnm_verify_defaults(&vopt);

  auto* strengthen = app.add_subcommand("strengthen", "Build the strengthened matrix for the file's axioms");
  strengthen->add_option("input", input, "Matrix file")->required();
  strengthen->add_option("-o,--output", output, "Output file (default stdout)");

  auto* consequence = app.add_subcommand("consequence", "Decide a sequent (or the file's queries)");
  consequence->add_option("input", input, "Matrix file")->required();
  auto* g_opt = consequence->add_option("--gamma", gamma, "Comma-separated premises");
  auto* d_opt = consequence->add_option("--delta", delta, "Comma-separated conclusions");
  consequence->add_flag("--sharp", sharp, "Use the strengthened matrix");
  consequence->add_flag("--axioms-oracle", oracle, "Use the bounded axiom oracle over the file's matrix");
  consequence->add_option("--depth", oracle_depth, "Oracle universe depth")->capture_default_str();

  auto* refinements = app.add_subcommand("refinements", "List maximal total refinements");
  refinements->add_option("input", input, "Matrix file")->required();
  refinements->add_flag("--sharp", sharp, "Use the strengthened matrix");

  auto* separators = app.add_subcommand("separators", "Find separators and partitions");
  separators->add_option("input", input, "Matrix file")->required();
  separators->add_option("--depth", depth, "Search depth")->capture_default_str();

  auto* calculus = app.add_subcommand("calculus", "Generate an analytic multiple-conclusion calculus");
  calculus->add_option("input", input, "Matrix file")->required();
  calculus->add_option("--depth", depth, "Separator search depth")->capture_default_str();
  calculus->add_flag("--raw", raw, "Skip strengthening and simplification");
  calculus->add_option("-o,--output", output, "Output file (default stdout)");

  auto* prove = app.add_subcommand("prove", "Search for a proof in a calculus");
  prove->add_option("calculus", input, "Calculus file")->required();
  auto* pg_opt = prove->add_option("--gamma", gamma, "Comma-separated premises");
  auto* pd_opt = prove->add_option("--delta", delta, "Comma-separated conclusions");
  prove->add_option("--render", render, "text or dot")->check(CLI::IsMember({"text", "dot"}))->capture_default_str();
  prove->add_option("--max-nodes", max_nodes, "Node limit (0 = default)");
  prove->add_option("--timeout", timeout, "Seconds (0 = default)");
  prove->add_option("--check", check, "Check a proof file instead of searching");
  prove->add_option("-o,--output", output, "Output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Compare the strengthened matrix with the bounded axiom oracle");
  verify->add_option("input", input, "Matrix file with axioms")->required();
  verify->add_option("--vars", vopt.vars, "Variables in the suite")->capture_default_str();
  verify->add_option("--depth", vopt.depth, "Depth of single-formula sequents")->capture_default_str();
  verify->add_option("--pair-depth", vopt.pair_depth, "Depth on two-sided sequents")->capture_default_str();
  verify->add_option("--max-side", vopt.max_side, "Largest side on two-sided sequents")->capture_default_str();
  verify->add_option("--oracle-depth", vopt.oracle_depth, "Deepest oracle universe")->capture_default_str();
  verify->add_option("--sample", sample, "Random sample size (0 = whole suite)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  SpecPtr spec;
  char* text = nullptr;

  if (*strengthen) {
    if (int rc = load(input, spec)) return rc;
    return finish(pnm_strengthen(spec.get(), &text), &text, output);
  }
  if (*consequence) {
    if (int rc = load(input, spec)) return rc;
    pnm_consequence_options o{sharp ? 1 : 0, oracle ? 1 : 0, oracle_depth};
    bool given = g_opt->count() > 0 || d_opt->count() > 0;
    return finish(pnm_consequence(spec.get(), given ? gamma.c_str() : nullptr, given ? delta.c_str() : nullptr, &o,
                                  &text),
                  &text, "");
  }
  if (*refinements) {
    if (int rc = load(input, spec)) return rc;
    return finish(pnm_refinements(spec.get(), sharp ? 1 : 0, &text), &text, "");
  }
  if (*separators) {
    if (int rc = load(input, spec)) return rc;
    return finish(pnm_separators(spec.get(), depth, &text), &text, "");
  }
  if (*calculus) {
    if (int rc = load(input, spec)) return rc;
    return finish(pnm_generate_calculus(spec.get(), depth, raw ? 1 : 0, jobs, &text), &text, output);
  }
  if (*prove) {
    pnm_calculus* raw_calc = nullptr;
    pnm_status s = pnm_calculus_load(input.c_str(), &raw_calc);
    CalculusPtr calc(raw_calc);
    if (s != PNM_OK) return report_error(s);
    if (!check.empty()) {
      std::ifstream in(check, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot read " << check << "\n";
        return 2;
      }
      std::string proof((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      return finish(pnm_check_proof(calc.get(), proof.c_str(), &text), &text, output);
    }
    (void)pg_opt;
    (void)pd_opt;
    pnm_render fmt = render == "dot" ? PNM_RENDER_DOT : PNM_RENDER_TEXT;
    return finish(pnm_prove(calc.get(), gamma.c_str(), delta.c_str(), fmt, max_nodes, timeout, &text), &text, output);
  }
  if (*verify) {
    if (int rc = load(input, spec)) return rc;
    vopt.sample = sample;
    vopt.seed = seed;
    vopt.jobs = jobs;
    return finish(pnm_verify(spec.get(), &vopt, &text), &text, "");
  }
  return 2;
}
