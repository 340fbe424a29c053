#include "pnm/pnm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "pnm/calculus.hpp"
#include "pnm/error.hpp"
#include "pnm/io.hpp"
#include "pnm/proof.hpp"
#include "pnm/sharp.hpp"
#include "pnm/verify.hpp"

struct pnm_spec {
  pnm::SpecFile file;
};

struct pnm_calculus {
  pnm::Calculus calc;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/// Runs fn, translating exceptions into status codes and the thread's error message.
template <class Fn>
pnm_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const pnm::ResourceError& e) {
    last_error = e.what();
    return PNM_RESOURCE_ERROR;
  } catch (const pnm::Error& e) {
    last_error = e.what();
    return PNM_INPUT_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PNM_RESOURCE_ERROR;
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
    return PNM_INTERNAL_ERROR;
  }
}

pnm_status null_argument(const char* what) {
  last_error = std::string("missing argument: ") + what;
  return PNM_INPUT_ERROR;
}

pnm::SharpResult strengthened(const pnm::SpecFile& f) {
  auto axioms = pnm::decompose_all(f.axioms, f.matrix.signature());
  pnm::SharpOptions opt;
  opt.naming = f.naming;
  return pnm::sharp_construct(f.matrix, axioms, opt);
}

/// The matrix the calculus commands work on, with the strengthening when there are axioms.
struct Target {
  pnm::PNMatrix matrix;
  std::optional<pnm::SharpResult> sharp;
};

Target target_of(const pnm::SpecFile& f) {
  if (f.axioms.empty()) return {f.matrix, std::nullopt};
  auto r = strengthened(f);
  pnm::PNMatrix m = r.matrix;
  return {std::move(m), std::move(r)};
}

struct Selected {
  pnm::SeparatorSearch search;
  std::string source;
};

Selected select_discriminator(const pnm::SpecFile& f, const Target& t, unsigned max_depth) {
  if (f.has_separators) return {pnm::discriminator_from(t.matrix, f.separators), "file"};
  if (t.sharp) {
    auto base = pnm::find_separators(f.matrix, max_depth);
    if (base.discriminator)
      return {pnm::transfer_discriminator(f.matrix, *base.discriminator, *t.sharp, max_depth), "transfer"};
  }
  return {pnm::find_separators(t.matrix, max_depth), "search"};
}

std::string inseparable_text(const pnm::PNMatrix& m, const pnm::SeparatorSearch& s) {
  std::string out = "no separator found for:";
  for (auto [x, y] : s.inseparable) out += " (" + m.label(x) + "," + m.label(y) + ")";
  return out;
}

std::string countermodel_text(const pnm::PNMatrix& m, const pnm::Countermodel& c) {
  std::ostringstream os;
  os << "  countermodel in refinement " << m.format(c.refinement) << ":";
  for (const auto& [f, v] : c.assignment) os << " " << pnm::to_string(f, m.signature()) << "=" << m.label(v);
  os << "\n";
  return os.str();
}

pnm::FormulaSet formula_set(const char* text, const pnm::Signature& sig) {
  pnm::FormulaSet out;
  if (!text) return out;
  for (auto& f : pnm::parse_formula_list(text, sig)) out.insert(std::move(f));
  return out;
}

}  // namespace

extern "C" {

const char* pnm_last_error(void) { return last_error.c_str(); }

void pnm_string_free(char* s) { std::free(s); }

const char* pnm_version(void) { return "1.0.0"; }

pnm_status pnm_spec_load(const char* path, pnm_spec** out) {
  if (out) *out = nullptr;
  if (!path || !out) return null_argument("path or output handle");
  return guarded([&] {
    *out = new pnm_spec{pnm::load_spec(path)};
    return PNM_OK;
  });
}

pnm_status pnm_spec_parse(const char* text, pnm_spec** out) {
  if (out) *out = nullptr;
  if (!text || !out) return null_argument("text or output handle");
  return guarded([&] {
    *out = new pnm_spec{pnm::parse_spec(text)};
    return PNM_OK;
  });
}

void pnm_spec_free(pnm_spec* spec) { delete spec; }

size_t pnm_spec_value_count(const pnm_spec* spec) { return spec ? spec->file.matrix.size() : 0; }

size_t pnm_spec_axiom_count(const pnm_spec* spec) { return spec ? spec->file.axioms.size() : 0; }

pnm_status pnm_calculus_load(const char* path, pnm_calculus** out) {
  if (out) *out = nullptr;
  if (!path || !out) return null_argument("path or output handle");
  return guarded([&] {
    *out = new pnm_calculus{pnm::load_calculus(path)};
    return PNM_OK;
  });
}

pnm_status pnm_calculus_parse(const char* text, pnm_calculus** out) {
  if (out) *out = nullptr;
  if (!text || !out) return null_argument("text or output handle");
  return guarded([&] {
    *out = new pnm_calculus{pnm::parse_calculus(text)};
    return PNM_OK;
  });
}

void pnm_calculus_free(pnm_calculus* calc) { delete calc; }

size_t pnm_calculus_rule_count(const pnm_calculus* calc) { return calc ? calc->calc.rules.size() : 0; }

pnm_status pnm_strengthen(const pnm_spec* spec, char** out) {
  if (out) *out = nullptr;
  if (!spec || !out) return null_argument("spec or output");
  return guarded([&] {
    const auto& f = spec->file;
    if (f.axioms.empty()) {
      *out = dup(pnm::write_matrix(f.matrix));
      return PNM_OK;
    }
    auto r = strengthened(f);
    std::string text;
    for (const auto& w : r.warnings) text += "# warning: " + w + "\n";
    text += pnm::write_matrix(r.matrix, r.comments(f.matrix));
    *out = dup(text);
    return PNM_OK;
  });
}

pnm_status pnm_consequence(const pnm_spec* spec, const char* gamma, const char* delta,
                           const pnm_consequence_options* opt, char** report) {
  if (report) *report = nullptr;
  if (!spec || !report) return null_argument("spec or report");
  return guarded([&] {
    const auto& f = spec->file;
    pnm_consequence_options o{0, 0, 1};
    if (opt) o = *opt;
    if (o.use_sharp && o.use_oracle) throw pnm::PreconditionError("choose either the strengthened matrix or the oracle");
    std::vector<pnm::Sequent> sequents;
    if (!gamma && !delta) {
      sequents = f.queries;
      if (sequents.empty()) throw pnm::PreconditionError("no sequent given and the file has no queries");
    } else {
      sequents.push_back({formula_set(gamma, f.matrix.signature()), formula_set(delta, f.matrix.signature())});
    }
    std::optional<pnm::SharpResult> sharp;
    if (o.use_sharp) sharp = strengthened(f);
    const pnm::PNMatrix& m = sharp ? sharp->matrix : f.matrix;
    auto axioms = o.use_oracle ? pnm::decompose_all(f.axioms, f.matrix.signature()) : std::vector<pnm::SimpleAxiom>{};
    auto refs = pnm::total_refinements(m);
    std::ostringstream os;
    bool all = true;
    for (const auto& s : sequents) {
      os << pnm::to_string(s, m.signature()) << " : ";
      if (o.use_oracle) {
        pnm::OracleOptions oo;
        oo.universe_depth = o.oracle_depth;
        auto r = pnm::axiom_consequence_oracle(m, axioms, s, oo);
        os << (r.holds ? "holds" : "fails (bounded)") << " [universe " << r.universe_size << ", instances "
           << r.instances << "]\n";
        if (r.candidate) os << countermodel_text(m, *r.candidate);
        all = all && r.holds;
      } else {
        auto r = pnm::consequence(m, s, &refs);
        os << (r.holds ? (r.vacuous ? "holds (no total refinement)" : "holds") : "fails") << "\n";
        if (r.countermodel) os << countermodel_text(m, *r.countermodel);
        all = all && r.holds;
      }
    }
    *report = dup(os.str());
    return all ? PNM_OK : PNM_FAILS;
  });
}

pnm_status pnm_refinements(const pnm_spec* spec, int use_sharp, char** out) {
  if (out) *out = nullptr;
  if (!spec || !out) return null_argument("spec or output");
  return guarded([&] {
    std::optional<pnm::SharpResult> sharp;
    if (use_sharp) sharp = strengthened(spec->file);
    const pnm::PNMatrix& m = sharp ? sharp->matrix : spec->file.matrix;
    std::string text;
    for (pnm::ValueSet r : pnm::total_refinements(m)) text += m.format(r) + "\n";
    *out = dup(text);
    return PNM_OK;
  });
}

pnm_status pnm_separators(const pnm_spec* spec, unsigned max_depth, char** out) {
  if (out) *out = nullptr;
  if (!spec || !out) return null_argument("spec or output");
  return guarded([&] {
    auto t = target_of(spec->file);
    auto sel = select_discriminator(spec->file, t, max_depth);
    if (!sel.search.discriminator) {
      *out = dup(inseparable_text(t.matrix, sel.search) + "\n");
      return PNM_FAILS;
    }
    const auto& d = *sel.search.discriminator;
    const auto& sig = t.matrix.signature();
    std::ostringstream os;
    os << "# separators from " << sel.source << "\n";
    for (pnm::Value x = 0; x < t.matrix.size(); ++x)
      for (pnm::Value y = x + 1; y < t.matrix.size(); ++y)
        os << "pair " << t.matrix.label(x) << " " << t.matrix.label(y) << " : " << pnm::to_string(d.pair[x][y], sig)
           << "\n";
    os << pnm::write_partitions(t.matrix, d);
    *out = dup(os.str());
    return PNM_OK;
  });
}

pnm_status pnm_generate_calculus(const pnm_spec* spec, unsigned max_depth, int raw, unsigned jobs, char** out) {
  if (out) *out = nullptr;
  if (!spec || !out) return null_argument("spec or output");
  return guarded([&] {
    auto t = target_of(spec->file);
    auto sel = select_discriminator(spec->file, t, max_depth);
    if (!sel.search.discriminator) {
      last_error = inseparable_text(t.matrix, sel.search);
      return PNM_FAILS;
    }
    auto calc = pnm::generate_calculus(t.matrix, *sel.search.discriminator);
    if (!raw) calc.rules = pnm::simplify(pnm::strengthen(t.matrix, calc.rules, jobs));
    *out = dup(pnm::write_calculus(calc));
    return PNM_OK;
  });
}

pnm_status pnm_prove(const pnm_calculus* calc, const char* gamma, const char* delta, pnm_render format,
                     size_t max_nodes, double max_seconds, char** out) {
  if (out) *out = nullptr;
  if (!calc || !out) return null_argument("calculus or output");
  return guarded([&] {
    const auto& sig = calc->calc.signature;
    pnm::Sequent s{formula_set(gamma, sig), formula_set(delta, sig)};
    pnm::ProveLimits limits;
    if (max_nodes) limits.max_nodes = max_nodes;
    if (max_seconds > 0) limits.max_seconds = max_seconds;
    auto r = pnm::prove(calc->calc, s, limits);
    if (!r.proof) {
      *out = dup("not provable; saturated branch: " + pnm::to_string(r.saturated, sig) + "\n");
      return PNM_FAILS;
    }
    *out = dup(format == PNM_RENDER_DOT ? pnm::render_dot(*r.proof, sig) : pnm::render_text(*r.proof, sig));
    return PNM_OK;
  });
}

pnm_status pnm_check_proof(const pnm_calculus* calc, const char* proof_text, char** report) {
  if (report) *report = nullptr;
  if (!calc || !proof_text || !report) return null_argument("calculus, proof or report");
  return guarded([&] {
    auto tree = pnm::parse_proof(proof_text, calc->calc.signature);
    auto r = pnm::check_proof(tree, calc->calc);
    *report = dup(r.ok ? "valid\n" : "invalid: " + r.diagnostic + "\n");
    return r.ok ? PNM_OK : PNM_FAILS;
  });
}

void pnm_verify_defaults(pnm_verify_options* opt) {
  if (!opt) return;
  pnm::SuiteOptions s;
  pnm::OracleOptions o;
  opt->vars = s.vars;
  opt->depth = s.depth;
  opt->pair_depth = s.pair_depth;
  opt->max_side = s.max_side;
  opt->oracle_depth = o.universe_depth;
  opt->sample = 0;
  opt->seed = 20240601ULL;
  opt->jobs = 1;
}

pnm_status pnm_verify(const pnm_spec* spec, const pnm_verify_options* opt, char** report) {
  if (report) *report = nullptr;
  if (!spec || !report) return null_argument("spec or report");
  return guarded([&] {
    pnm_verify_options o;
    pnm_verify_defaults(&o);
    if (opt) o = *opt;
    const auto& f = spec->file;
    auto axioms = pnm::decompose_all(f.axioms, f.matrix.signature());
    auto r = strengthened(f);
    pnm::SuiteOptions so{o.vars, o.depth, o.pair_depth, o.max_side};
    auto suite = pnm::exhaustive_suite(f.matrix.signature(), so);
    if (o.sample && o.sample < suite.size()) {
      std::vector<pnm::Sequent> picked;
      std::mt19937_64 rng(o.seed);
      std::sample(suite.begin(), suite.end(), std::back_inserter(picked), o.sample, rng);
      suite = std::move(picked);
    }
    pnm::OracleOptions oo;
    oo.universe_depth = o.oracle_depth;
    auto rep = pnm::verify_equivalence(f.matrix, axioms, r.matrix, suite, oo, o.jobs);
    std::ostringstream os;
    os << "checked " << rep.checked << "\nboth hold " << rep.both_hold << "\nboth fail " << rep.both_fail
       << "\ninconclusive " << rep.inconclusive << "\ndisagreements " << rep.disagreements.size() << "\n";
    for (const auto& d : rep.disagreements) {
      os << "disagreement " << pnm::to_string(d.sequent, f.matrix.signature()) << "\n";
      os << countermodel_text(r.matrix, d.sharp_countermodel);
    }
    *report = dup(os.str());
    return rep.disagreements.empty() ? PNM_OK : PNM_FAILS;
  });
}

}  // extern "C"
