/* C interface to the PNmatrix workbench. All strings are UTF-8. Strings returned through
 * `char**` parameters are owned by the caller and released with pnm_string_free. */
#ifndef PNM_PNM_H
#define PNM_PNM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PNM_API __declspec(dllexport)
#else
#define PNM_API __attribute__((visibility("default")))
#endif

typedef enum pnm_status {
  PNM_OK = 0,
  PNM_FAILS = 1,          /* a sequent fails, a proof or separator was not found, a check reported problems */
  PNM_INPUT_ERROR = 2,    /* parse errors, violated preconditions, unusable arguments */
  PNM_RESOURCE_ERROR = 3, /* a size or time cap was reached */
  PNM_INTERNAL_ERROR = 4
} pnm_status;

/* A parsed matrix file: signature, tables, optional axioms, separators, queries and naming. */
typedef struct pnm_spec pnm_spec;
/* A parsed calculus file. */
typedef struct pnm_calculus pnm_calculus;

/* Message for the last non-OK status on the calling thread; empty when none. */
PNM_API const char* pnm_last_error(void);
PNM_API void pnm_string_free(char* s);
PNM_API const char* pnm_version(void);

PNM_API pnm_status pnm_spec_load(const char* path, pnm_spec** out);
PNM_API pnm_status pnm_spec_parse(const char* text, pnm_spec** out);
PNM_API void pnm_spec_free(pnm_spec* spec);
PNM_API size_t pnm_spec_value_count(const pnm_spec* spec);
PNM_API size_t pnm_spec_axiom_count(const pnm_spec* spec);

PNM_API pnm_status pnm_calculus_load(const char* path, pnm_calculus** out);
PNM_API pnm_status pnm_calculus_parse(const char* text, pnm_calculus** out);
PNM_API void pnm_calculus_free(pnm_calculus* calc);
PNM_API size_t pnm_calculus_rule_count(const pnm_calculus* calc);

/* The strengthened matrix in file format, with one comment per value giving its Θ-profile.
 * Without axioms the input matrix is written back unchanged. */
PNM_API pnm_status pnm_strengthen(const pnm_spec* spec, char** out);

typedef struct pnm_consequence_options {
  int use_sharp;          /* decide over the strengthened matrix instead of the file's matrix */
  int use_oracle;         /* decide with the bounded axiom oracle over the file's matrix */
  unsigned oracle_depth;  /* look-ahead closure rounds for the oracle universe */
} pnm_consequence_options;

/* Decides gamma ⊳ delta (comma-separated formula lists, either may be empty). When both are NULL the
 * file's queries are decided instead. PNM_OK when every sequent holds, PNM_FAILS otherwise; the
 * report lists verdicts and countermodels. */
PNM_API pnm_status pnm_consequence(const pnm_spec* spec, const char* gamma, const char* delta,
                                   const pnm_consequence_options* opt, char** report);

/* Maximal total refinements, one "{a,b,...}" line each. */
PNM_API pnm_status pnm_refinements(const pnm_spec* spec, int use_sharp, char** out);

/* Separators and partitions for the strengthened matrix (the file's matrix when it has no axioms).
 * Uses the file's separators when present, otherwise transfers the base discriminator along the
 * look-ahead set, otherwise searches up to max_depth. PNM_FAILS lists inseparable pairs. */
PNM_API pnm_status pnm_separators(const pnm_spec* spec, unsigned max_depth, char** out);

/* Generated calculus for the same matrix, strengthened and simplified unless raw is set. */
PNM_API pnm_status pnm_generate_calculus(const pnm_spec* spec, unsigned max_depth, int raw, unsigned jobs,
                                         char** out);

typedef enum pnm_render { PNM_RENDER_TEXT = 0, PNM_RENDER_DOT = 1 } pnm_render;

/* Proof search for gamma ⊳ delta. PNM_OK with the rendered proof, PNM_FAILS with the saturated
 * state, PNM_RESOURCE_ERROR when a limit is hit. Zero limits select the defaults. */
PNM_API pnm_status pnm_prove(const pnm_calculus* calc, const char* gamma, const char* delta, pnm_render format,
                             size_t max_nodes, double max_seconds, char** out);

/* Checks a proof written in the text rendering. PNM_OK when valid, PNM_FAILS with a diagnostic. */
PNM_API pnm_status pnm_check_proof(const pnm_calculus* calc, const char* proof_text, char** report);

typedef struct pnm_verify_options {
  unsigned vars;          /* variables in the suite */
  unsigned depth;         /* depth of single-formula sequents */
  unsigned pair_depth;    /* depth of formulas on two-sided sequents */
  unsigned max_side;      /* largest side of two-sided sequents */
  unsigned oracle_depth;  /* deepest oracle universe tried on inconclusive sequents */
  size_t sample;          /* when non-zero, a random sample of this many sequents */
  unsigned long long seed;
  unsigned jobs;          /* 0 = hardware concurrency */
} pnm_verify_options;

PNM_API void pnm_verify_defaults(pnm_verify_options* opt);

/* Compares the strengthened matrix against the bounded axiom oracle. PNM_OK when there are no
 * disagreements, PNM_FAILS otherwise. */
PNM_API pnm_status pnm_verify(const pnm_spec* spec, const pnm_verify_options* opt, char** report);

#ifdef __cplusplus
}
#endif

#endif
