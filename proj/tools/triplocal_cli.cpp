// Command-line front end for the triplocal library.  Every subcommand
// builds a JSON request, hands it to the C interface, prints the JSON
// response, and maps the status to the process exit code:
//   0  success
//   2  a verification mismatch (routes disagree / failing suite cases)
//   1  usage or argument errors, internal failures
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "triplocal.h"

namespace {

using ordered_json = nlohmann::ordered_json;

int run_call(tpl_status (*fn)(tpl_context*, const char*, char**),
             const ordered_json& request) {
  tpl_context* ctx = tpl_context_new();
  if (!ctx) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }
  char* response = nullptr;
  tpl_status status = fn(ctx, request.dump().c_str(), &response);
  if (response) {
    std::printf("%s\n", response);
    tpl_string_free(response);
  }
  if (status != TPL_OK && status != TPL_STATUS_MISMATCH)
    std::fprintf(stderr, "error: %s\n", tpl_last_error(ctx));
  tpl_context_free(ctx);
  switch (status) {
    case TPL_OK:
      return 0;
    case TPL_STATUS_MISMATCH:
      return 2;
    default:
      return 1;
  }
}

int list_suites() {
  tpl_context* ctx = tpl_context_new();
  if (!ctx) return 1;
  char* response = nullptr;
  tpl_status status = tpl_verify_suites(ctx, &response);
  if (response) {
    std::printf("%s", response);
    tpl_string_free(response);
  }
  tpl_context_free(ctx);
  return status == TPL_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (tpl_abi_version() != TPL_ABI_VERSION) {
    std::fprintf(stderr, "error: library ABI %d does not match header %d\n",
                 tpl_abi_version(), TPL_ABI_VERSION);
    return 1;
  }

  CLI::App app{
      "triplocal: local and global constants of triple-product L-values"};
  app.require_subcommand(1);

  // epsilon ----------------------------------------------------------------
  auto* eps = app.add_subcommand(
      "epsilon", "Epsilon factor of a unit character at a given s");
  std::int64_t eps_p = 3;
  int eps_c = 1;
  double eps_s = 0.5;
  std::string eps_char = "quadratic";
  std::uint64_t eps_seed = 1;
  eps->add_option("--p", eps_p, "prime")->required();
  eps->add_option("--conductor", eps_c, "conductor of the character")
      ->required();
  eps->add_option("--s", eps_s, "point of evaluation")->required();
  eps->add_option("--char", eps_char,
                  "\"quadratic\" or \"random\" (drawn from --seed)");
  eps->add_option("--seed", eps_seed, "seed for --char random");

  // local-constant ---------------------------------------------------------
  auto* loc = app.add_subcommand(
      "local-constant",
      "Normalized local constant: bruteforce integral versus closed value");
  std::int64_t loc_p = 2;
  int loc_m = 2;
  std::string loc_kind;
  int loc_c = 0;
  bool loc_unram = false;
  int loc_l1 = 0, loc_l2 = 0;
  std::uint64_t loc_seed = 1;
  bool loc_ext = false;
  loc->add_option("--p", loc_p, "prime")->required();
  loc->add_option("--m", loc_m, "conductor of the ramified character")
      ->required();
  loc->add_option("--kind", loc_kind, "steinberg | spherical | sc")
      ->required();
  loc->add_option("--c", loc_c, "supercuspidal conductor (kind sc)");
  loc->add_flag("--unramified", loc_unram,
                "supercuspidal base-change dichotomy flag (kind sc)");
  loc->add_option("--l1", loc_l1, "translate of the first vector");
  loc->add_option("--l2", loc_l2, "translate of the second vector");
  loc->add_option("--seed", loc_seed,
                  "seed for the character draws; also zeroes wall_time_ms");
  loc->add_flag("--extended", loc_ext,
                "allow translates beyond the proven range (report only)");

  // global-constant ----------------------------------------------------------
  auto* glob = app.add_subcommand(
      "global-constant",
      "Exact rational global normalization constant for a fundamental "
      "discriminant");
  std::int64_t glob_D = -3;
  std::int64_t glob_q1 = 1;
  bool glob_unram2 = false;
  glob->add_option("--D", glob_D, "fundamental discriminant (< 0)")
      ->required();
  glob->add_option("--q1", glob_q1, "divisor of |D|")->required();
  glob->add_flag("--unramified2", glob_unram2,
                 "dichotomy flag for the even place when 4 | q1");

  // verify -------------------------------------------------------------------
  auto* ver = app.add_subcommand(
      "verify", "Run the verification suites and report per-case results");
  std::string ver_only;
  int ver_jobs = 1;
  std::uint64_t ver_seed = 1;
  double ver_tol = 0.0;
  bool ver_list = false;
  ver->add_option("--only", ver_only, "restrict to one suite");
  ver->add_option("--jobs", ver_jobs, "worker threads");
  ver->add_option("--seed", ver_seed,
                  "seed for randomized cases; also zeroes wall_time_ms");
  ver->add_option("--tolerance", ver_tol,
                  "override the per-suite default tolerances");
  ver->add_flag("--list", ver_list, "list suite names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (eps->parsed()) {
    ordered_json req;
    req["p"] = eps_p;
    req["conductor"] = eps_c;
    req["s"] = eps_s;
    req["char"] = eps_char;
    req["seed"] = eps_seed;
    return run_call(tpl_epsilon_json, req);
  }
  if (loc->parsed()) {
    ordered_json req;
    req["p"] = loc_p;
    req["m"] = loc_m;
    req["kind"] = loc_kind;
    req["c"] = loc_c;
    req["unramified"] = loc_unram;
    req["l1"] = loc_l1;
    req["l2"] = loc_l2;
    req["seed"] = loc_seed;
    req["deterministic"] = loc->count("--seed") > 0;
    req["extended"] = loc_ext;
    return run_call(tpl_local_constant_json, req);
  }
  if (glob->parsed()) {
    ordered_json req;
    req["D"] = glob_D;
    req["q1"] = glob_q1;
    req["unramified2"] = glob_unram2;
    return run_call(tpl_global_constant_json, req);
  }
  if (ver->parsed()) {
    if (ver_list) return list_suites();
    ordered_json req;
    req["only"] = ver_only;
    req["jobs"] = ver_jobs;
    req["seed"] = ver_seed;
    req["tolerance"] = ver_tol;
    req["deterministic"] = ver->count("--seed") > 0;
    return run_call(tpl_verify_json, req);
  }
  return 1;
}
