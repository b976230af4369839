// Acceptance gate: one line per criterion, pass/fail, with its wall time.
//
// Each criterion maps to one verification suite run on the canonical grid
// with the canonical seed, and must finish inside its time budget.  Run with
// no arguments for the full gate, or with a single criterion number to run
// just that one (the ctest harness registers one invocation per criterion).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "verify.hpp"

namespace {

struct Criterion {
  int number;
  std::string suite;
  std::string description;
  double budget_seconds;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table = {
      {1, "addchar", "additive character integrals match the closed shells",
       1.0},
      {2, "epsilon", "epsilon factors: modulus, inverse pairing, center value",
       5.0},
      {3, "whittaker",
       "newform Whittaker values against defining integrals on the corner "
       "grid",
       120.0},
      {4, "steinberg", "twisted special constant on the translate grid",
       120.0},
      {5, "spherical", "unramified principal-series constant on the grid",
       180.0},
      {6, "supercuspidal",
       "dyadic/odd supercuspidal constant, independent of auxiliary choices",
       120.0},
      {7, "matrix-coefficient",
       "matrix-coefficient route equals the bilinear route", 60.0},
      {8, "weyl", "Weyl element action: support shells and unitarity", 10.0},
      {9, "global", "global constant: closed form equals the local product",
       5.0},
      {10, "norms", "newform norms match the closed values", 30.0},
  };
  return table;
}

bool run_criterion(const Criterion& crit) {
  tpl::VerifyOptions opts;
  opts.only = crit.suite;
  opts.seed = 1;
  unsigned hw = std::thread::hardware_concurrency();
  opts.jobs = static_cast<int>(std::clamp(hw, 1u, 8u));

  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string failure;
  try {
    tpl::VerifyReport report = tpl::run_verify(opts);
    ok = report.failed == 0;
    for (const tpl::VerifyCase& vc : report.cases) {
      if (!vc.pass) {
        failure += "\n    failing case: " + vc.name + " (" + vc.detail + ")";
      }
    }
  } catch (const std::exception& e) {
    failure = std::string("\n    exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  bool in_budget = secs <= crit.budget_seconds;
  bool pass = ok && in_budget;

  std::printf("criterion %d: %s - %s [%.1fs]%s%s\n", crit.number,
              pass ? "PASS" : "FAIL", crit.description.c_str(), secs,
              in_budget ? ""
                        : " (over budget)",
              failure.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> todo;
  if (argc > 1) {
    int wanted = std::atoi(argv[1]);
    for (const Criterion& c : criteria()) {
      if (c.number == wanted) todo.push_back(c);
    }
    if (todo.empty()) {
      std::fprintf(stderr, "unknown criterion: %s (valid: 1..10)\n", argv[1]);
      return 64;
    }
  } else {
    todo = criteria();
  }

  int failures = 0;
  for (const Criterion& c : todo) {
    if (!run_criterion(c)) ++failures;
  }
  return failures;
}
