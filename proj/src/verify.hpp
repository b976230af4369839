// Named verification suites: each one checks a family of identities on a
// fixed parameter grid, comparing independent computation routes (defining
// sums against closed forms, bilinear-form route against matrix-coefficient
// route, closed global formula against the local product) and reports one
// result per grid case.  Randomized choices inside a case are seeded from
// (seed, suite, case) only, so reports are reproducible regardless of the
// number of worker threads.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tpl {

struct VerifyOptions {
  std::string only;        // run a single suite when nonempty
  int jobs = 1;            // worker threads
  std::uint64_t seed = 1;  // seeds every randomized choice
  double tolerance = 0.0;  // overrides per-suite defaults when positive
};

struct VerifyCase {
  std::string suite;
  std::string name;
  bool pass = false;
  double max_err = 0.0;
  std::string detail;  // failure description, empty on pass
};

struct VerifyReport {
  std::vector<VerifyCase> cases;  // canonical order, independent of jobs
  int passed = 0;
  int failed = 0;
  double wall_time_ms = 0.0;
};

// Canonical suite names, in execution order.
const std::vector<std::string>& verify_suite_names();

// Runs the requested suites; throws std::invalid_argument for an unknown
// suite name in options.only.
VerifyReport run_verify(const VerifyOptions& options);

}  // namespace tpl
