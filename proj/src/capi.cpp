#include "triplocal.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <random>
#include <set>
#include <string>

#include "json.hpp"

#include "characters.hpp"
#include "global.hpp"
#include "kirillov.hpp"
#include "triple.hpp"
#include "verify.hpp"

using ordered_json = nlohmann::ordered_json;

struct tpl_context {
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void check_keys(const ordered_json& req, const std::set<std::string>& allowed) {
  if (!req.is_object())
    throw std::invalid_argument("request must be a JSON object");
  for (const auto& item : req.items()) {
    if (!allowed.count(item.key()))
      throw std::invalid_argument("unknown request field: " + item.key());
  }
}

tpl::MultChar random_ramified(std::int64_t p, int m, std::mt19937_64& rng) {
  tpl::UnitChar u = tpl::UnitChar::random_with_conductor(p, m, rng);
  return tpl::MultChar{u, 1.0, tpl::random_angle(rng)};
}

tpl::MultChar random_unramified_unitary(std::int64_t p,
                                        std::mt19937_64& rng) {
  return tpl::MultChar::unramified(p, 1.0, tpl::random_angle(rng));
}

template <typename Fn>
tpl_status guarded(tpl_context* ctx, char** response, Fn&& fn) {
  if (response) *response = nullptr;
  if (!ctx) return TPL_STATUS_INVALID_ARGUMENT;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    ctx->last_error = e.what();
    return TPL_STATUS_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    ctx->last_error = e.what();
    return TPL_STATUS_INVALID_ARGUMENT;
  } catch (const std::domain_error& e) {
    ctx->last_error = e.what();
    return TPL_STATUS_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return TPL_STATUS_INTERNAL;
  }
}

tpl_status emit(char** response, const ordered_json& out, tpl_status status) {
  if (!response) return status;
  *response = dup_string(out.dump(2));
  if (!*response) return TPL_STATUS_INTERNAL;
  return status;
}

}  // namespace

extern "C" {

int tpl_abi_version(void) { return TPL_ABI_VERSION; }

tpl_context* tpl_context_new(void) { return new (std::nothrow) tpl_context; }

void tpl_context_free(tpl_context* ctx) { delete ctx; }

const char* tpl_last_error(const tpl_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "";
}

void tpl_string_free(char* s) { std::free(s); }

tpl_status tpl_epsilon_json(tpl_context* ctx, const char* request,
                            char** response) {
  return guarded(ctx, response, [&]() -> tpl_status {
    if (!request) throw std::invalid_argument("request is null");
    ordered_json req = ordered_json::parse(request);
    check_keys(req, {"p", "conductor", "s", "char", "seed"});
    std::int64_t p = req.at("p").get<std::int64_t>();
    int c = req.at("conductor").get<int>();
    double s = req.at("s").get<double>();
    std::string which = req.value("char", std::string("quadratic"));
    std::uint64_t seed = req.value("seed", std::uint64_t{1});
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (c < 0 || c > 12) throw std::invalid_argument("conductor out of range");

    tpl::UnitChar chi = tpl::UnitChar::trivial(p);
    if (c > 0 && which == "quadratic") {
      bool found = false;
      for (const tpl::UnitChar& cand : tpl::chars_of_conductor(p, c)) {
        if (cand.order() == 2) {
          chi = cand;
          found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument(
            "no quadratic character of that conductor exists");
    } else if (c > 0 && which == "random") {
      std::mt19937_64 rng(seed);
      chi = tpl::UnitChar::random_with_conductor(p, c, rng);
    } else if (c > 0) {
      throw std::invalid_argument("char must be \"quadratic\" or \"random\"");
    }

    tpl::cplx e = tpl::epsilon_factor(s, chi, +1);
    ordered_json out;
    out["schema_version"] = 1;
    out["re"] = e.real();
    out["im"] = e.imag();
    return emit(response, out, TPL_OK);
  });
}

tpl_status tpl_local_constant_json(tpl_context* ctx, const char* request,
                                   char** response) {
  return guarded(ctx, response, [&]() -> tpl_status {
    if (!request) throw std::invalid_argument("request is null");
    ordered_json req = ordered_json::parse(request);
    check_keys(req, {"p", "m", "kind", "c", "unramified", "l1", "l2", "seed",
                     "deterministic", "extended"});
    std::int64_t p = req.at("p").get<std::int64_t>();
    int m = req.at("m").get<int>();
    std::string kind = req.at("kind").get<std::string>();
    int c = req.value("c", 0);
    bool unramified = req.value("unramified", false);
    int l1 = req.value("l1", 0);
    int l2 = req.value("l2", 0);
    std::uint64_t seed = req.value("seed", std::uint64_t{1});
    bool deterministic = req.value("deterministic", false);
    bool extended = req.value("extended", false);

    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (m < 1 || m > 12) throw std::invalid_argument("m out of range");
    if (p == 2 && m == 1)
      throw std::invalid_argument(
          "no ramified character of conductor 1 exists for p = 2");
    if (l1 < 0 || l2 < 0) throw std::invalid_argument("translates must be >= 0");

    std::mt19937_64 rng(seed);
    tpl::MultChar o1 = random_ramified(p, m, rng);
    tpl::MultChar o2 = random_unramified_unitary(p, rng);
    tpl::TripleSpec spec;
    if (kind == "steinberg") {
      int sign = rng() % 2 == 0 ? 1 : -1;
      spec = tpl::make_steinberg_triple(p, m, o1, o2, sign, l1, l2);
    } else if (kind == "spherical") {
      spec = tpl::make_spherical_triple(p, m, o1, o2,
                                        random_unramified_unitary(p, rng), l1,
                                        l2);
    } else if (kind == "sc") {
      auto eps = std::make_shared<const tpl::EpsilonData>(
          p, c, rng() % 2 == 0 ? 1 : -1, rng() | 1ull);
      spec = tpl::make_supercuspidal_triple(p, m, o1, o2, eps, unramified, l1,
                                            l2);
    } else {
      throw std::invalid_argument(
          "kind must be \"steinberg\", \"spherical\", or \"sc\"");
    }

    auto start = std::chrono::steady_clock::now();
    tpl::TripleEngine engine(spec);
    tpl::IPrimePair pr = engine.local_I_prime(l1, l2, extended);
    auto stop = std::chrono::steady_clock::now();
    double wall =
        deterministic
            ? 0.0
            : std::chrono::duration<double, std::milli>(stop - start).count();

    int mt = tpl::max_translate(spec);
    bool in_range = l1 <= mt && l2 <= mt;

    ordered_json out;
    out["schema_version"] = 1;
    out["p"] = p;
    out["m"] = m;
    out["kind"] = kind;
    out["l1"] = l1;
    out["l2"] = l2;
    out["I_prime_bruteforce"] = {{"re", pr.bruteforce.real()},
                                 {"im", pr.bruteforce.imag()}};
    out["I_prime_closed"] = {{"re", pr.closed.real()},
                             {"im", pr.closed.imag()}};
    out["abs_err"] = pr.abs_err;
    out["wall_time_ms"] = wall;
    tpl_status status =
        (in_range && pr.abs_err > 1e-9) ? TPL_STATUS_MISMATCH : TPL_OK;
    return emit(response, out, status);
  });
}

tpl_status tpl_global_constant_json(tpl_context* ctx, const char* request,
                                    char** response) {
  return guarded(ctx, response, [&]() -> tpl_status {
    if (!request) throw std::invalid_argument("request is null");
    ordered_json req = ordered_json::parse(request);
    check_keys(req, {"D", "q1", "unramified2"});
    std::int64_t D = req.at("D").get<std::int64_t>();
    std::int64_t q1 = req.at("q1").get<std::int64_t>();
    bool unramified2 = req.value("unramified2", false);

    tpl::Rat64 a = tpl::global_constant(D, q1, unramified2);
    tpl::Rat64 b = tpl::assemble_from_locals(D, q1, unramified2);
    if (a.num != b.num || a.den != b.den)
      throw std::runtime_error("global constant routes disagree");

    ordered_json out;
    out["schema_version"] = 1;
    out["D"] = D;
    out["q1"] = q1;
    out["unramified2"] = unramified2;
    out["value"] = std::to_string(a.num) + "/" + std::to_string(a.den);
    return emit(response, out, TPL_OK);
  });
}

tpl_status tpl_verify_json(tpl_context* ctx, const char* request,
                           char** response) {
  return guarded(ctx, response, [&]() -> tpl_status {
    if (!request) throw std::invalid_argument("request is null");
    ordered_json req = ordered_json::parse(request);
    check_keys(req, {"only", "jobs", "seed", "tolerance", "deterministic"});
    tpl::VerifyOptions opts;
    opts.only = req.value("only", std::string());
    opts.jobs = req.value("jobs", 1);
    opts.seed = req.value("seed", std::uint64_t{1});
    opts.tolerance = req.value("tolerance", 0.0);
    bool deterministic = req.value("deterministic", false);
    if (opts.jobs < 1 || opts.jobs > 256)
      throw std::invalid_argument("jobs out of range");
    if (opts.tolerance < 0.0)
      throw std::invalid_argument("tolerance must be >= 0");

    tpl::VerifyReport report = tpl::run_verify(opts);

    ordered_json out;
    out["schema_version"] = 1;
    out["only"] = opts.only;
    out["jobs"] = opts.jobs;
    out["seed"] = opts.seed;
    out["tolerance"] = opts.tolerance;
    out["passed"] = report.passed;
    out["failed"] = report.failed;
    out["wall_time_ms"] = deterministic ? 0.0 : report.wall_time_ms;
    ordered_json cases = ordered_json::array();
    for (const tpl::VerifyCase& vc : report.cases) {
      ordered_json one;
      one["suite"] = vc.suite;
      one["name"] = vc.name;
      one["pass"] = vc.pass;
      one["max_err"] = vc.max_err;
      one["detail"] = vc.detail;
      cases.push_back(std::move(one));
    }
    out["cases"] = std::move(cases);
    return emit(response, out, report.failed ? TPL_STATUS_MISMATCH : TPL_OK);
  });
}

tpl_status tpl_verify_suites(tpl_context* ctx, char** response) {
  return guarded(ctx, response, [&]() -> tpl_status {
    std::string all;
    for (const std::string& name : tpl::verify_suite_names()) {
      all += name;
      all += '\n';
    }
    if (!response) return TPL_OK;
    *response = dup_string(all);
    if (!*response) return TPL_STATUS_INTERNAL;
    return TPL_OK;
  });
}

}  // extern "C"
