#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "triplocal.h"

using json = nlohmann::json;

namespace {

struct Resp {
  char* s = nullptr;
  ~Resp() { tpl_string_free(s); }
  json parsed() const {
    REQUIRE(s != nullptr);
    return json::parse(s);
  }
};

struct Ctx {
  tpl_context* c = tpl_context_new();
  ~Ctx() { tpl_context_free(c); }
  operator tpl_context*() const { return c; }
};

}  // namespace

TEST_CASE("abi version") { CHECK(tpl_abi_version() == TPL_ABI_VERSION); }

TEST_CASE("epsilon endpoint") {
  Ctx ctx;
  {
    Resp r;
    tpl_status st = tpl_epsilon_json(
        ctx, R"({"p": 3, "conductor": 1, "s": 0.5, "char": "quadratic"})",
        &r.s);
    CHECK(st == TPL_OK);
    json out = r.parsed();
    CHECK(out.at("schema_version") == 1);
    // Self-dual odd case: the value is exactly i.
    CHECK(out.at("re").get<double>() == 0.0);
    CHECK(out.at("im").get<double>() == 1.0);
  }
  {
    Resp r;
    CHECK(tpl_epsilon_json(ctx, R"({"p": 5, "conductor": 0, "s": 1.0})",
                           &r.s) == TPL_OK);
    json out = r.parsed();
    CHECK(out.at("re").get<double>() == 1.0);
    CHECK(out.at("im").get<double>() == 0.0);
  }
  {
    Resp r;
    CHECK(tpl_epsilon_json(ctx, "this is not json", &r.s) ==
          TPL_STATUS_INVALID_ARGUMENT);
    CHECK(r.s == nullptr);
    CHECK(std::strlen(tpl_last_error(ctx)) > 0);
  }
  {
    Resp r;
    CHECK(tpl_epsilon_json(
              ctx, R"({"p": 3, "conductor": 1, "s": 0.5, "bogus": 1})",
              &r.s) == TPL_STATUS_INVALID_ARGUMENT);
    std::string msg = tpl_last_error(ctx);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  {
    Resp r;
    CHECK(tpl_epsilon_json(ctx, R"({"p": 4, "conductor": 1, "s": 0.5})",
                           &r.s) == TPL_STATUS_INVALID_ARGUMENT);
  }
  {
    Resp r;
    CHECK(tpl_epsilon_json(ctx, R"({"p": 3, "conductor": 13, "s": 0.5})",
                           &r.s) == TPL_STATUS_INVALID_ARGUMENT);
  }
}

TEST_CASE("global endpoint") {
  Ctx ctx;
  {
    Resp r;
    CHECK(tpl_global_constant_json(ctx, R"({"D": -3, "q1": 3})", &r.s) ==
          TPL_OK);
    CHECK(r.parsed().at("value") == "1/72");
  }
  {
    Resp r;
    CHECK(tpl_global_constant_json(
              ctx, R"({"D": -8, "q1": 8, "unramified2": true})", &r.s) ==
          TPL_OK);
    CHECK(r.parsed().at("value") == "1/512");
  }
  {
    Resp r;
    CHECK(tpl_global_constant_json(ctx, R"({"D": -5, "q1": 1})", &r.s) ==
          TPL_STATUS_INVALID_ARGUMENT);
    CHECK(r.s == nullptr);
  }
  {
    Resp r;
    CHECK(tpl_global_constant_json(ctx, R"({"D": -3, "q1": 2})", &r.s) ==
          TPL_STATUS_INVALID_ARGUMENT);
  }
}

TEST_CASE("local constant endpoint") {
  Ctx ctx;
  const char* req =
      R"({"p": 3, "m": 1, "kind": "steinberg", "seed": 5, "deterministic": true})";
  Resp a;
  CHECK(tpl_local_constant_json(ctx, req, &a.s) == TPL_OK);
  json out = a.parsed();
  CHECK(out.at("schema_version") == 1);
  // q^{-m}(1 + 1/q) at q = 3, m = 1.
  CHECK(std::abs(out.at("I_prime_closed").at("re").get<double>() -
                 4.0 / 9.0) < 1e-12);
  CHECK(out.at("I_prime_closed").at("im").get<double>() == 0.0);
  CHECK(out.at("abs_err").get<double>() <= 1e-9);
  CHECK(out.at("wall_time_ms").get<double>() == 0.0);

  // Equal seeds give equal bytes.
  Resp b;
  CHECK(tpl_local_constant_json(ctx, req, &b.s) == TPL_OK);
  CHECK(std::string(a.s) == std::string(b.s));

  // Beyond the proven translate range: refused unless extended.
  Resp c;
  CHECK(tpl_local_constant_json(
            ctx,
            R"({"p": 3, "m": 1, "kind": "steinberg", "l1": 1, "seed": 5})",
            &c.s) == TPL_STATUS_INVALID_ARGUMENT);
  Resp d;
  CHECK(tpl_local_constant_json(ctx,
                                R"({"p": 3, "m": 1, "kind": "steinberg",
                                    "l1": 1, "seed": 5, "extended": true})",
                                &d.s) == TPL_OK);

  // The dyadic conductor-1 gap is reported, not silently skipped.
  Resp e;
  CHECK(tpl_local_constant_json(ctx, R"({"p": 2, "m": 1, "kind": "steinberg"})",
                                &e.s) == TPL_STATUS_INVALID_ARGUMENT);
}

TEST_CASE("verify endpoint") {
  Ctx ctx;
  const char* req =
      R"({"only": "addchar", "jobs": 2, "seed": 1, "deterministic": true})";
  Resp a;
  CHECK(tpl_verify_json(ctx, req, &a.s) == TPL_OK);
  json out = a.parsed();
  CHECK(out.at("failed") == 0);
  CHECK(out.at("passed").get<int>() >= 1);
  for (const json& vc : out.at("cases")) CHECK(vc.at("pass") == true);

  // The report is independent of the worker count.
  Resp b;
  CHECK(tpl_verify_json(
            ctx,
            R"({"only": "addchar", "jobs": 1, "seed": 1, "deterministic": true})",
            &b.s) == TPL_OK);
  json outb = b.parsed();
  CHECK(out.at("cases") == outb.at("cases"));

  Resp c;
  CHECK(tpl_verify_json(ctx, R"({"only": "nope"})", &c.s) ==
        TPL_STATUS_INVALID_ARGUMENT);
  std::string msg = tpl_last_error(ctx);
  CHECK(msg.find("unknown suite") != std::string::npos);

  Resp d;
  CHECK(tpl_verify_json(ctx, R"({"jobs": 0})", &d.s) ==
        TPL_STATUS_INVALID_ARGUMENT);
}

TEST_CASE("suite listing") {
  Ctx ctx;
  Resp r;
  CHECK(tpl_verify_suites(ctx, &r.s) == TPL_OK);
  std::string all = r.s;
  std::vector<std::string> names;
  size_t pos = 0;
  while (pos < all.size()) {
    size_t nl = all.find('\n', pos);
    REQUIRE(nl != std::string::npos);
    names.push_back(all.substr(pos, nl - pos));
    pos = nl + 1;
  }
  std::vector<std::string> expect = {
      "addchar", "epsilon",       "whittaker",          "steinberg",
      "spherical", "supercuspidal", "matrix-coefficient", "weyl",
      "global",  "norms"};
  CHECK(names == expect);
}

TEST_CASE("defensive null handling") {
  CHECK(std::string(tpl_last_error(nullptr)).empty());
  tpl_context_free(nullptr);
  tpl_string_free(nullptr);
  Resp r;
  CHECK(tpl_epsilon_json(nullptr, R"({"p": 3, "conductor": 0, "s": 1.0})",
                         &r.s) == TPL_STATUS_INVALID_ARGUMENT);
  CHECK(r.s == nullptr);
  Ctx ctx;
  CHECK(tpl_epsilon_json(ctx, nullptr, &r.s) == TPL_STATUS_INVALID_ARGUMENT);
  // A null response sink is tolerated.
  CHECK(tpl_global_constant_json(ctx, R"({"D": -3, "q1": 3})", nullptr) ==
        TPL_OK);
}
