#include "verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "characters.hpp"
#include "global.hpp"
#include "haar.hpp"
#include "induced.hpp"
#include "kirillov.hpp"
#include "padic.hpp"
#include "triple.hpp"
#include "zeta.hpp"

namespace tpl {
namespace {

struct TaskResult {
  bool pass = true;
  double max_err = 0.0;
  std::string detail;
};

struct Task {
  std::string suite;
  std::string name;
  double tol = 0.0;
  std::function<TaskResult(std::mt19937_64&, double)> fn;
};

std::uint64_t case_seed(std::uint64_t seed, const std::string& suite,
                        const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ (seed * 0x9e3779b97f4a7c15ull);
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0x100000001b3ull;
  };
  for (char ch : suite) mix(static_cast<std::uint64_t>(ch));
  mix(0x7fu);
  for (char ch : name) mix(static_cast<std::uint64_t>(ch));
  return h ? h : 1;
}

void note_err(TaskResult& r, double err, double tol, const std::string& what) {
  r.max_err = std::max(r.max_err, err);
  if (err > tol && r.pass) {
    r.pass = false;
    std::ostringstream os;
    os << what << " (err " << err << " > tol " << tol << ")";
    r.detail = os.str();
  }
}

void note_fail(TaskResult& r, const std::string& what) {
  if (r.pass) {
    r.pass = false;
    r.detail = what;
  }
  r.max_err = std::max(r.max_err, 1.0);
}

MultChar random_ramified(std::int64_t p, int m, std::mt19937_64& rng) {
  UnitChar u = UnitChar::random_with_conductor(p, m, rng);
  return MultChar{u, 1.0, random_angle(rng)};
}

MultChar random_unramified_unitary(std::int64_t p, std::mt19937_64& rng) {
  return MultChar::unramified(p, 1.0, random_angle(rng));
}

Zp rand_unit_shell(std::int64_t p, int v, int digits, std::mt19937_64& rng) {
  int k = std::min(digits, 18);
  std::uint64_t pk = 1;
  for (int i = 0; i < k; ++i) pk *= static_cast<std::uint64_t>(p);
  std::uint64_t u = rng() % pk;
  if (u % static_cast<std::uint64_t>(p) == 0) u = (u + 1) % pk;
  if (u == 0) u = 1;
  return Zp::from_unit(p, v, static_cast<std::int64_t>(u), digits);
}

std::string fmt(const char* pat, std::initializer_list<std::int64_t> vals) {
  std::ostringstream os;
  const char* c = pat;
  auto it = vals.begin();
  while (*c) {
    if (*c == '$' && it != vals.end()) {
      os << *it++;
    } else {
      os << *c;
    }
    ++c;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// addchar: closed additive/multiplicative shell integrals of the standard
// character against the defining root-of-unity sums, exact.

void build_addchar(std::vector<Task>& tasks, double tol_override) {
  (void)tol_override;  // the comparison is exact
  for (std::int64_t p : {2, 3, 5, 7}) {
    Task t;
    t.suite = "addchar";
    t.name = fmt("p=$", {p});
    t.tol = 0.0;
    t.fn = [p](std::mt19937_64&, double) {
      TaskResult r;
      for (int m = -4; m <= 4; ++m) {
        int depth = std::abs(m) + 2;
        Rat64 ac = addchar_additive_closed(p, m);
        Rat64 ae = addchar_additive_exact(p, m, depth);
        Rat64 mc = addchar_mult_closed(p, m);
        Rat64 me = addchar_mult_exact(p, m, depth);
        if (ac.num != ae.num || ac.den != ae.den)
          note_fail(r, fmt("additive shell integral mismatch at m=$", {m}));
        if (mc.num != me.num || mc.den != me.den)
          note_fail(r, fmt("multiplicative shell integral mismatch at m=$",
                           {m}));
      }
      return r;
    };
    tasks.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// epsilon: the modulus law |eps(1, chi, psi)| = q^{-c/2} for ramified
// unitary characters, and the exact self-dual value at the center.

void build_epsilon(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-12;
  for (std::int64_t p : {2, 3, 5}) {
    for (int c = 1; c <= 3; ++c) {
      if (p == 2 && c == 1) continue;  // no character of conductor 1 mod 2
      Task t;
      t.suite = "epsilon";
      t.name = fmt("p=$ c=$", {p, c});
      t.tol = tol;
      t.fn = [p, c](std::mt19937_64& rng, double tl) {
        TaskResult r;
        double target = q_half_pow(p, -c);
        for (int draw = 0; draw < 50; ++draw) {
          MultChar chi = random_ramified(p, c, rng);
          cplx e = epsilon_factor(1.0, chi, +1);
          note_err(r, std::abs(std::abs(e) - target), tl,
                   fmt("modulus law failed at draw $", {draw}));
        }
        return r;
      };
      tasks.push_back(std::move(t));
    }
  }
  Task t;
  t.suite = "epsilon";
  t.name = "center quadratic p=3";
  t.tol = 0.0;
  t.fn = [](std::mt19937_64&, double) {
    TaskResult r;
    const std::vector<UnitChar>& chars = chars_of_conductor(3, 1);
    for (const UnitChar& chi : chars) {
      if (chi.order() != 2) continue;
      cplx e = epsilon_factor(0.5, chi, +1);
      double err = std::abs(e - cplx{0.0, 1.0});
      note_err(r, err, 0.0, "self-dual center value is not exactly i");
    }
    return r;
  };
  tasks.push_back(std::move(t));
}

// ---------------------------------------------------------------------------
// whittaker: closed corner values of every vector family against the
// defining unipotent integral.

void build_whittaker(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-10;
  for (std::int64_t p : {2, 3, 5}) {
    for (int m = 1; m <= 3; ++m) {
      if (p == 2 && m == 1) continue;  // no ramified character of conductor 1
      for (int dualpart = 0; dualpart <= 1; ++dualpart) {
        Task t;
        t.suite = "whittaker";
        t.name = fmt(dualpart ? "dual flag p=$ m=$" : "flag p=$ m=$", {p, m});
        t.tol = tol;
        t.fn = [p, m, dualpart](std::mt19937_64& rng, double tl) {
          TaskResult r;
          int digits = 2 * m + 10;
          MultChar o1 = random_ramified(p, m, rng);
          MultChar o2 = random_unramified_unitary(p, rng);
          WhittakerEvaluator ev(make_principal(o1, o2), dualpart != 0, 0,
                                digits);
          for (int j = 0; j <= m; ++j) {
            Mat2 cj = mat_corner(p, j, digits);
            for (int v = -m - 2; v <= m + 2; ++v) {
              Zp y = rand_unit_shell(p, v, digits, rng);
              cplx a = ev.at_corner(y, j);
              cplx b = ev.bruteforce(mat_a(y) * cj);
              note_err(r, std::abs(a - b), tl,
                       fmt("corner value mismatch at j=$ v=$", {j, v}));
            }
          }
          return r;
        };
        tasks.push_back(std::move(t));
      }
    }
    for (int kind = 0; kind <= 1; ++kind) {
      Task t;
      t.suite = "whittaker";
      t.name = fmt(kind ? "unramified p=$" : "special p=$", {p});
      t.tol = tol;
      t.fn = [p, kind](std::mt19937_64& rng, double tl) {
        TaskResult r;
        for (int l = 0; l <= 3; ++l) {
          int digits = 2 * (1 + l) + 10;
          InducedRepSpec spec;
          if (kind == 0) {
            spec = make_steinberg(p, l % 2 == 0 ? 1 : -1);
          } else if (l == 1) {
            // one draw outside the unitary axis but inside the window
            spec = make_spherical(MultChar::unramified(
                p, std::pow(static_cast<double>(p), 0.25),
                random_angle(rng)));
          } else {
            spec = make_spherical(random_unramified_unitary(p, rng));
          }
          WhittakerEvaluator ev(spec, false, l, digits);
          int c3 = spec.m;
          for (int j = 0; j <= c3 + l; ++j) {
            Mat2 cj = mat_corner(p, j, digits);
            for (int v = -c3 - l - 2; v <= c3 + 2; ++v) {
              Zp y = rand_unit_shell(p, v, digits, rng);
              cplx a = ev.at_corner(y, j);
              cplx b = ev.bruteforce(mat_a(y) * cj);
              note_err(r, std::abs(a - b), tl,
                       fmt("corner value mismatch at l=$ j=$ v=$", {l, j, v}));
            }
          }
        }
        return r;
      };
      tasks.push_back(std::move(t));
    }
  }
}

// ---------------------------------------------------------------------------
// steinberg / spherical / supercuspidal: the normalized constant, bruteforce
// against the closed rational value, over the full translate grid.

void build_steinberg(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-9;
  for (std::int64_t p : {2, 3, 5}) {
    for (int m = 1; m <= 3; ++m) {
      if (p == 2 && m == 1) continue;
      for (int draw = 0; draw < 5; ++draw) {
        Task t;
        t.suite = "steinberg";
        t.name = fmt("p=$ m=$ draw=$", {p, m, draw});
        t.tol = tol;
        t.fn = [p, m, draw](std::mt19937_64& rng, double tl) {
          TaskResult r;
          MultChar o1 = random_ramified(p, m, rng);
          MultChar o2 = random_unramified_unitary(p, rng);
          int sign = draw % 2 == 0 ? 1 : -1;
          TripleSpec spec =
              make_steinberg_triple(p, m, o1, o2, sign, m - 1, m - 1);
          TripleEngine engine(spec);
          for (int l1 = 0; l1 <= m - 1; ++l1) {
            for (int l2 = 0; l2 <= m - 1; ++l2) {
              IPrimePair pr = engine.local_I_prime(l1, l2);
              note_err(r, pr.abs_err, tl,
                       fmt("constant mismatch at l1=$ l2=$", {l1, l2}));
            }
          }
          return r;
        };
        tasks.push_back(std::move(t));
      }
    }
  }
}

void build_spherical(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-9;
  for (std::int64_t p : {2, 3, 5}) {
    for (int m = 1; m <= 3; ++m) {
      if (p == 2 && m == 1) continue;
      for (int draw = 0; draw < 5; ++draw) {
        Task t;
        t.suite = "spherical";
        t.name = fmt("p=$ m=$ draw=$", {p, m, draw});
        t.tol = tol;
        t.fn = [p, m, draw](std::mt19937_64& rng, double tl) {
          TaskResult r;
          MultChar o1 = random_ramified(p, m, rng);
          MultChar o2 = random_unramified_unitary(p, rng);
          MultChar o3 =
              draw == 0
                  ? MultChar::unramified(
                        p, std::pow(static_cast<double>(p), 0.25),
                        random_angle(rng))
                  : random_unramified_unitary(p, rng);
          TripleSpec spec = make_spherical_triple(p, m, o1, o2, o3, m, m);
          TripleEngine engine(spec);
          for (int l1 = 0; l1 <= m; ++l1) {
            for (int l2 = 0; l2 <= m; ++l2) {
              IPrimePair pr = engine.local_I_prime(l1, l2);
              note_err(r, pr.abs_err, tl,
                       fmt("constant mismatch at l1=$ l2=$", {l1, l2}));
            }
          }
          return r;
        };
        tasks.push_back(std::move(t));
      }
    }
  }
}

void build_supercuspidal(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-9;
  struct Combo {
    std::int64_t p;
    int c;
    int m;
  };
  const std::vector<Combo> combos = {
      {2, 2, 2}, {2, 2, 3}, {2, 3, 3}, {3, 2, 2}, {3, 2, 3}};
  for (const Combo& cb : combos) {
    Task t;
    t.suite = "supercuspidal";
    t.name = fmt("p=$ c=$ m=$", {cb.p, cb.c, cb.m});
    t.tol = tol;
    t.fn = [cb](std::mt19937_64& rng, double tl) {
      TaskResult r;
      MultChar o1 = random_ramified(cb.p, cb.m, rng);
      MultChar o2 = random_unramified_unitary(cb.p, rng);
      const int lmax = cb.m - cb.c;
      std::vector<cplx> brute_values;  // across signs/seeds, fixed (0,0)
      for (int sign : {1, -1}) {
        for (int sd = 0; sd < 3; ++sd) {
          auto eps = std::make_shared<const EpsilonData>(
              cb.p, cb.c, sign, rng() | 1ull);
          for (bool flag : {false, true}) {
            TripleSpec spec = make_supercuspidal_triple(
                cb.p, cb.m, o1, o2, eps, flag, lmax, lmax);
            TripleEngine engine(spec);
            for (int l1 = 0; l1 <= lmax; ++l1) {
              for (int l2 = 0; l2 <= lmax; ++l2) {
                IPrimePair pr = engine.local_I_prime(l1, l2);
                note_err(r, pr.abs_err, tl,
                         fmt("constant mismatch at sign=$ seed=$ l1=$ l2=$",
                             {sign, sd, l1, l2}));
                if (l1 == 0 && l2 == 0 && !flag)
                  brute_values.push_back(pr.bruteforce);
              }
            }
          }
        }
      }
      // The normalized constant must not depend on the Weyl constants at
      // all: neither on the sign of the leading one nor on the off-diagonal
      // choices.
      for (size_t i = 1; i < brute_values.size(); ++i) {
        note_err(r, std::abs(brute_values[i] - brute_values[0]), 1e-12,
                 "constant depends on the Weyl-constant choices");
      }
      return r;
    };
    tasks.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// matrix-coefficient: the double-integral route against the bilinear-form
// route and the closed value, on the diagonal translate grid.

void build_matrix_coefficient(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-9;
  struct Combo {
    std::int64_t p;
    int c;
    int m;
    int l;
  };
  const std::vector<Combo> combos = {{2, 2, 2, 0}, {2, 2, 3, 0}, {2, 2, 3, 1},
                                     {2, 3, 3, 0}, {3, 2, 2, 0}, {3, 2, 3, 1}};
  for (const Combo& cb : combos) {
    Task t;
    t.suite = "matrix-coefficient";
    t.name = fmt("p=$ c=$ m=$ l=$", {cb.p, cb.c, cb.m, cb.l});
    t.tol = tol;
    t.fn = [cb](std::mt19937_64& rng, double tl) {
      TaskResult r;
      MultChar o1 = random_ramified(cb.p, cb.m, rng);
      MultChar o2 = random_unramified_unitary(cb.p, rng);
      auto eps = std::make_shared<const EpsilonData>(
          cb.p, cb.c, rng() % 2 == 0 ? 1 : -1, rng() | 1ull);
      TripleSpec spec = make_supercuspidal_triple(cb.p, cb.m, o1, o2, eps,
                                                  false, cb.l, cb.l);
      cplx mc = matrix_coefficient_I(spec);
      cplx closed =
          cplx{(rat_pow(cb.p, -cb.m) * zeta_p(cb.p, 2) / zeta_p(cb.p, 1))
                   .to_double(),
               0.0};
      TripleEngine engine(spec);
      Norms n = engine.norms();
      cplx ipath = engine.local_I(cb.l, cb.l) / (n.n1 * n.n2 * n.n3);
      note_err(r, std::abs(mc - closed), tl,
               "double integral disagrees with the closed value");
      note_err(r, std::abs(mc - ipath), tl,
               "double integral disagrees with the bilinear-form route");
      return r;
    };
    tasks.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// weyl: the Weyl action is an involution on shell/character components with
// the exact level-shift rule.

void build_weyl(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-14;
  for (std::int64_t p : {2, 3, 5}) {
    for (int c = 2; c <= 3; ++c) {
      Task t;
      t.suite = "weyl";
      t.name = fmt("p=$ c=$", {p, c});
      t.tol = tol;
      t.fn = [p, c](std::mt19937_64& rng, double tl) {
        TaskResult r;
        EpsilonData eps(p, c, rng() % 2 == 0 ? 1 : -1, rng() | 1ull);
        int cases = 0;
        for (int level = 0; level <= 3; ++level) {
          std::vector<UnitChar> nus;
          if (level == 0) {
            nus.push_back(UnitChar::trivial(p));
          } else {
            const std::vector<UnitChar>& all = chars_of_conductor(p, level);
            for (size_t i = 0; i < all.size() && i < 5; ++i)
              nus.push_back(all[i]);
          }
          for (const UnitChar& nu : nus) {
            for (int shell = -4; shell <= 4; ++shell) {
              KirillovVector v(p);
              v.add(shell, nu, cplx{1.0, 0.0});
              KirillovVector w = act_w(v, eps);
              int expected = -shell - std::max(c, 2 * nu.conductor());
              if (w.shells().size() != 1 ||
                  w.shells().begin()->first != expected) {
                note_fail(r, fmt("level shift wrong at shell=$ level=$",
                                 {shell, level}));
                continue;
              }
              KirillovVector ww = act_w(w, eps);
              bool ok = ww.shells().size() == 1 &&
                        ww.shells().begin()->first == shell;
              if (ok) {
                const auto& comps = ww.shells().begin()->second;
                auto it = comps.find(nu);
                ok = comps.size() == 1 && it != comps.end();
                if (ok)
                  note_err(r, std::abs(it->second - cplx{1.0, 0.0}), tl,
                           fmt("involution phase at shell=$ level=$",
                               {shell, level}));
              }
              if (!ok)
                note_fail(r, fmt("involution broken at shell=$ level=$",
                                 {shell, level}));
              ++cases;
            }
          }
        }
        if (cases < 30) note_fail(r, "grid unexpectedly small");
        return r;
      };
      tasks.push_back(std::move(t));
    }
  }
}

// ---------------------------------------------------------------------------
// global: the closed rational constant against the product of closed local
// constants, exactly, over every fundamental discriminant in range.

void build_global(std::vector<Task>& tasks, double tol_override) {
  (void)tol_override;
  Task t;
  t.suite = "global";
  t.name = "fundamental discriminants -200..-3";
  t.tol = 0.0;
  t.fn = [](std::mt19937_64&, double) {
    TaskResult r;
    int checked = 0;
    for (std::int64_t D = -200; D <= -3; ++D) {
      if (!is_fundamental_discriminant(D)) continue;
      std::int64_t q = -D;
      for (std::int64_t q1 = 1; q1 <= q; ++q1) {
        if (q % q1) continue;
        for (bool flag : {false, true}) {
          if (q1 % 4 != 0 && flag) continue;
          Rat64 a = global_constant(D, q1, flag);
          Rat64 b = assemble_from_locals(D, q1, flag);
          if (a.num != b.num || a.den != b.den)
            note_fail(r, fmt("route mismatch at D=$ q1=$", {D, q1}));
          ++checked;
        }
      }
    }
    if (checked < 100) note_fail(r, "grid unexpectedly small");
    auto spot = [&r](std::int64_t D, std::int64_t q1, bool flag,
                     std::int64_t num, std::int64_t den) {
      Rat64 v = global_constant(D, q1, flag);
      if (v.num != num || v.den != den)
        note_fail(r, fmt("spot value wrong at D=$ q1=$", {D, q1}));
    };
    spot(-3, 3, false, 1, 72);
    spot(-4, 4, true, 1, 128);
    spot(-4, 4, false, 3, 256);
    spot(-20, 4, true, 1, 3840);
    spot(-8, 8, true, 1, 512);
    return r;
  };
  tasks.push_back(std::move(t));
}

// ---------------------------------------------------------------------------
// norms: the diagonal newform pairings of all three factors.

void build_norms(std::vector<Task>& tasks, double tol_override) {
  double tol = tol_override > 0 ? tol_override : 1e-10;
  struct Combo {
    std::int64_t p;
    int m;
    int kind;  // 0 special, 1 unramified, 2 supercuspidal
    int c;
  };
  std::vector<Combo> combos;
  for (std::int64_t p : {2, 3, 5}) {
    for (int m = 1; m <= 3; ++m) {
      if (p == 2 && m == 1) continue;
      combos.push_back({p, m, 0, 0});
      combos.push_back({p, m, 1, 0});
    }
  }
  combos.push_back({2, 2, 2, 2});
  combos.push_back({2, 3, 2, 3});
  combos.push_back({3, 2, 2, 2});
  for (const Combo& cb : combos) {
    Task t;
    t.suite = "norms";
    t.name = fmt("p=$ m=$ kind=$", {cb.p, cb.m, cb.kind});
    t.tol = tol;
    t.fn = [cb](std::mt19937_64& rng, double tl) {
      TaskResult r;
      MultChar o1 = random_ramified(cb.p, cb.m, rng);
      MultChar o2 = random_unramified_unitary(cb.p, rng);
      TripleSpec spec;
      if (cb.kind == 0) {
        spec = make_steinberg_triple(cb.p, cb.m, o1, o2, 1, 0, 0);
      } else if (cb.kind == 1) {
        spec = make_spherical_triple(cb.p, cb.m, o1, o2,
                                     random_unramified_unitary(cb.p, rng), 0,
                                     0);
      } else {
        auto eps = std::make_shared<const EpsilonData>(
            cb.p, cb.c, 1, rng() | 1ull);
        spec = make_supercuspidal_triple(cb.p, cb.m, o1, o2, eps, false, 0, 0);
      }
      TripleEngine engine(spec);
      Norms n = engine.norms();
      double expected12 = (zeta_p(cb.p, 2) / zeta_p(cb.p, 1)).to_double();
      note_err(r, std::abs(n.n1 - cplx{expected12, 0.0}), tl,
               "first norm off its closed value");
      note_err(r, std::abs(n.n2 - cplx{expected12, 0.0}), tl,
               "second norm off its closed value");
      note_err(r, std::abs(n.n3 - cplx{1.0, 0.0}), tl,
               "third norm off its closed value");
      return r;
    };
    tasks.push_back(std::move(t));
  }
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {
      "addchar",       "epsilon",  "whittaker",
      "steinberg",     "spherical", "supercuspidal",
      "matrix-coefficient", "weyl", "global",
      "norms"};
  return names;
}

VerifyReport run_verify(const VerifyOptions& options) {
  const auto& names = verify_suite_names();
  if (!options.only.empty() &&
      std::find(names.begin(), names.end(), options.only) == names.end())
    throw std::invalid_argument("unknown suite: " + options.only);

  std::vector<Task> tasks;
  auto want = [&](const char* suite) {
    return options.only.empty() || options.only == suite;
  };
  if (want("addchar")) build_addchar(tasks, options.tolerance);
  if (want("epsilon")) build_epsilon(tasks, options.tolerance);
  if (want("whittaker")) build_whittaker(tasks, options.tolerance);
  if (want("steinberg")) build_steinberg(tasks, options.tolerance);
  if (want("spherical")) build_spherical(tasks, options.tolerance);
  if (want("supercuspidal")) build_supercuspidal(tasks, options.tolerance);
  if (want("matrix-coefficient"))
    build_matrix_coefficient(tasks, options.tolerance);
  if (want("weyl")) build_weyl(tasks, options.tolerance);
  if (want("global")) build_global(tasks, options.tolerance);
  if (want("norms")) build_norms(tasks, options.tolerance);

  auto start = std::chrono::steady_clock::now();
  std::vector<VerifyCase> results(tasks.size());
  std::atomic<size_t> next{0};
  int jobs = std::max(1, options.jobs);
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      VerifyCase out;
      out.suite = task.suite;
      out.name = task.name;
      try {
        std::mt19937_64 rng(case_seed(options.seed, task.suite, task.name));
        TaskResult res = task.fn(rng, task.tol);
        out.pass = res.pass;
        out.max_err = res.max_err;
        out.detail = res.detail;
      } catch (const std::exception& e) {
        out.pass = false;
        out.max_err = 1.0;
        out.detail = std::string("exception: ") + e.what();
      }
      results[i] = std::move(out);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  auto stop = std::chrono::steady_clock::now();

  VerifyReport report;
  report.cases = std::move(results);
  for (const VerifyCase& c : report.cases) {
    if (c.pass)
      ++report.passed;
    else
      ++report.failed;
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return report;
}

}  // namespace tpl
