#include "checks.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "weilbc/characters.hpp"
#include "weilbc/error.hpp"
#include "weilbc/normmap.hpp"

namespace weilbc::verify {

namespace {

constexpr std::uint64_t kDefaultSamples = 200;
constexpr std::uint64_t kSupportSamples = 500;

template <class F>
void parallel_for(std::size_t n, unsigned workers, F f) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto run = [&] {
    for (;;) {
      const std::size_t k = next++;
      if (k >= n) return;
      try {
        f(k);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!err) err = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> ts;
  for (unsigned w = 1; w < workers && w < n; ++w) ts.emplace_back(run);
  run();
  for (auto& t : ts) t.join();
  if (err) std::rethrow_exception(err);
}

std::string pair_tag(int i, int t) { return "i=" + std::to_string(i) + ",t=" + std::to_string(t); }

/// Every element when sample = 0, otherwise `sample` (or `fallback`) seeded random words.
std::vector<GElem> sample_elements(const Group& g, std::uint64_t sample, Rng& rng) {
  std::vector<GElem> out;
  if (sample == 0) {
    for (std::uint64_t code : g.enumerate()) out.push_back(g.decode(code));
  } else {
    for (std::uint64_t k = 0; k < sample; ++k) out.push_back(g.random(rng));
  }
  return out;
}

CaseRecord record(std::string input, const CycNum& lhs, const CycNum& rhs) {
  return {std::move(input), lhs.to_string(), rhs.to_string(), lhs == rhs};
}

std::vector<CaseRecord> check_star(Context& ctx, bool gsp) {
  const RunConfig& c = ctx.cfg;
  std::vector<CaseRecord> out;
  Rng rng(c.seed);
  for (auto [i, t] : c.pairs) {
    const NormConfig nc = make_config(i, t, c.m);
    const Group G(gsp ? GroupKind::GSp : GroupKind::Sp, c.n, ctx.tower, c.m);
    const GyojaNorm N(G, nc, c.ambient_cap);
    Rng local = rng.fork(static_cast<std::uint64_t>(i * 1000 + t));
    const auto els = sample_elements(G, c.sample, local);
    const WeilRepresentation& top = ctx.rep(c.n, c.m);
    const WeilRepresentation& base = ctx.rep(c.n, nc.d);
    std::vector<CaseRecord> recs(els.size());
    parallel_for(els.size(), ctx.workers(), [&](std::size_t k) {
      const GElem& g = els[k];
      const GElem ng = N(g);
      const CycNum lhs = gsp ? extended_gsp_trace(top, i, g.s) : top.extended_trace(i, g);
      const CycNum rhs = gsp ? gsp_character(base, ng.s) : base.trace(ng);
      recs[k] = record(pair_tag(i, t) + "; g=" + g.to_string() + "; N=" + ng.to_string(), lhs, rhs);
    });
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

std::vector<CaseRecord> check_support(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Tower& tw = *ctx.tower;
  const int m = c.m, n = c.n;
  const Group J(GroupKind::Jacobi, n, ctx.tower, m);
  const Group S(GroupKind::Sp, n, ctx.tower, m);
  const WeilRepresentation& rep = ctx.rep(n, m);
  // coset representatives (1, (u, 0)) of Γ⋉SpH / Γ⋉SpZ
  const auto& F = tw.level(m).elements;
  std::vector<TwistedElem> reps;
  Vec u(static_cast<std::size_t>(2 * n), tw.zero());
  std::vector<std::size_t> digit(u.size(), 0);
  for (;;) {
    reps.push_back({0, from_parts(Mat::identity(tw, 2 * n), HeisElem{u, tw.zero()})});
    std::size_t k = 0;
    while (k < u.size() && ++digit[k] == F.size()) digit[k++] = 0;
    if (k == u.size()) break;
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = F[digit[j]];
  }
  auto mul = [m](const TwistedElem& a, const TwistedElem& b) { return twisted_mul(a, b, m); };
  auto inv = [m](const TwistedElem& a) { return twisted_inv(a, m); };
  auto triv = [&](const TwistedElem& x) -> std::optional<CycNum> {
    for (const auto& e : x.g.v)
      if (!e.is_zero()) return std::nullopt;
    return CycNum::rational(tw.p(), 1);
  };

  std::vector<TwistedElem> els;
  Rng rng(c.seed);
  if (c.sample == 0) {
    for (int i = 0; i < m; ++i)
      for (std::uint64_t code : J.enumerate()) els.push_back({i, J.decode(code)});
  } else {
    for (std::uint64_t k = 0; k < c.sample; ++k) {
      const int i = c.pairs[k % c.pairs.size()].first;
      GElem g = J.random(rng);
      // a third of the samples carry a unipotent or trivial matrix part, where
      // most Heisenberg parts lie outside the conjugates of Γ⋉Sp·Z
      if (k % 3 == 1) g.s = siegel_unip(S.random_symmetric(rng));
      if (k % 3 == 2) g.s = Mat::identity(tw, 2 * n);
      els.push_back({i, g});
    }
  }
  std::vector<CaseRecord> recs(els.size());
  parallel_for(els.size(), ctx.workers(), [&](std::size_t k) {
    const TwistedElem& x = els[k];
    const CycNum tr = rep.extended_trace(x.i, x.g);
    const CycNum lhs = tr * tr.conj();
    const CycNum rhs = induce_cosets(reps, x, mul, inv, triv);
    CaseRecord r = record("i=" + std::to_string(x.i) + "; g=" + x.g.to_string(), lhs, rhs);
    if (rhs.is_zero() && !tr.is_zero()) r.equal = false;
    recs[k] = std::move(r);
  });
  return recs;
}

GElem orthogonal_sum(const Tower& tw, const GElem& a, const GElem& b) {
  Mat s(tw, 4, 4);
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q) s.at(r, q) = tw.zero();
  const int ia[2] = {0, 2}, ib[2] = {1, 3};
  for (int r = 0; r < 2; ++r)
    for (int q = 0; q < 2; ++q) {
      s.at(ia[r], ia[q]) = a.s.at(r, q);
      s.at(ib[r], ib[q]) = b.s.at(r, q);
    }
  Vec v{a.v[0], b.v[0], a.v[1], b.v[1]};
  return from_parts(s, HeisElem{v, a.t + b.t});
}

std::vector<CaseRecord> check_orthogonal(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.n != 2) throw ConfigInvalid("orthogonal needs n = 2 (split as 1 + 1)");
  const Group J1(GroupKind::Jacobi, 1, ctx.tower, c.m);
  const WeilRepresentation& r1 = ctx.rep(1, c.m);
  const WeilRepresentation& r2 = ctx.rep(2, c.m);
  const std::uint64_t count = c.sample == 0 ? kDefaultSamples : c.sample;
  std::vector<CaseRecord> out;
  Rng rng(c.seed);
  for (auto [i, t] : c.pairs) {
    std::vector<std::pair<GElem, GElem>> els;
    for (std::uint64_t k = 0; k < count; ++k) {
      GElem a = J1.random(rng);
      els.emplace_back(a, J1.random(rng));
    }
    std::vector<CaseRecord> recs(els.size());
    const int ii = i;
    parallel_for(els.size(), ctx.workers(), [&](std::size_t k) {
      const auto& [a, b] = els[k];
      const CycNum lhs = r2.extended_trace(ii, orthogonal_sum(*ctx.tower, a, b));
      const CycNum rhs = r1.extended_trace(ii, a) * r1.extended_trace(ii, b);
      recs[k] = record("i=" + std::to_string(ii) + "; g1=" + a.to_string() + "; g2=" + b.to_string(), lhs, rhs);
    });
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

std::vector<CaseRecord> check_parabolic(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.n != 1) throw ConfigInvalid("parabolic is implemented for n = 1");
  const Tower& tw = *ctx.tower;
  const int m = c.m;
  const auto& F = tw.level(m).elements;
  const std::size_t Q = F.size();
  const WeilRepresentation& rep = ctx.rep(1, m);
  const std::size_t total = static_cast<std::size_t>(m) * (Q - 1) * Q * Q * Q * Q;
  if (total > 4'000'000) throw GroupTooLarge("Γ⋉B(F')H(F') has " + std::to_string(total) + " elements");
  // element index → (i, a ≠ 0, b, v0, v1, z)
  auto element = [&](std::size_t idx) {
    const std::size_t z = idx % Q;
    idx /= Q;
    const std::size_t v1 = idx % Q;
    idx /= Q;
    const std::size_t v0 = idx % Q;
    idx /= Q;
    const std::size_t b = idx % Q;
    idx /= Q;
    const std::size_t a = 1 + idx % (Q - 1);
    const int i = static_cast<int>(idx / (Q - 1));
    Mat s(tw, 2, 2);
    s.at(0, 0) = F[a];
    s.at(0, 1) = F[b];
    s.at(1, 0) = tw.zero();
    s.at(1, 1) = F[a].inverse();
    return TwistedElem{i, from_parts(s, HeisElem{Vec{F[v0], F[v1]}, F[z]})};
  };
  // coset representatives (1, (y f, 0)) of Γ⋉BH / Γ⋉BH_⊥, H_⊥ = {(x e, z)}
  std::vector<TwistedElem> reps;
  for (const auto& y : F) reps.push_back({0, from_parts(Mat::identity(tw, 2), HeisElem{Vec{tw.zero(), y}, tw.zero()})});
  auto mul = [m](const TwistedElem& a, const TwistedElem& b) { return twisted_mul(a, b, m); };
  auto inv = [m](const TwistedElem& a) { return twisted_inv(a, m); };
  // ε'(a) ψ'(z) on Γ⋉BH_⊥, trivial on Γ
  auto chi = [&](const TwistedElem& x) -> std::optional<CycNum> {
    if (!x.g.s.at(1, 0).is_zero() || !x.g.v[1].is_zero()) return std::nullopt;
    return CycNum::zeta(tw.p(), rep.psi(x.g.t)).scaled(rep.eps(x.g.s.at(0, 0)));
  };
  std::vector<std::size_t> picks;
  if (c.sample == 0) {
    picks.resize(total);
    for (std::size_t k = 0; k < total; ++k) picks[k] = k;
  } else {
    Rng rng(c.seed);
    for (std::uint64_t k = 0; k < c.sample; ++k) picks.push_back(rng.below(total));
  }
  std::vector<CaseRecord> recs(picks.size());
  parallel_for(picks.size(), ctx.workers(), [&](std::size_t k) {
    const TwistedElem x = element(picks[k]);
    const CycNum lhs = rep.extended_trace(x.i, x.g);
    const CycNum rhs = induce_cosets(reps, x, mul, inv, chi);
    recs[k] = record("i=" + std::to_string(x.i) + "; g=" + x.g.to_string(), lhs, rhs);
  });
  return recs;
}

CaseRecord count_record(std::string input, std::uint64_t lhs, std::uint64_t rhs) {
  return {std::move(input), std::to_string(lhs), std::to_string(rhs), lhs == rhs};
}

std::vector<CaseRecord> check_torus(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.n != 1) throw ConfigInvalid("sl2-torus needs n = 1");
  const int p = c.p;
  std::vector<CaseRecord> out;
  auto base = Tower::build(c.p, c.base_degree, 1);
  const FieldElem a = base->from_int(c.psi_scale);
  const auto res = weil_torus_restriction(base, 1, a);
  const Sl2Torus T = sl2_torus(base, 1);
  Mat g = Mat::identity(*base, 2);
  for (std::size_t e = 0; e < res.torus_order; ++e) {
    const std::int64_t expect = (e == 0 ? static_cast<std::int64_t>(res.torus_order) : 0) - T.omega(g);
    out.push_back(record("restriction: tr rho(gamma^" + std::to_string(e) + ")", CycNum::rational(p, res.traces[e]),
                         CycNum::rational(p, expect)));
    g = g * T.generator;
  }
  out.push_back(record("restriction: multiplicity of omega", CycNum::rational(p, res.multiplicities[res.omega_index]),
                       CycNum::rational(p, 0)));
  auto add_virtual = [&](const std::string& tag, const TorusVirtualCheck& v, std::int64_t at_sigma) {
    out.push_back(count_record(tag + ": elements where the virtual character equals the trace", v.pass, v.elements));
    for (const auto& f : v.failures) out.push_back({tag + ": mismatch at " + f, "", "", false});
    out.push_back(record(tag + ": <nu,nu>", v.norm_squared, CycNum::rational(p, 1)));
    out.push_back(record(tag + ": value at sigma", v.value_at_sigma, CycNum::rational(p, at_sigma)));
  };
  const auto q = static_cast<std::int64_t>(base->q());
  add_virtual("m=1", torus_virtual_check(base, a), q);
  if (c.m > 1) add_virtual("m=" + std::to_string(c.m), torus_virtual_check(ctx.tower, ctx.scale), c.m % 2 ? q : -q);
  return out;
}

std::vector<CaseRecord> check_homomorphism(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Group J(GroupKind::Jacobi, c.n, ctx.tower, c.m);
  const WeilRepresentation& rep = ctx.rep(c.n, c.m);
  const WeilOperator Is = rep.op_galois(1);
  const WeilOperator id = WeilOperator::identity(c.p, rep.dim());
  const std::uint64_t count = c.sample == 0 ? kDefaultSamples : c.sample;
  Rng rng(c.seed);
  std::vector<std::pair<GElem, GElem>> els;
  for (std::uint64_t k = 0; k < count; ++k) {
    GElem a = J.random(rng);
    els.emplace_back(a, J.random(rng));
  }
  std::vector<CaseRecord> recs(3 * els.size());
  parallel_for(els.size(), ctx.workers(), [&](std::size_t k) {
    const auto& [a, b] = els[k];
    const std::string in = "g1=" + a.to_string() + "; g2=" + b.to_string();
    const WeilOperator ra = rep.build_rho(a);
    const WeilOperator lhs = rep.build_rho(a * b);
    const WeilOperator rhs = ra * rep.build_rho(b);
    recs[3 * k] = {"product: " + in, lhs.trace().to_string(), rhs.trace().to_string(), lhs == rhs};
    const WeilOperator u = ra * ra.conj_transpose();
    recs[3 * k + 1] = {"unitary: g1=" + a.to_string(), u.trace().to_string(), id.trace().to_string(), u == id};
    const WeilOperator l2 = Is * ra;
    const WeilOperator r2 = rep.build_rho(a.frobenius(1)) * Is;
    recs[3 * k + 2] = {"intertwining: g1=" + a.to_string(), l2.trace().to_string(), r2.trace().to_string(), l2 == r2};
  });
  return recs;
}

std::vector<CaseRecord> check_bijection(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  std::vector<CaseRecord> out;
  for (auto [i, t] : c.pairs) {
    const Group G(GroupKind::Sp, c.n, ctx.tower, c.m);
    const GyojaNorm N(G, make_config(i, t, c.m), c.ambient_cap);
    const auto rep = verify_bijection(N, kDefaultGroupCap, static_cast<std::size_t>(c.sample));
    const std::string tag = pair_tag(i, t);
    CaseRecord summary = count_record(tag + "; twisted classes vs classes of the target", rep.twisted_classes,
                                      rep.target_classes);
    summary.equal = summary.equal && rep.ok();
    out.push_back(summary);
    const auto big = static_cast<std::int64_t>(G.order());
    const auto small = static_cast<std::int64_t>(N.target().order());
    // |twisted class| / |G(F')| = |norm class| / |G(F_d)|
    for (const auto& row : rep.rows)
      out.push_back(record(tag + "; twisted rep " + G.decode(row.twisted_rep).to_string(),
                           CycNum::rational(c.p, static_cast<std::int64_t>(row.twisted_size), big),
                           CycNum::rational(c.p, static_cast<std::int64_t>(row.norm_size), small)));
  }
  return out;
}

std::vector<CaseRecord> check_gauss(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Tower& tw = *ctx.tower;
  std::vector<CaseRecord> out;
  for (int d = 1; d <= c.m; ++d) {
    const CycNum g = gauss_sum(tw, d, ctx.scale);
    const auto qd = static_cast<std::int64_t>(tw.q_pow(d));
    out.push_back(record("G^2 = eps(-1) q^d, d=" + std::to_string(d), g * g,
                         CycNum::rational(c.p, tw.quad_char(-tw.one(), d) * qd)));
    if (2 * d <= c.m && tw.has_level(2 * d))
      out.push_back(record("Hasse-Davenport, d=" + std::to_string(d), gauss_sum(tw, 2 * d, ctx.scale), -(g * g)));
  }
  return out;
}

}  // namespace

Context::Context(const RunConfig& c)
    : cfg(c), tower(Tower::build(c.p, c.base_degree, c.m)), scale(tower->from_int(c.psi_scale)) {}

std::string Context::cache_path(int n, int d) const {
  return (std::filesystem::path(cfg.cache_dir) /
          ("weil-p" + std::to_string(cfg.p) + "-b" + std::to_string(cfg.base_degree) + "-m" + std::to_string(cfg.m) +
           "-n" + std::to_string(n) + "-d" + std::to_string(d) + "-a" + std::to_string(cfg.psi_scale) + ".txt"))
      .string();
}

const WeilRepresentation& Context::rep(int n, int d) {
  auto& slot = reps_[{n, d}];
  if (!slot) {
    slot = std::make_unique<WeilRepresentation>(tower, n, d, scale);
    if (!cfg.cache_dir.empty()) slot->load_cache(cache_path(n, d));
  }
  return *slot;
}

void Context::save_caches() const {
  if (cfg.cache_dir.empty()) return;
  std::filesystem::create_directories(cfg.cache_dir);
  for (const auto& [key, r] : reps_) r->save_cache(cache_path(key.first, key.second));
}

unsigned Context::workers() const {
  if (cfg.workers) return cfg.workers;
  const unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

bool applicable(const std::string& name, const RunConfig& cfg) {
  if (name == "orthogonal") return cfg.n == 2;
  if (name == "parabolic" || name == "sl2-torus") return cfg.n == 1;
  if (name == "gyoja-bijection") {
    const Group g(GroupKind::Sp, cfg.n, Tower::build(cfg.p, cfg.base_degree, cfg.m), cfg.m);
    try {
      return g.order() <= kDefaultGroupCap;
    } catch (const ArithmeticOverflow&) {
      return false;
    }
  }
  return true;
}

std::vector<CaseRecord> dispatch(const std::string& name, Context& ctx) {
  if (name == "star") return check_star(ctx, false);
  if (name == "gsp") return check_star(ctx, true);
  if (name == "support") return check_support(ctx);
  if (name == "orthogonal") return check_orthogonal(ctx);
  if (name == "parabolic") return check_parabolic(ctx);
  if (name == "sl2-torus") return check_torus(ctx);
  if (name == "homomorphism") return check_homomorphism(ctx);
  if (name == "gyoja-bijection") return check_bijection(ctx);
  if (name == "gauss") return check_gauss(ctx);
  throw ConfigInvalid("unknown check " + name);
}

}  // namespace weilbc::verify
