#include "verify.hpp"

#include <chrono>
#include <map>
#include <numeric>
#include <sstream>

#include "checks.hpp"
#include "json.hpp"
#include "weilbc/error.hpp"
#include "weilbc/normmap.hpp"

namespace weilbc::verify {

using nlohmann::json;

namespace {

json config_json(const RunConfig& c) {
  json pairs = json::array();
  for (auto [i, t] : c.pairs) pairs.push_back({i, t});
  return {{"p", c.p},
          {"base_degree", c.base_degree},
          {"n", c.n},
          {"m", c.m},
          {"pairs", pairs},
          {"psi_scale", c.psi_scale},
          {"sample", c.sample == 0 ? json("all") : json(c.sample)},
          {"seed", c.seed},
          {"ambient_cap", c.ambient_cap},
          {"format", c.format}};
}

}  // namespace

void RunConfig::validate() const {
  if (p < 3 || p % 2 == 0 || !is_prime(static_cast<std::uint64_t>(p))) throw ConfigInvalid("p must be an odd prime");
  if (base_degree < 1 || n < 1 || m < 1) throw ConfigInvalid("base_degree, n and m must be positive");
  if (pairs.empty()) throw ConfigInvalid("at least one (i, t) pair is required");
  for (auto [i, t] : pairs) make_config(i, t, m);
  if (((psi_scale % p) + p) % p == 0) throw ConfigInvalid("psi scale must be nonzero mod p");
  if (ambient_cap < 1) throw ConfigInvalid("ambient cap must be positive");
  if (format != "json" && format != "tsv") throw ConfigInvalid("format must be json or tsv");
}

std::string RunConfig::to_json() const { return config_json(*this).dump(); }

std::string Report::to_json() const {
  json cs = json::array();
  for (const auto& c : cases) cs.push_back({{"input", c.input}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"equal", c.equal}});
  json j = {{"check", check},
            {"config", config_json(config)},
            {"cases", cs},
            {"summary", {{"pass", pass}, {"fail", fail}}},
            {"seconds", seconds}};
  if (!error.empty()) j["error"] = error;
  return j.dump(2);
}

std::string Report::to_tsv() const {
  std::ostringstream os;
  os << "check\tinput\tlhs\trhs\tequal\n";
  for (const auto& c : cases)
    os << check << '\t' << c.input << '\t' << c.lhs << '\t' << c.rhs << '\t' << (c.equal ? "true" : "false") << '\n';
  os << "# pass=" << pass << " fail=" << fail << " seconds=" << seconds;
  if (!error.empty()) os << " error=" << error;
  os << '\n';
  return os.str();
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"star",     "gsp",       "support",         "orthogonal",
                                              "parabolic", "sl2-torus", "homomorphism",    "gyoja-bijection",
                                              "gauss",    "all"};
  return names;
}

std::pair<int, int> parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigInvalid("pair must look like i:t, got " + text);
  try {
    std::size_t a = 0, b = 0;
    const int i = std::stoi(text.substr(0, colon), &a);
    const int t = std::stoi(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
    return {i, t};
  } catch (const std::logic_error&) {
    throw ConfigInvalid("pair must look like i:t, got " + text);
  }
}

Report run_check(const std::string& name, const RunConfig& cfg) {
  Report r;
  r.check = name;
  r.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  try {
    cfg.validate();
    if (name == "all") {
      for (const auto& sub : check_names()) {
        if (sub == "all" || !applicable(sub, cfg)) continue;
        Report s = run_check(sub, cfg);
        for (auto& c : s.cases) {
          c.input = "[" + sub + "] " + c.input;
          r.cases.push_back(std::move(c));
        }
        if (!s.error.empty()) {
          r.error += (r.error.empty() ? "" : "; ") + ("[" + sub + "] " + s.error);
        }
      }
    } else {
      Context ctx(cfg);
      r.cases = dispatch(name, ctx);
      ctx.save_caches();
    }
  } catch (const Error& e) {
    r.error = e.what();
  }
  for (const auto& c : r.cases) (c.equal ? r.pass : r.fail) += 1;
  if (!r.error.empty()) r.fail += 1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace weilbc::verify
