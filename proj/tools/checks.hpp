#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "verify.hpp"
#include "weilbc/schrodinger.hpp"

namespace weilbc::verify {

/// Shared state of one check run: the tower, ψ scale and representations.
class Context {
 public:
  explicit Context(const RunConfig& cfg);

  const RunConfig& cfg;
  std::shared_ptr<const Tower> tower;
  FieldElem scale;

  /// Representation of Sp_{2n}⋉H over level d, loaded from the cache dir when set.
  const WeilRepresentation& rep(int n, int d);
  void save_caches() const;
  unsigned workers() const;

 private:
  std::string cache_path(int n, int d) const;
  std::map<std::pair<int, int>, std::unique_ptr<WeilRepresentation>> reps_;
};

bool applicable(const std::string& name, const RunConfig& cfg);
std::vector<CaseRecord> dispatch(const std::string& name, Context& ctx);

}  // namespace weilbc::verify
