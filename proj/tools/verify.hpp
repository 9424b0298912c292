#pragma once

// Batch verification driver: each check compares two independently computed
// exact values per case and collects the results in a Report.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "weilbc/fieldtower.hpp"

namespace weilbc::verify {

struct RunConfig {
  int p = 3;
  int base_degree = 1;
  int n = 1;
  int m = 2;
  std::vector<std::pair<int, int>> pairs{{1, 1}};  // (i, t)
  std::int64_t psi_scale = 1;                      // a ∈ F_p^×, ψ_a(x) = ψ(ax)
  std::uint64_t sample = 0;                        // 0 means every element
  std::uint64_t seed = 42;
  int ambient_cap = kMaxDegree;
  std::string format = "json";  // json | tsv
  std::string cache_dir;        // empty: no operator cache
  unsigned workers = 0;         // 0: hardware concurrency

  /// Throws ConfigInvalid.
  void validate() const;
  std::string to_json() const;
};

struct CaseRecord {
  std::string input;
  std::string lhs;
  std::string rhs;
  bool equal = false;
};

struct Report {
  std::string check;
  RunConfig config;
  std::vector<CaseRecord> cases;
  std::uint64_t pass = 0;
  std::uint64_t fail = 0;
  double seconds = 0;
  std::string error;  // "Code: message" when the check could not run

  bool ok() const { return fail == 0 && error.empty(); }
  std::string to_json() const;
  std::string to_tsv() const;
};

const std::vector<std::string>& check_names();

/// Runs a named check. Library errors are recorded in Report::error and
/// count as one failure; nothing is swallowed.
Report run_check(const std::string& name, const RunConfig& cfg);

/// "i:t" → (i, t). Throws ConfigInvalid.
std::pair<int, int> parse_pair(const std::string& text);

}  // namespace weilbc::verify
