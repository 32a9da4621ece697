#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "tsh/timescale.hpp"

namespace tsh {

/// Seeded scale mixing closed intervals and isolated points, starting at 0.
TimeScale random_timescale(std::uint64_t seed, std::size_t min_segments = 3, std::size_t max_segments = 50,
                           double dense_step = 0.01);

struct SelftestResult {
  bool passed = false;
  nlohmann::json report;
};

/// Catalog acceptance suite. Writes selftest.json and two trajectory CSVs to
/// `out_dir` when it is non-empty. Deterministic for a given seed.
SelftestResult run_selftest(std::uint64_t seed, const std::string& out_dir);

}  // namespace tsh
