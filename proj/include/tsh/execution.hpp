#pragma once

namespace tsh {

/// Selects the OpenMP kernel or the serial reference loop. Both produce
/// bit-identical results: parallel loops only fill per-index slots and all
/// reductions run serially in index order.
enum class Execution { serial, parallel };

}  // namespace tsh
