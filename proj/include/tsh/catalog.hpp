#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsh/field.hpp"

namespace tsh {

struct CatalogEntry {
  std::string name;
  VectorField field;
  bool hamiltonian = false;
  std::optional<Hamiltonian> h;  // analytic Hamiltonian when one exists
  double trace_violation = 0.0;  // exact value of max |A + Dᵀ|
};

/// harmonic, pendulum, coupled, damped, shear, rotation_source.
const std::vector<CatalogEntry>& field_catalog();
/// Throws std::invalid_argument listing the known names.
const CatalogEntry& catalog_entry(const std::string& name);

}  // namespace tsh
