#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsh/dynamics.hpp"
#include "tsh/field.hpp"
#include "tsh/helmholtz.hpp"

namespace tsh {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string timescale = "union: [0,1]; dense_step: 0.001";
  std::size_t dim = 1;  // only consulted for a bare Hamiltonian
  std::optional<std::string> catalog;
  std::vector<std::string> field_q, field_p;
  std::optional<std::string> hamiltonian;

  PhaseBox box;
  std::size_t samples = 128;
  std::optional<double> tol;
  bool finite_difference = false;

  std::size_t nodes = 32;
  std::size_t grid_points = 21;

  std::vector<double> q0, p0;
  std::string form = "derivative";  // or "integral"
  SolverConfig solver;

  std::uint64_t seed = 0;
  std::string out_dir;  // empty: no files written
  std::string format = "json";
};

/// YAML document; unknown keys are rejected with the list of accepted ones.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);
/// Throws ConfigError for out-of-range values.
void validate(const RunConfig& cfg);

/// Field from `field.catalog`, `field.q`/`field.p`, or the Hamiltonian's field.
VectorField resolve_field(const RunConfig& cfg);
/// `hamiltonian`, else the catalog Hamiltonian, else nullopt.
std::optional<Hamiltonian> resolve_hamiltonian(const RunConfig& cfg);

}  // namespace tsh
