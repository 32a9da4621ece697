#include "tsh/catalog.hpp"

#include <stdexcept>

namespace tsh {

namespace {

CatalogEntry make(std::string name, std::vector<std::string> xq, std::vector<std::string> xp,
                  std::optional<std::string> h, double trace) {
  const std::size_t d = xq.size();
  CatalogEntry e{std::move(name), VectorField::from_strings(xq, xp), h.has_value(), std::nullopt, trace};
  if (h) e.h = Hamiltonian::from_string(*h, d);
  return e;
}

}  // namespace

const std::vector<CatalogEntry>& field_catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v;
    v.push_back(make("harmonic", {"p1"}, {"-q1"}, "(q1^2 + p1^2)/2", 0.0));
    v.push_back(make("pendulum", {"p1"}, {"-sin(q1)"}, "p1^2/2 + 1 - cos(q1)", 0.0));
    v.push_back(make("coupled", {"p1", "p2"}, {"-q1 - q2", "-q2 - q1"},
                     "(q1^2 + q2^2 + p1^2 + p2^2)/2 + q1*q2", 0.0));
    v.push_back(make("damped", {"p1"}, {"-q1 - 0.1*p1"}, std::nullopt, 0.1));
    v.push_back(make("shear", {"p2", "0"}, {"0", "0"}, std::nullopt, 0.0));
    v.push_back(make("rotation_source", {"p1 + 0.5*q1"}, {"-q1 + 0.5*p1"}, std::nullopt, 1.0));
    return v;
  }();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  std::string known;
  for (const CatalogEntry& e : field_catalog()) {
    if (e.name == name) return e;
    known += (known.empty() ? "" : ", ") + e.name;
  }
  throw std::invalid_argument("unknown catalog field '" + name + "' (known: " + known + ")");
}

}  // namespace tsh
