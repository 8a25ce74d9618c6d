#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tcprep/evolve.hpp"
#include "tcprep/lattice.hpp"
#include "tcprep/model.hpp"
#include "tcprep/sector.hpp"
#include "tcprep/spectral.hpp"

namespace tcprep {

using json = nlohmann::json;

inline constexpr const char* kVersion = TCPREP_VERSION;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* what);

/// j[key] converted to T, or `fallback` when absent. Type errors become
/// std::invalid_argument.
template <typename T>
T config_value(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("key '") + key + "' has the wrong type");
  }
}

std::string hex_mask(Mask m);
Mask parse_hex_mask(const std::string& s);
/// Fixed 17-significant-digit decimal used in every CSV file.
std::string format_decimal(double v);

json to_json(const PauliString& p);
json to_json(const HamiltonianSpec& h);
HamiltonianSpec hamiltonian_from_json(const json& j);

json to_json(const TorusLattice& lat);
json to_json(const SectorBasis& basis, std::size_t first_k);
json to_json(const SpectralResult& r);
json to_json(const GapScan& scan);
json to_json(const SweepResult& r);
json to_json(const DualityReport& r);
json to_json(const ProtectionReport& r);

json to_json(const SweepConfig& c);
/// Strict: unknown keys and wrong types throw std::invalid_argument.
SweepConfig sweep_config_from_json(const json& j);

std::string gap_scan_csv(const GapScan& scan, const ModelParams& params, const Schedule& schedule);
std::string sweep_csv(const SweepResult& r);

}  // namespace tcprep
