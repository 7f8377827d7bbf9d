#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "o3v/asymptotics.hpp"
#include "o3v/radial.hpp"
#include "o3v/stability.hpp"
#include "o3v/torus.hpp"

namespace o3v::io {

using json = nlohmann::ordered_json;

/// %.17g, with inf/-inf/nan spelled out.
std::string format_number(double x);

/// JSON text with every floating-point number printed to 17 significant
/// digits. Non-finite numbers become null.
std::string dump_json(const json& j, int indent = 2);

/// Writes to a sibling temporary file and renames it over `path`. Missing
/// parent directories are created.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string profile_csv(const RadialSolution& sol);
std::string beta_curve_csv(const BetaCurve& curve);

/// epsilon, sup_K, inf_K, total_abs_mass, then mass/pohozaev/quantization
/// columns for every vortex.
std::string sweep_csv(const std::vector<SweepRecord>& records);

/// One grid row (fixed first index i): x, y, u0, v, u.
std::string field_slice_csv(const TorusField& field, int i);

// Field export: `<base>.bin` holds u0 then v, each an n1 x n2 row-major block
// of little-endian float64; `<base>.json` describes shape, periods, block
// offsets and the model.
void export_field(const TorusField& field, const std::filesystem::path& base);
TorusField import_field(const std::filesystem::path& sidecar);

json to_json(const RadialSolution& sol);
json to_json(const BetaCurve& curve);
json to_json(const TorusField& field);
json to_json(const EigenResult& r, bool with_vector = false);
json to_json(const IdentityResult& r);
json to_json(const PohozaevValue& p);
json to_json(const SweepRecord& r);
json to_json(const AlternativeVerdict& v);
json to_json(const VortexSet& vs);

}  // namespace o3v::io
