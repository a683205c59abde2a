#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "curator/pipeline.hpp"

namespace curator {

// CSV: header `t,i,j,k,x,y,z,<var...>`, one row per record, reals printed
// with 17 significant digits so they round-trip exactly.
std::string samples_to_csv(const SampleSet& samples);
void write_samples_csv(const SampleSet& samples, const std::filesystem::path& file);
// Reads records back; the normalized t coordinate is not stored in the CSV
// and is recomputed from `nt` when given.
SampleSet read_samples_csv(const std::filesystem::path& file, std::size_t nt = 0);

// Headerless little-endian 8-byte reals, one row per record, CSV column order.
void write_samples_binary(const SampleSet& samples, const std::filesystem::path& file);

nlohmann::json provenance_to_json(const Provenance& provenance);
Provenance provenance_from_json(const nlohmann::json& json);

// JSON sidecar: provenance plus variables, record count and a creation
// timestamp. Timestamps only ever appear here, never in the CSV.
void write_sidecar(const SampleSet& samples, const std::filesystem::path& file,
                   const nlohmann::json& extra = nlohmann::json::object());

}  // namespace curator
