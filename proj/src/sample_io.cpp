#include "curator/sample_io.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "curator/error.hpp"

namespace curator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_real(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string samples_to_csv(const SampleSet& samples) {
  std::string out = "t,i,j,k,x,y,z";
  for (const auto& v : samples.variables) out += "," + v;
  out += '\n';
  for (const auto& r : samples.records) {
    out += std::to_string(r.timestep);
    for (auto idx : r.index) {
      out += ',';
      out += std::to_string(idx);
    }
    for (int a = 0; a < 3; ++a) {
      out += ',';
      append_real(out, r.coords[a]);
    }
    for (double v : r.values) {
      out += ',';
      append_real(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_samples_csv(const SampleSet& samples, const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  const auto text = samples_to_csv(samples);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

SampleSet read_samples_csv(const fs::path& file, std::size_t nt) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read '" + file.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty sample file");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 7 || header[0] != "t" || header[1] != "i") {
    throw IoError("'" + file.string() + "' is not a sample CSV");
  }
  SampleSet s;
  s.variables.assign(header.begin() + 7, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw IoError("ragged sample CSV row");
    SampleRecord r;
    r.timestep = std::stoull(cells[0]);
    for (int a = 0; a < 3; ++a) r.index[a] = std::stoull(cells[1 + a]);
    for (int a = 0; a < 3; ++a) r.coords[a] = std::strtod(cells[4 + a].c_str(), nullptr);
    r.coords[3] = nt > 1 ? static_cast<double>(r.timestep) / static_cast<double>(nt - 1) : 0.0;
    for (std::size_t v = 7; v < cells.size(); ++v) {
      r.values.push_back(std::strtod(cells[v].c_str(), nullptr));
    }
    s.records.push_back(std::move(r));
  }
  return s;
}

void write_samples_binary(const SampleSet& samples, const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  std::vector<double> row;
  for (const auto& r : samples.records) {
    row.clear();
    row.push_back(static_cast<double>(r.timestep));
    for (auto idx : r.index) row.push_back(static_cast<double>(idx));
    for (int a = 0; a < 3; ++a) row.push_back(r.coords[a]);
    row.insert(row.end(), r.values.begin(), r.values.end());
    for (double v : row) {
      unsigned char bytes[8];
      std::memcpy(bytes, &v, 8);
      if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes, bytes + 8);
      }
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

json provenance_to_json(const Provenance& p) {
  json cubes = json::array();
  for (const auto& c : p.cubes) {
    cubes.push_back({{"timestep", c.timestep},
                     {"cube_index", c.cube_index},
                     {"origin", c.block.origin},
                     {"extents", c.block.extents},
                     {"first_record", c.first_record},
                     {"record_count", c.record_count}});
  }
  return {{"method", p.method},
          {"hypercube_method", p.hypercube_method},
          {"seed", p.seed},
          {"config_hash", p.config_hash},
          {"workers", p.workers},
          {"phase1_seconds", p.phase1_seconds},
          {"phase2_seconds", p.phase2_seconds},
          {"cubes", cubes},
          {"effective_config", p.effective_config}};
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  try {
    p.method = j.at("method").get<std::string>();
    p.hypercube_method = j.at("hypercube_method").get<std::string>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.config_hash = j.at("config_hash").get<std::uint64_t>();
    p.workers = j.at("workers").get<std::size_t>();
    p.phase1_seconds = j.at("phase1_seconds").get<double>();
    p.phase2_seconds = j.at("phase2_seconds").get<double>();
    p.effective_config = j.at("effective_config").get<std::string>();
    for (const auto& c : j.at("cubes")) {
      CubeRange r;
      r.timestep = c.at("timestep").get<std::size_t>();
      r.cube_index = c.at("cube_index").get<std::size_t>();
      r.block.origin = c.at("origin").get<Index3>();
      r.block.extents = c.at("extents").get<Extents3>();
      r.block.timestep = r.timestep;
      r.first_record = c.at("first_record").get<std::size_t>();
      r.record_count = c.at("record_count").get<std::size_t>();
      p.cubes.push_back(r);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed provenance: ") + e.what());
  }
  return p;
}

void write_sidecar(const SampleSet& samples, const fs::path& file,
                   const json& extra) {
  json doc = {{"provenance", provenance_to_json(samples.provenance)},
              {"variables", samples.variables},
              {"records", samples.records.size()}};
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["created"] = stamp;
  for (const auto& [k, v] : extra.items()) doc[k] = v;
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace curator
