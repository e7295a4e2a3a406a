#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "efo/control.hpp"
#include "efo/fhtd.hpp"
#include "efo/mdp.hpp"

namespace efo {

/// Binary table layout: "TPD1", u32 LE dims (H, S, A), then H*S*A f64 LE, row-major.
struct RawTable {
  std::uint32_t horizon = 0;
  std::uint32_t num_states = 0;
  std::uint32_t num_actions = 0;
  std::vector<double> values;
};

std::vector<unsigned char> encode_table(const RawTable& table);
/// Throws an artifact-format error on bad magic, truncation or trailing bytes.
RawTable decode_table(std::span<const unsigned char> bytes);

void write_table(const std::filesystem::path& path, const RawTable& table);
RawTable read_table(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Sidecar path: same stem, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& table_path);

/// Writes <path> and its sidecar. `metadata` is extended with the table's own
/// fields (outcome, horizon, discount, dims).
void save_fhgvf(const std::filesystem::path& path, const FhgvfTable& table, nlohmann::json metadata);
struct LoadedFhgvf {
  FhgvfTable table;
  nlohmann::json metadata;
};
LoadedFhgvf load_fhgvf(const std::filesystem::path& path);

void save_qtable(const std::filesystem::path& path, const QTable& q, nlohmann::json metadata);
QTable load_qtable(const std::filesystem::path& path);

/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t hash);

void save_policy(const std::filesystem::path& path, const Policy& policy, nlohmann::json metadata);
Policy load_policy(const std::filesystem::path& path);

}  // namespace efo
