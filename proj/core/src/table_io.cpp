#include "efo/table_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "efo/error.hpp"

namespace efo {

namespace {

constexpr unsigned char kMagic[4] = {'T', 'P', 'D', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void require_kind(const nlohmann::json& meta, const std::string& kind, const std::filesystem::path& path) {
  if (!meta.is_object() || meta.value("kind", std::string()) != kind) {
    throw Error(ErrorKind::ArtifactFormat, "'" + path.string() + "' is not a " + kind + " artifact");
  }
}

}  // namespace

std::vector<unsigned char> encode_table(const RawTable& table) {
  const std::size_t n = static_cast<std::size_t>(table.horizon) * table.num_states * table.num_actions;
  if (table.values.size() != n) throw Error(ErrorKind::Shape, "table values do not match its dimensions");
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(16 + 8 * n);
  put_u32(out, table.horizon);
  put_u32(out, table.num_states);
  put_u32(out, table.num_actions);
  for (double v : table.values) put_f64(out, v);
  return out;
}

RawTable decode_table(std::span<const unsigned char> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::ArtifactFormat, "missing TPD1 header");
  }
  RawTable t;
  t.horizon = get_u32(bytes.data() + 4);
  t.num_states = get_u32(bytes.data() + 8);
  t.num_actions = get_u32(bytes.data() + 12);
  const std::uint64_t n = static_cast<std::uint64_t>(t.horizon) * t.num_states * t.num_actions;
  if (bytes.size() - 16 != n * 8) {
    throw Error(ErrorKind::ArtifactFormat, "table payload has " + std::to_string(bytes.size() - 16) +
                                               " bytes, expected " + std::to_string(n * 8));
  }
  t.values.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) t.values[i] = get_f64(bytes.data() + 16 + 8 * i);
  return t;
}

void write_table(const std::filesystem::path& path, const RawTable& table) {
  const auto bytes = encode_table(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RawTable read_table(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_table(bytes);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ArtifactFormat, "'" + path.string() + "': " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
}

std::filesystem::path sidecar_path(const std::filesystem::path& table_path) {
  auto p = table_path;
  p.replace_extension(".json");
  return p;
}

void save_fhgvf(const std::filesystem::path& path, const FhgvfTable& table, nlohmann::json metadata) {
  metadata["format"] = "TPD1";
  metadata["kind"] = "fhgvf";
  metadata["outcome"] = table.outcome_name();
  metadata["horizon"] = table.horizon();
  metadata["discount"] = table.discount();
  metadata["num_states"] = table.num_states();
  metadata["num_actions"] = table.num_actions();
  write_table(path, {static_cast<std::uint32_t>(table.horizon()), static_cast<std::uint32_t>(table.num_states()),
                     static_cast<std::uint32_t>(table.num_actions()), table.data()});
  write_json(sidecar_path(path), metadata);
}

LoadedFhgvf load_fhgvf(const std::filesystem::path& path) {
  auto meta = read_json(sidecar_path(path));
  require_kind(meta, "fhgvf", path);
  auto raw = read_table(path);
  try {
    FhgvfTable table(meta.at("outcome").get<std::string>(), raw.horizon, raw.num_states, raw.num_actions,
                     meta.at("discount").get<double>());
    if (meta.at("horizon").get<std::size_t>() != raw.horizon) {
      throw Error(ErrorKind::ArtifactFormat, "sidecar horizon disagrees with '" + path.string() + "'");
    }
    table.data() = std::move(raw.values);
    return {std::move(table), std::move(meta)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ArtifactFormat, "'" + sidecar_path(path).string() + "': " + e.what());
  }
}

void save_qtable(const std::filesystem::path& path, const QTable& q, nlohmann::json metadata) {
  metadata["format"] = "TPD1";
  metadata["kind"] = "qtable";
  metadata["num_states"] = q.num_states();
  metadata["num_actions"] = q.num_actions();
  write_table(path, {1, static_cast<std::uint32_t>(q.num_states()), static_cast<std::uint32_t>(q.num_actions()), q.data()});
  write_json(sidecar_path(path), metadata);
}

QTable load_qtable(const std::filesystem::path& path) {
  auto raw = read_table(path);
  if (raw.horizon != 1) throw Error(ErrorKind::ArtifactFormat, "Q-table must have a single level");
  QTable q(raw.num_states, raw.num_actions);
  q.data() = std::move(raw.values);
  return q;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void save_policy(const std::filesystem::path& path, const Policy& policy, nlohmann::json metadata) {
  metadata["format"] = "TPD1";
  metadata["kind"] = "policy";
  metadata["num_states"] = policy.num_states();
  metadata["num_actions"] = policy.num_actions();
  metadata["policy_hash"] = hash_hex(policy_hash(policy));
  write_table(path, {1, static_cast<std::uint32_t>(policy.num_states()),
                     static_cast<std::uint32_t>(policy.num_actions()), policy.data()});
  write_json(sidecar_path(path), metadata);
}

Policy load_policy(const std::filesystem::path& path) {
  auto raw = read_table(path);
  if (raw.horizon != 1) throw Error(ErrorKind::ArtifactFormat, "policy table must have a single level");
  Policy p(raw.num_states, raw.num_actions);
  p.data() = std::move(raw.values);
  return p;
}

}  // namespace efo
