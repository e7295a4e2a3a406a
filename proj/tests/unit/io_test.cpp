#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "efo/error.hpp"
#include "efo/explanation_io.hpp"
#include "efo/svg.hpp"
#include "efo/table_io.hpp"
#include "../support/fixtures.hpp"

using namespace efo;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an efo::Error");
  return ErrorKind::Io;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("efo_io_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("table byte layout") {
  const auto bytes = encode_table({1, 1, 2, {1.0, -2.0}});
  REQUIRE(bytes.size() == 16 + 16);
  CHECK(std::memcmp(bytes.data(), "TPD1", 4) == 0);
  const unsigned char dims[] = {1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0};
  CHECK(std::memcmp(bytes.data() + 4, dims, 12) == 0);
  // 1.0 = 0x3FF0000000000000, little endian
  const unsigned char one[] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
  CHECK(std::memcmp(bytes.data() + 16, one, 8) == 0);
}

TEST_CASE("encode/decode round-trips bit-exactly") {
  Rng rng = RunSeed{5}.stream(StreamPurpose::Testing);
  for (int trial = 0; trial < 200; ++trial) {
    RawTable t{std::uint32_t(1 + rng.below(4)), std::uint32_t(1 + rng.below(9)), std::uint32_t(1 + rng.below(5)), {}};
    t.values.resize(std::size_t(t.horizon) * t.num_states * t.num_actions);
    for (double& v : t.values) {
      std::uint64_t bits = rng.next_u64();
      std::memcpy(&v, &bits, sizeof v);
      if (std::isnan(v)) v = -0.0;
    }
    const auto back = decode_table(encode_table(t));
    CHECK(back.horizon == t.horizon);
    CHECK(back.num_states == t.num_states);
    CHECK(back.num_actions == t.num_actions);
    CHECK(same_bits(back.values, t.values));
  }
}

TEST_CASE("malformed tables are artifact-format errors") {
  auto bytes = encode_table({2, 2, 2, std::vector<double>(8, 0.5)});
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(kind_of([&] { (void)decode_table(bad); }) == ErrorKind::ArtifactFormat);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK(kind_of([&] { (void)decode_table(truncated); }) == ErrorKind::ArtifactFormat);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(kind_of([&] { (void)decode_table(trailing); }) == ErrorKind::ArtifactFormat);
  CHECK(kind_of([&] { (void)decode_table(std::vector<unsigned char>{'T', 'P'}); }) == ErrorKind::ArtifactFormat);
}

TEST_CASE("artifacts on disk") {
  TempDir dir;
  SUBCASE("fhgvf with sidecar") {
    FhgvfTable t("dropoff", 3, 4, 2, 0.9);
    for (std::size_t i = 0; i < t.data().size(); ++i) t.data()[i] = 0.1 * double(i);
    save_fhgvf(dir.path / "dropoff.tpd", t, {{"seed", 7}});
    CHECK(fs::exists(dir.path / "dropoff.json"));
    const auto loaded = load_fhgvf(dir.path / "dropoff.tpd");
    CHECK(loaded.table.outcome_name() == "dropoff");
    CHECK(loaded.table.discount() == 0.9);
    CHECK(same_bits(loaded.table.data(), t.data()));
    CHECK(loaded.metadata.at("seed") == 7);
    CHECK(loaded.metadata.at("kind") == "fhgvf");
  }
  SUBCASE("q-table and policy") {
    QTable q(3, 2);
    q(1, 1) = -4.5;
    save_qtable(dir.path / "q.tpd", q, nlohmann::json::object());
    CHECK(load_qtable(dir.path / "q.tpd").data() == q.data());
    const auto m = testing::random_model(1);
    save_policy(dir.path / "policy.tpd", m.target, nlohmann::json::object());
    const auto pi = load_policy(dir.path / "policy.tpd");
    CHECK(same_bits(pi.data(), m.target.data()));
    CHECK(read_json(dir.path / "policy.json").at("policy_hash").get<std::string>().size() == 16);
  }
  SUBCASE("wrong kind and missing files") {
    QTable q(3, 2);
    save_qtable(dir.path / "q.tpd", q, nlohmann::json::object());
    CHECK(kind_of([&] { (void)load_fhgvf(dir.path / "q.tpd"); }) == ErrorKind::ArtifactFormat);
    CHECK(kind_of([&] { (void)read_table(dir.path / "absent.tpd"); }) == ErrorKind::Io);
  }
}

TEST_CASE("explanation serialisation") {
  FhgvfTable a("dropoff", 2, 1, 1, 1.0);
  FhgvfTable b("move", 2, 1, 1, 1.0);
  a(0, 0, 0) = 0.25;
  a(1, 0, 0) = 0.5;
  b(0, 0, 0) = 0.75;
  b(1, 0, 0) = 0.7;
  const std::vector<FhgvfTable> tables = {a, b};
  const auto e = explain(tables, 0, 0, {{"dropoff", 20.0}, {"move", -1.0}}, 0.99, Provenance::Learned);
  const auto j = explanation_to_json(e, [](ActionId) { return std::string("north"); });
  CHECK(j.at("action").at("name") == "north");
  CHECK(j.at("events").size() == 2);
  CHECK(j.at("out_of_range") == true);
  CHECK(j.at("terminated").at("probability")[1].get<double>() == doctest::Approx(0.8));

  const auto csv = explanation_to_csv(e);
  CHECK(csv.rfind("h,event,probability,probability_clamped,reward_component\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3);

  const auto svg = explanation_events_svg(e, "a <b> & c");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("a &lt;b&gt; &amp; c") != std::string::npos);
  CHECK(explanation_rewards_svg(e, "r").find("</svg>") != std::string::npos);

  const auto c = contrastive(e, e);
  CHECK(contrast_to_json(c).at("reward_diff")[0] == 0.0);
  CHECK(contrast_to_csv(c).rfind("h,series,fact_minus_foil\n", 0) == 0);
  CHECK(contrast_svg(c, "why").find("polyline") != std::string::npos);
}

TEST_CASE("svg escaping") { CHECK(svg::escape("\"x\" & 'y'") == "&quot;x&quot; &amp; &apos;y&apos;"); }
