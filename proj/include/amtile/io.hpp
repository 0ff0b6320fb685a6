#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "amtile/freeaction.hpp"

namespace amtile {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json element_to_json(const Group& g, const Element& e);
Element element_from_json(const Group& g, const Json& j);

/// A subset is written as {"folner": n} when it equals F_n, otherwise as a
/// coordinate list. Reading also accepts {"ball": r} and "ball r".
Json subset_to_json(const FiniteSubset& s);
FiniteSubset subset_from_json(const Group& g, const Json& j);
/// "ball 2", "folner 3", "identity" or an element list like "(1,0);(0,1)".
FiniteSubset parse_subset_spec(const Group& g, const std::string& text);

Json window_to_json(const Window& w);
WindowPtr window_from_json(const Json& j);

/// Shapes and centers only; the window travels separately.
Json tiling_body(const Quasitiling& qt);
Quasitiling tiling_from_body(WindowPtr w, const Json& j);

Json quasitiling_to_json(const Quasitiling& qt);
Quasitiling quasitiling_from_json(const Json& j);
Json witness_to_json(const DisjointWitness& w);
DisjointWitness witness_from_json(const Json& j);

Json field_to_json(const PatternField& x);
PatternField field_from_json(const Json& j);

Json table_to_json(const MasterPartitionTable& t, const Group& g);
MasterPartitionTable table_from_json(const Group& g, const Json& j);
Json levels_to_json(const std::vector<TilingLevel>& levels, const MasterPartitionTable& table);
struct HierarchyArtifact {
  std::vector<TilingLevel> levels;
  MasterPartitionTable table;
};
HierarchyArtifact levels_from_json(const Json& j);

Json to_json(const WitnessAudit& a);
Json to_json(const GreedyReport& r);
Json to_json(const ExactifyReport& r);
Json to_json(const ExactAudit& a);
Json to_json(const LevelReport& r);
Json to_json(const std::vector<ProbeRow>& rows);
Json to_json(const DensityRange& d);
Json to_json(const FiniteOrderAudit& a);
Json to_json(const ProductAudit& a, const Group& g);

/// Canonical text form: two-space indent, sorted keys, trailing newline.
std::string dump(const Json& j);

/// Artifact kind tag, or empty when absent.
std::string artifact_kind(const Json& j);

/// Z^2 only. One color or glyph per shape id, tile boundaries drawn and
/// centers marked (SVG). The grid is the bounding box of the universe.
std::string render_z2(const Quasitiling& qt, const std::string& format);

/// Re-audits an artifact; returns a report with an "ok" flag.
Json verify_artifact(const Json& artifact);

struct LevelConfig {
  std::string K = "ball 1";
  double eps = 0.5;
  double greedy_eps = 0.25;
  int n0 = 3;
  int stride = 1;
  int shape_count = 3;
  double gamma = 0.05;
  int max_f_index = 64;
};

struct RunConfig {
  std::string group = "Z2";
  int side = 0;          // box window when positive
  int folner_index = 0;  // Følner window otherwise
  std::string margin = "default";
  std::vector<std::string> stages{"quasitile"};
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "out";

  // quasitile
  double eps = 0.25;
  int n0 = 3;
  int stride = 1;
  int shape_count = 0;
  bool strict = false;
  int max_index = 64;
  // exactify
  double gamma = 0.05;
  std::string K = "ball 2";
  double exact_eps = 0.3;
  int max_f_index = 64;
  // hierarchy
  std::vector<LevelConfig> levels;
  // complexity
  std::vector<int> probes{1, 2, 3};
  // freeaction
  std::vector<std::string> free_elements;
  std::string finite_element;
  // render
  std::vector<std::string> render_formats{"svg"};
};

/// Parses YAML text; throws Error naming the offending field.
RunConfig parse_run_config(const std::string& yaml_text);
RunConfig load_run_config(const std::string& path);
void validate(const RunConfig& c);

struct RunOutcome {
  Json report;
  std::map<std::string, std::string> artifacts;  // file name -> content
  bool ok = true;
};

/// Runs the requested stages in pipeline order. Nothing is written to disk.
RunOutcome run(const RunConfig& c);
/// run() followed by writing artifacts and report.json under c.output.
RunOutcome run_and_write(const RunConfig& c);

}  // namespace amtile
