#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "skillcompass/compass.hpp"
#include "skillcompass/domains.hpp"
#include "skillcompass/econo.hpp"
#include "skillcompass/profiles.hpp"
#include "skillcompass/skillnet.hpp"

namespace skillcompass {

inline constexpr int kArtifactFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "0.3.0";

struct PipelineConfig {
  ProfileSchema schema;
  double resolution = 1.0;
  std::uint64_t seed = 42;
  std::size_t top_k = 5;
  std::map<DomainId, std::string> label_overrides;
  FeatureSpec spec;
  // When false the default language list is narrowed to skills in the data.
  bool targets_explicit = false;
  std::size_t min_subset_size = 100;
  std::size_t min_group_size = 30;
  double vif_threshold = 10.0;
  bool strict = false;  // any rejected input row aborts the run
};

struct Provenance {
  std::string input_sha256;
  std::size_t input_rows = 0;
  std::size_t rejected_rows = 0;
  std::uint64_t seed = 0;
  double resolution = 1.0;
  std::optional<std::string> created;  // from SOURCE_DATE_EPOCH when set
  std::string tool_version{kToolVersion};
};

/// Everything the query side needs, frozen after a pipeline run.
struct ModelArtifact {
  SkillLexicon lexicon;
  SkillGraph graph;
  DomainPartition partition;
  FeatureSpec spec;  // baselines resolved
  FitResult fit;     // residuals are not persisted
  CollinearityReport collinearity;
  ComplementarityGrid grid;
  std::vector<WageGroup> quartiles;            // by dominant domain
  std::vector<WageGroup> diversity_quartiles;  // by (domain, diversity level)
  Provenance provenance;
};

// Each stage annotates its errors ("cluster: ...").
ModelArtifact run_pipeline(const ParseResult& input, const PipelineConfig& config,
                           std::string input_sha256 = {});
ModelArtifact run_pipeline_file(const std::string& profiles_path, const PipelineConfig& config);

std::string sha256_hex(std::string_view bytes);

nlohmann::json to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const nlohmann::json& j);  // validates, throws InvalidArtifact

// Serialised artifact text, including its checksum line.
std::string dump_artifact(const ModelArtifact& artifact);
void save_artifact(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_artifact(const std::string& path);
ModelArtifact parse_artifact(std::string_view text);

// Self-consistency checks shared by save and load.
void check_consistency(const ModelArtifact& artifact);

// Doubles that may be non-finite: NaN -> null, +-inf -> "inf"/"-inf".
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json grid_to_json(const ComplementarityGrid& grid, const SkillLexicon& lexicon);
nlohmann::json fit_to_json(const FitResult& fit);

}  // namespace skillcompass
