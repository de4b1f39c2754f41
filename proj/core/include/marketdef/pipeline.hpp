#pragma once
// Batch orchestration behind the CLI: configuration loading with flag
// overrides, the cluster / cla / screen pipelines, and atomic run-directory
// output. A full run is a pure function of (config, input files, seed);
// repeated runs produce byte-identical output trees.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marketdef/cla.hpp"
#include "marketdef/clustering.hpp"
#include "marketdef/dataset.hpp"

namespace marketdef {

struct ClusterConfig {
    std::filesystem::path data_csv;
    std::string id_column = "product_id";
    std::vector<FeatureSpec> features;
    std::optional<std::size_t> k;      // forced cluster count; else gap-selected
    std::size_t k_max = 20;
    int restarts = 100;
    int B = 30;
    GapReference reference = GapReference::uniform_box;
    Seeding seeding = Seeding::kmeanspp;
    std::optional<std::string> anchor;  // product id anchoring the first center
    double elbow_threshold = kDefaultElbowThreshold;
    std::size_t max_candidates = 3;
};

struct AlRequest {
    std::string basis;          // supplied | demand | elasticity | adr | obrien
    std::map<std::string, double> params;
};

struct ClaConfig {
    FirmEconomics economics;
    SsnipScenario scenario; // carries the price-increase fraction y
    std::optional<std::string> avc_method;  // simple | weighted
    std::vector<double> avc_pool;
    std::vector<double> avc_quantities;
    std::vector<AlRequest> actual_loss;
};

struct ScreenConfig {
    std::filesystem::path shares_csv;
    std::vector<std::string> merging;
};

struct RunConfig {
    std::string pipeline; // cluster | cla | screen | simulate-wholesalers
    std::uint64_t seed = 0;
    bool seed_explicit = false; // config document carried a seed key
    std::filesystem::path out_dir = "out";
    bool emit_svg = false;
    bool drop_constant = false;
    int threads = 1; // execution-only; never echoed into reports
    ClusterConfig cluster;
    ClaConfig cla;
    ScreenConfig screen;
};

// Flag values layered over the config document (flags win).
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::size_t> k_max;
    std::optional<int> restarts;
    std::optional<int> B;
    std::optional<std::string> reference; // uniform | pca
    std::optional<std::string> anchor;
    std::optional<std::string> out_dir;
    std::optional<bool> emit_svg;
    std::optional<bool> drop_constant;
    std::optional<int> threads;
};

RunConfig parse_config(const std::string& json_text, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& cfg, const ConfigOverrides& o);

// Canonical JSON echo of the analysis-relevant configuration.
std::string config_echo(const RunConfig& cfg);

struct AnalysisReport {
    // File name -> bytes for the whole run directory; "report.json" is
    // always present.
    std::map<std::string, std::string> files;

    const std::string& report_json() const { return files.at("report.json"); }
};

AnalysisReport run_cluster_pipeline(const RunConfig& cfg);
AnalysisReport run_cla(const RunConfig& cfg);
AnalysisReport run_screen(const RunConfig& cfg);
AnalysisReport run_simulate_wholesalers(const RunConfig& cfg);

// Dispatch on cfg.pipeline.
AnalysisReport run(const RunConfig& cfg);

// Stages the files beside `out_dir`, then swaps the staged directory into
// place; an existing directory is replaced only after staging succeeded, so
// no error path leaves a partial tree.
void write_report(const AnalysisReport& report, const std::filesystem::path& out_dir);

} // namespace marketdef
