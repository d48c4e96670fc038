#pragma once

// Experiment configs (flat key=value text with [section] headers), the
// canned suites behind the CLI, and the report plumbing that stamps every
// output with the tool version and a hash of the config it came from.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frostlab/io.hpp"

namespace frostlab {

inline constexpr const char* kToolVersion = "frostlab 0.1.0";

class ExperimentConfig {
  public:
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double get_real(const std::string& section, const std::string& key,
                    double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;

    // FNV-1a over the raw config text; embedded in every report.
    std::uint64_t hash() const { return hash_; }
    const std::string& text() const { return text_; }

    // Cross-parameter guards that single modules cannot see: eta must stay
    // below eps^{3/eps+1}/4 when both drive a uniformization pipeline, and
    // the viewpoint separation floor must be positive for radial runs.
    void validate() const;

  private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
    std::string text_;
    std::uint64_t hash_ = 0;
};

struct SuiteOutput {
    // Relative file name -> full text content, in deterministic order.
    std::vector<std::pair<std::string, std::string>> files;
    KeyValueBlock summary;
};

// The canned suites. cfg may be null (canonical parameters); seed shifts the
// suite's base seed and threads is a worker-count request for the scans.
SuiteOutput run_sharpness_line(const ExperimentConfig* cfg, std::uint64_t seed,
                               int threads);
SuiteOutput run_fu_ren_sweep(const ExperimentConfig* cfg, std::uint64_t seed,
                             int threads);
SuiteOutput run_cantor_scan(const ExperimentConfig* cfg, std::uint64_t seed,
                            int threads);
SuiteOutput run_furstenberg_sweep(const ExperimentConfig* cfg, std::uint64_t seed,
                                  int threads);

// Dispatch on [experiment] suite, write the suite's files under out_dir
// (created if missing), return the paths written. Nothing is written until
// the whole suite has computed successfully.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& out_dir,
                                        std::optional<std::uint64_t> seed_override,
                                        int threads);

}  // namespace frostlab
