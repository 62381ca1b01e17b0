#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "topomorph/learn.hpp"

namespace topomorph {

enum class RunMode { morph, build, train, experiment, accounting };

RunMode run_mode_from_string(const std::string& s);
std::string to_string(RunMode m);

struct DatasetConfig {
    std::uint32_t classes = 10;
    std::uint32_t dims = 32;
    std::uint32_t per_class = 200;
    std::uint32_t test_per_class = 50;
    std::uint32_t global_samples = 64;
    double center_shift = 3.0;
};

struct MorphSection {
    std::uint32_t max_rounds = 64;
    bool early_stop = false;  // accept a partial matrix at max_rounds
};

struct SelectionSection {
    std::uint32_t k = 0;                    // 0 selects ceil(log2 n)
    std::uint32_t samples_per_cluster = 0;  // 0 selects ceil(log2 n)
};

struct AccountingSection {
    std::uint64_t proxy_bytes = 0;  // 0 derives from the dataset shape
    std::uint64_t tuple_bytes = 24;
};

// Full experiment description. Parsed from a strict JSON document: unknown
// keys anywhere are hard errors, and validation reports every offending
// field at once.
struct ExperimentConfig {
    RunMode mode = RunMode::experiment;
    std::uint64_t seed = 0;
    std::uint32_t n = 24;
    std::uint32_t degree = 0;  // 0 selects ceil(log2 n)
    std::string out = "out";
    DatasetConfig dataset;
    PartitionSpec partition;
    MorphSection morph;
    SelectionSection selection;
    TrainConfig train;
    std::uint32_t partitions = 0;  // 0 disables partition injection
    AccountingSection accounting;

    static ExperimentConfig parse(const nlohmann::json& j);
    static ExperimentConfig parse_file(const std::string& path);
    nlohmann::json to_json() const;

    std::uint32_t effective_degree() const;
    std::uint32_t effective_k() const;
    std::uint32_t effective_samples_per_cluster() const;
};

}  // namespace topomorph
