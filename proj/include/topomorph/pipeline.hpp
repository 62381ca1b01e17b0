#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topomorph/bftm.hpp"
#include "topomorph/config.hpp"
#include "topomorph/learn.hpp"
#include "topomorph/proxy.hpp"
#include "topomorph/selection.hpp"

namespace topomorph {

// All randomness in a run flows from these labeled streams, so staged modes
// and the one-shot experiment mode derive identical inputs.
struct RunSeeds {
    std::uint64_t dataset, test, global, partition, prologue, morph, cluster, ccc, homo, train;
    static RunSeeds from_master(std::uint64_t master);
};

// Phase inputs deterministically regenerated from the config.
struct PipelineInputs {
    Dataset train_data;
    Dataset test_data;
    GlobalDataset global_data;
    std::vector<Dataset> locals;
    std::vector<ModelParams> prologue_params;
    std::vector<Proxy> proxies;
};

PipelineInputs prepare_inputs(const ExperimentConfig& cfg);

// Phase I on prepared inputs; honours morph.max_rounds / early_stop.
MorphResult phase1_morph(const ExperimentConfig& cfg, const PipelineInputs& inputs);

// Phase II: clustering plus both candidate final graphs.
struct Phase2Result {
    ClusterAssignment assignment;
    SelectionResult hetero;
    SelectionResult homo;
};
Phase2Result phase2_build(const ExperimentConfig& cfg, const SimilarityMatrix& matrix);

// Phase III over one arm's topology; injects p partitions when requested.
std::vector<Phase3Metrics> phase3_train(const ExperimentConfig& cfg, const PipelineInputs& inputs,
                                        const SelectionResult& arm);

// Runs the configured mode end to end, writing artifacts plus a manifest of
// content hashes under cfg.out. Returns the process exit status.
int run_pipeline(const ExperimentConfig& cfg);

std::string sha256_file(const std::string& path);
void write_metrics_csv(const std::string& path, const std::vector<Phase3Metrics>& metrics);
std::vector<Phase3Metrics> read_metrics_csv(const std::string& path);
void write_accounting_csv(const std::string& path, const std::vector<RoundStats>& rounds);

}  // namespace topomorph
