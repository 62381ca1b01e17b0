#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topomorph/graph.hpp"
#include "topomorph/model.hpp"
#include "topomorph/selection.hpp"

namespace topomorph {

struct Dataset {
    std::size_t dims = 0;
    std::size_t classes = 0;
    std::vector<double> features;       // size() x dims, row-major
    std::vector<std::uint32_t> labels;  // in [0, classes)

    std::size_t size() const { return labels.size(); }
    const double* row(std::size_t i) const { return features.data() + i * dims; }
};

enum class PartitionFlavor { label2, labeldir, quantity_skew, feat_noise, mixed };

PartitionFlavor partition_flavor_from_string(const std::string& s);
std::string to_string(PartitionFlavor f);

struct PartitionSpec {
    PartitionFlavor flavor = PartitionFlavor::label2;
    double beta = 0.5;                   // Dirichlet concentration (labeldir/quantity/mixed)
    double eta = 0.2;                    // feature noise level (feat_noise/mixed)
    std::uint32_t classes_per_node = 2;  // label2
};

struct TrainConfig {
    std::uint32_t prologue_epochs = 2;
    std::uint32_t local_epochs = 1;
    double learning_rate = 0.1;
    std::uint32_t rounds = 30;
    std::uint32_t batch_size = 32;
    std::uint64_t seed = 0;
};

// Gaussian blobs, one per class, unit variance, centers on a sphere of
// radius 3. center_shift translates every center along a seed-derived
// direction, modelling an out-of-distribution global dataset.
Dataset synth_dataset(std::uint32_t classes, std::uint32_t dims, std::uint32_t per_class,
                      double center_shift, std::uint64_t seed);

// Splits a dataset across n nodes according to the spec. Label-based
// flavors distribute every input sample; a node left without samples is
// retried with a fresh sub-seed up to 10 times before failing.
std::vector<Dataset> partition_data(const Dataset& data, const PartitionSpec& spec,
                                    std::uint32_t n, std::uint64_t seed);

// Mini-batch SGD on softmax cross-entropy with deterministic shuffling.
ModelParams sgd_train(ModelParams params, const Dataset& data, std::uint32_t epochs, double lr,
                      std::uint32_t batch, std::uint64_t seed);

// Cross-entropy over the dataset and its analytic gradient, exposed for the
// finite-difference checks.
double ce_loss(const ModelParams& params, const Dataset& data);
void ce_gradient(const ModelParams& params, const Dataset& data, ModelParams& grad);

// Elementwise mean of own and all neighbor parameter sets.
ModelParams fedavg_aggregate(const ModelParams& own, const std::vector<const ModelParams*>& neighbors);

// Fraction of test samples whose argmax logit matches the label; ties break
// toward the lowest class index.
double evaluate(const ModelParams& params, const Dataset& test);

struct Phase3Metrics {
    std::uint32_t round = 0;
    double mean_accuracy = 0.0;
    double min_accuracy = 0.0;
    double max_accuracy = 0.0;
    std::uint64_t bytes_downloaded = 0;
};

// Decentralized training over the fixed final topology: each round every
// participant trains locally, then all participants simultaneously average
// their own and their 1-hop neighbors' post-training weights.
std::vector<Phase3Metrics> train_phase3(const Topology& t, const CliquePlan& plan,
                                        const std::vector<Dataset>& locals, const Dataset& test,
                                        const TrainConfig& cfg,
                                        const std::vector<ModelParams>& initial);

}  // namespace topomorph
