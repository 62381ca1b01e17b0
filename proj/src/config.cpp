#include "topomorph/config.hpp"

#include <fstream>
#include <stdexcept>

#include "topomorph/bftm.hpp"

namespace topomorph {

RunMode run_mode_from_string(const std::string& s) {
    if (s == "morph") return RunMode::morph;
    if (s == "build") return RunMode::build;
    if (s == "train") return RunMode::train;
    if (s == "experiment") return RunMode::experiment;
    if (s == "accounting") return RunMode::accounting;
    throw std::invalid_argument("unknown mode: " + s);
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::morph: return "morph";
        case RunMode::build: return "build";
        case RunMode::train: return "train";
        case RunMode::experiment: return "experiment";
        case RunMode::accounting: return "accounting";
    }
    return "?";
}

namespace {

// Collects problems across the whole document so a bad config reports every
// offending field in one pass.
struct Validator {
    std::vector<std::string> problems;

    void check_keys(const nlohmann::json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
        for (const auto& [key, value] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok |= key == a;
            if (!ok) problems.push_back("unknown key '" + where + key + "'");
        }
    }

    template <typename T>
    void read(const nlohmann::json& j, const std::string& where, const char* key, T& out) {
        if (!j.contains(key)) return;
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            problems.push_back("bad value for '" + where + key + "'");
        }
    }

    void finish() {
        if (problems.empty()) return;
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
};

}  // namespace

ExperimentConfig ExperimentConfig::parse(const nlohmann::json& j) {
    ExperimentConfig cfg;
    Validator v;
    v.check_keys(j, "", {"mode", "seed", "n", "degree", "out", "dataset", "partition", "morph",
                         "selection", "train", "partitions", "accounting"});

    if (!j.contains("seed")) v.problems.push_back("missing required key 'seed'");

    std::string mode = "experiment";
    v.read(j, "", "mode", mode);
    try {
        cfg.mode = run_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
        v.problems.push_back(e.what());
    }
    v.read(j, "", "seed", cfg.seed);
    v.read(j, "", "n", cfg.n);
    v.read(j, "", "degree", cfg.degree);
    v.read(j, "", "out", cfg.out);
    v.read(j, "", "partitions", cfg.partitions);

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        v.check_keys(d, "dataset.",
                     {"classes", "dims", "per_class", "test_per_class", "global_samples",
                      "center_shift"});
        v.read(d, "dataset.", "classes", cfg.dataset.classes);
        v.read(d, "dataset.", "dims", cfg.dataset.dims);
        v.read(d, "dataset.", "per_class", cfg.dataset.per_class);
        v.read(d, "dataset.", "test_per_class", cfg.dataset.test_per_class);
        v.read(d, "dataset.", "global_samples", cfg.dataset.global_samples);
        v.read(d, "dataset.", "center_shift", cfg.dataset.center_shift);
    }
    if (j.contains("partition")) {
        const auto& p = j.at("partition");
        v.check_keys(p, "partition.", {"flavor", "beta", "eta", "classes_per_node"});
        std::string flavor = to_string(cfg.partition.flavor);
        v.read(p, "partition.", "flavor", flavor);
        try {
            cfg.partition.flavor = partition_flavor_from_string(flavor);
        } catch (const std::invalid_argument& e) {
            v.problems.push_back(e.what());
        }
        v.read(p, "partition.", "beta", cfg.partition.beta);
        v.read(p, "partition.", "eta", cfg.partition.eta);
        v.read(p, "partition.", "classes_per_node", cfg.partition.classes_per_node);
    }
    if (j.contains("morph")) {
        const auto& m = j.at("morph");
        v.check_keys(m, "morph.", {"max_rounds", "early_stop"});
        v.read(m, "morph.", "max_rounds", cfg.morph.max_rounds);
        v.read(m, "morph.", "early_stop", cfg.morph.early_stop);
    }
    if (j.contains("selection")) {
        const auto& s = j.at("selection");
        v.check_keys(s, "selection.", {"k", "samples_per_cluster"});
        v.read(s, "selection.", "k", cfg.selection.k);
        v.read(s, "selection.", "samples_per_cluster", cfg.selection.samples_per_cluster);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        v.check_keys(t, "train.",
                     {"prologue_epochs", "local_epochs", "learning_rate", "rounds", "batch_size"});
        v.read(t, "train.", "prologue_epochs", cfg.train.prologue_epochs);
        v.read(t, "train.", "local_epochs", cfg.train.local_epochs);
        v.read(t, "train.", "learning_rate", cfg.train.learning_rate);
        v.read(t, "train.", "rounds", cfg.train.rounds);
        v.read(t, "train.", "batch_size", cfg.train.batch_size);
    }
    if (j.contains("accounting")) {
        const auto& a = j.at("accounting");
        v.check_keys(a, "accounting.", {"proxy_bytes", "tuple_bytes"});
        v.read(a, "accounting.", "proxy_bytes", cfg.accounting.proxy_bytes);
        v.read(a, "accounting.", "tuple_bytes", cfg.accounting.tuple_bytes);
    }

    // Semantic checks on whatever parsed cleanly.
    if (cfg.n < 1) v.problems.push_back("'n' must be >= 1");
    if (cfg.degree != 0 && cfg.degree >= cfg.n) v.problems.push_back("'degree' must be < n");
    if (cfg.morph.max_rounds < 1) v.problems.push_back("'morph.max_rounds' must be >= 1");
    if (cfg.train.learning_rate <= 0) v.problems.push_back("'train.learning_rate' must be > 0");
    if (cfg.train.prologue_epochs < 1 || cfg.train.local_epochs < 1 || cfg.train.rounds < 1 ||
        cfg.train.batch_size < 1)
        v.problems.push_back("'train' counts must all be >= 1");
    if (cfg.partition.beta <= 0) v.problems.push_back("'partition.beta' must be > 0");
    if (cfg.partition.eta < 0) v.problems.push_back("'partition.eta' must be >= 0");
    if (cfg.partition.classes_per_node < 1)
        v.problems.push_back("'partition.classes_per_node' must be >= 1");
    if (cfg.dataset.classes < 2 || cfg.dataset.dims < 2)
        v.problems.push_back("'dataset' needs classes >= 2 and dims >= 2");

    v.finish();
    cfg.train.seed = cfg.seed;
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return parse(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["n"] = n;
    j["degree"] = degree;
    j["out"] = out;
    j["dataset"] = {{"classes", dataset.classes},
                    {"dims", dataset.dims},
                    {"per_class", dataset.per_class},
                    {"test_per_class", dataset.test_per_class},
                    {"global_samples", dataset.global_samples},
                    {"center_shift", dataset.center_shift}};
    j["partition"] = {{"flavor", to_string(partition.flavor)},
                      {"beta", partition.beta},
                      {"eta", partition.eta},
                      {"classes_per_node", partition.classes_per_node}};
    j["morph"] = {{"max_rounds", morph.max_rounds}, {"early_stop", morph.early_stop}};
    j["selection"] = {{"k", selection.k}, {"samples_per_cluster", selection.samples_per_cluster}};
    j["train"] = {{"prologue_epochs", train.prologue_epochs},
                  {"local_epochs", train.local_epochs},
                  {"learning_rate", train.learning_rate},
                  {"rounds", train.rounds},
                  {"batch_size", train.batch_size}};
    j["partitions"] = partitions;
    j["accounting"] = {{"proxy_bytes", accounting.proxy_bytes},
                       {"tuple_bytes", accounting.tuple_bytes}};
    return j;
}

std::uint32_t ExperimentConfig::effective_degree() const {
    return degree ? degree : default_degree(n);
}
std::uint32_t ExperimentConfig::effective_k() const {
    return selection.k ? selection.k : default_degree(n);
}
std::uint32_t ExperimentConfig::effective_samples_per_cluster() const {
    return selection.samples_per_cluster ? selection.samples_per_cluster : default_degree(n);
}

}  // namespace topomorph
