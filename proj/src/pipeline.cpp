#include "topomorph/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "topomorph/rng.hpp"

namespace topomorph {

namespace fs = std::filesystem;

RunSeeds RunSeeds::from_master(std::uint64_t master) {
    return RunSeeds{
        derive_seed(master, "dataset"),  derive_seed(master, "test"),
        derive_seed(master, "global"),   derive_seed(master, "partition"),
        derive_seed(master, "prologue"), derive_seed(master, "morph"),
        derive_seed(master, "cluster"),  derive_seed(master, "ccc"),
        derive_seed(master, "homo"),     derive_seed(master, "train"),
    };
}

PipelineInputs prepare_inputs(const ExperimentConfig& cfg) {
    const RunSeeds seeds = RunSeeds::from_master(cfg.seed);
    const auto& d = cfg.dataset;

    PipelineInputs in;
    in.train_data = synth_dataset(d.classes, d.dims, d.per_class, 0.0, seeds.dataset);
    in.test_data = synth_dataset(d.classes, d.dims, d.test_per_class, 0.0, seeds.test);

    const std::uint32_t global_per_class =
        std::max<std::uint32_t>(1, (d.global_samples + d.classes - 1) / d.classes);
    const Dataset global_raw =
        synth_dataset(d.classes, d.dims, global_per_class, d.center_shift, seeds.global);
    in.global_data.samples = global_raw.size();
    in.global_data.dims = global_raw.dims;
    in.global_data.features = global_raw.features;

    in.locals = partition_data(in.train_data, cfg.partition, cfg.n, seeds.partition);

    in.prologue_params.reserve(cfg.n);
    in.proxies.reserve(cfg.n);
    for (std::uint32_t v = 0; v < cfg.n; ++v) {
        ModelParams p = sgd_train(ModelParams::zeros(d.classes, d.dims), in.locals[v],
                                  cfg.train.prologue_epochs, cfg.train.learning_rate,
                                  cfg.train.batch_size, seeds.prologue);
        in.proxies.push_back(compute_proxy(p, in.global_data));
        in.prologue_params.push_back(std::move(p));
    }
    return in;
}

MorphResult phase1_morph(const ExperimentConfig& cfg, const PipelineInputs& inputs) {
    MorphConfig mc;
    mc.degree = cfg.effective_degree();
    mc.max_rounds = cfg.morph.max_rounds;
    mc.seed = RunSeeds::from_master(cfg.seed).morph;
    MorphResult res = run_morphing(inputs.proxies, mc);
    if (!res.completed && !cfg.morph.early_stop)
        throw std::runtime_error(
            "morph: similarity matrix incomplete after max_rounds (enable morph.early_stop to "
            "hand off a partial matrix)");
    return res;
}

Phase2Result phase2_build(const ExperimentConfig& cfg, const SimilarityMatrix& matrix) {
    const RunSeeds seeds = RunSeeds::from_master(cfg.seed);
    Phase2Result res;
    res.assignment = kmeans_rows(matrix, cfg.effective_k(), seeds.cluster);
    res.hetero = ccc_heterogeneous(res.assignment, cfg.effective_samples_per_cluster(), seeds.ccc);
    res.homo = homogeneous_baseline(res.assignment, res.hetero.plan, seeds.homo);
    return res;
}

std::vector<Phase3Metrics> phase3_train(const ExperimentConfig& cfg, const PipelineInputs& inputs,
                                        const SelectionResult& arm) {
    Topology topo = arm.topology;
    if (cfg.partitions > 0) {
        const auto parts = split_partitions(topo, arm.plan.cliques, cfg.partitions);
        topo = merge_topologies(topo.node_count(), parts);
    }
    TrainConfig tc = cfg.train;
    tc.seed = RunSeeds::from_master(cfg.seed).train;
    return train_phase3(topo, arm.plan, inputs.locals, inputs.test_data, tc,
                        inputs.prologue_params);
}

std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("sha256: cannot open " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << "0123456789abcdef"[digest[i] >> 4] << "0123456789abcdef"[digest[i] & 0xf];
    }
    return hex.str();
}

void write_metrics_csv(const std::string& path, const std::vector<Phase3Metrics>& metrics) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("metrics: cannot open " + path);
    f << "round,mean_accuracy,min_accuracy,max_accuracy,bytes_downloaded\n";
    char line[256];
    for (const auto& m : metrics) {
        std::snprintf(line, sizeof(line), "%u,%.17g,%.17g,%.17g,%llu\n", m.round, m.mean_accuracy,
                      m.min_accuracy, m.max_accuracy,
                      static_cast<unsigned long long>(m.bytes_downloaded));
        f << line;
    }
}

std::vector<Phase3Metrics> read_metrics_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("metrics: cannot open " + path);
    std::string line;
    std::getline(f, line);  // header
    std::vector<Phase3Metrics> out;
    while (std::getline(f, line)) {
        Phase3Metrics m;
        unsigned long long bytes = 0;
        if (std::sscanf(line.c_str(), "%u,%lg,%lg,%lg,%llu", &m.round, &m.mean_accuracy,
                        &m.min_accuracy, &m.max_accuracy, &bytes) == 5) {
            m.bytes_downloaded = bytes;
            out.push_back(m);
        }
    }
    return out;
}

void write_accounting_csv(const std::string& path, const std::vector<RoundStats>& rounds) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("accounting: cannot open " + path);
    f << "round,proxy_downloads,proxy_bytes,broadcast_tuples,broadcast_bytes,matrix_fill\n";
    for (const auto& r : rounds) {
        f << r.round << ',' << r.proxy_downloads << ',' << r.proxy_bytes << ','
          << r.broadcast_tuples << ',' << r.broadcast_bytes << ',' << r.matrix_fill << '\n';
    }
}

namespace {

nlohmann::json stats_to_json(const std::vector<RoundStats>& rounds) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rounds) {
        arr.push_back({{"round", r.round},
                       {"proxy_downloads", r.proxy_downloads},
                       {"proxy_bytes", r.proxy_bytes},
                       {"broadcast_tuples", r.broadcast_tuples},
                       {"broadcast_bytes", r.broadcast_bytes},
                       {"matrix_fill", r.matrix_fill}});
    }
    return arr;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

// Loads a staged artifact or fails with a staged-input error.
nlohmann::json load_staged_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("staged input missing: " + path.string() +
                                 " (run the earlier stage into the same --out first)");
    return nlohmann::json::parse(f);
}

struct ArtifactDir {
    fs::path dir;

    explicit ArtifactDir(const std::string& out) : dir(out) { fs::create_directories(dir); }
    fs::path path(const std::string& name) { return dir / name; }
    // manifest.json lists content hashes of every artifact in the directory;
    // wall-clock info stays out of hashed files so reruns are byte-identical.
    void finish() {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name == "manifest.json" || name == "run_info.json") continue;
            names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        nlohmann::json manifest;
        manifest["files"] = nlohmann::json::object();
        for (const auto& name : names) manifest["files"][name] = sha256_file((dir / name).string());
        write_json(dir / "manifest.json", manifest);
        nlohmann::json info;
        info["written_unix_time"] = static_cast<std::int64_t>(std::time(nullptr));
        write_json(dir / "run_info.json", info);
    }
};

nlohmann::json comparison_report(const ExperimentConfig& cfg, const Phase2Result& built,
                                 double score_hetero, double score_homo,
                                 const std::vector<Phase3Metrics>& hetero,
                                 const std::vector<Phase3Metrics>& homo) {
    nlohmann::json report;
    report["n"] = cfg.n;
    report["partition_flavor"] = to_string(cfg.partition.flavor);
    report["partitions"] = cfg.partitions;
    report["participants_hetero"] = built.hetero.plan.participants.size();
    report["participants_homo"] = built.homo.plan.participants.size();
    report["objective_hetero"] = score_hetero;
    report["objective_homo"] = score_homo;
    auto rounds = nlohmann::json::array();
    for (std::size_t i = 0; i < hetero.size() && i < homo.size(); ++i) {
        rounds.push_back({{"round", hetero[i].round},
                          {"hetero_accuracy", hetero[i].mean_accuracy},
                          {"homo_accuracy", homo[i].mean_accuracy},
                          {"delta", hetero[i].mean_accuracy - homo[i].mean_accuracy}});
    }
    report["rounds"] = std::move(rounds);
    if (!hetero.empty() && !homo.empty())
        report["final_delta"] = hetero.back().mean_accuracy - homo.back().mean_accuracy;
    return report;
}

int run_experiment(const ExperimentConfig& cfg, ArtifactDir& art) {
    PipelineInputs inputs = prepare_inputs(cfg);
    MorphResult morph = phase1_morph(cfg, inputs);
    morph.matrix.dump(art.path("matrix.bin").string());
    write_json(art.path("morph_stats.json"), stats_to_json(morph.rounds));

    Phase2Result built = phase2_build(cfg, morph.matrix);
    write_json(art.path("plan_hetero.json"),
               built.hetero.plan.to_json(built.assignment.k, built.assignment.labels));
    write_json(art.path("plan_homo.json"),
               built.homo.plan.to_json(built.assignment.k, built.assignment.labels));
    write_json(art.path("topology_hetero.json"),
               built.hetero.topology.to_json(&built.hetero.plan.cliques));
    write_json(art.path("topology_homo.json"),
               built.homo.topology.to_json(&built.homo.plan.cliques));

    const double score_hetero = objective_score(built.hetero.plan, built.hetero.topology, morph.matrix);
    const double score_homo = objective_score(built.homo.plan, built.homo.topology, morph.matrix);

    const auto metrics_hetero = phase3_train(cfg, inputs, built.hetero);
    const auto metrics_homo = phase3_train(cfg, inputs, built.homo);
    write_metrics_csv(art.path("metrics_hetero.csv").string(), metrics_hetero);
    write_metrics_csv(art.path("metrics_homo.csv").string(), metrics_homo);

    write_json(art.path("report.json"),
               comparison_report(cfg, built, score_hetero, score_homo, metrics_hetero, metrics_homo));
    return 0;
}

int run_morph_mode(const ExperimentConfig& cfg, ArtifactDir& art) {
    PipelineInputs inputs = prepare_inputs(cfg);
    MorphResult morph = phase1_morph(cfg, inputs);
    morph.matrix.dump(art.path("matrix.bin").string());
    write_json(art.path("morph_stats.json"), stats_to_json(morph.rounds));
    return 0;
}

int run_build_mode(const ExperimentConfig& cfg, ArtifactDir& art) {
    const fs::path matrix_path = art.dir / "matrix.bin";
    if (!fs::exists(matrix_path))
        throw std::runtime_error("staged input missing: " + matrix_path.string() +
                                 " (run morph mode into the same --out first)");
    const SimilarityMatrix matrix = SimilarityMatrix::load(matrix_path.string());
    Phase2Result built = phase2_build(cfg, matrix);
    write_json(art.path("plan_hetero.json"),
               built.hetero.plan.to_json(built.assignment.k, built.assignment.labels));
    write_json(art.path("plan_homo.json"),
               built.homo.plan.to_json(built.assignment.k, built.assignment.labels));
    write_json(art.path("topology_hetero.json"),
               built.hetero.topology.to_json(&built.hetero.plan.cliques));
    write_json(art.path("topology_homo.json"),
               built.homo.topology.to_json(&built.homo.plan.cliques));
    return 0;
}

int run_train_mode(const ExperimentConfig& cfg, ArtifactDir& art) {
    PipelineInputs inputs = prepare_inputs(cfg);
    for (const char* arm : {"hetero", "homo"}) {
        SelectionResult sel;
        std::vector<Clique> cliques;
        sel.topology = Topology::from_json(
            load_staged_json(art.dir / (std::string("topology_") + arm + ".json")), &cliques);
        sel.plan = CliquePlan::from_json(
            load_staged_json(art.dir / (std::string("plan_") + arm + ".json")));
        const auto metrics = phase3_train(cfg, inputs, sel);
        write_metrics_csv(art.path(std::string("metrics_") + arm + ".csv").string(), metrics);
    }
    return 0;
}

int run_accounting_mode(const ExperimentConfig& cfg, ArtifactDir& art) {
    std::uint64_t proxy_bytes = cfg.accounting.proxy_bytes;
    if (proxy_bytes == 0)
        proxy_bytes = proxy_wire_bytes(cfg.dataset.global_samples, cfg.dataset.classes);
    const AccountingResult res =
        accounting_run(cfg.n, cfg.effective_degree(), proxy_bytes, cfg.accounting.tuple_bytes,
                       RunSeeds::from_master(cfg.seed).morph, cfg.morph.max_rounds);
    write_accounting_csv(art.path("accounting.csv").string(), res.per_round);
    nlohmann::json summary;
    summary["n"] = cfg.n;
    summary["degree"] = cfg.effective_degree();
    summary["rounds"] = res.rounds;
    summary["expected_rounds"] = expected_rounds(cfg.n);
    summary["proxy_downloads"] = res.totals.proxy_downloads;
    summary["proxy_bytes"] = res.totals.proxy_bytes;
    summary["broadcast_tuples"] = res.totals.broadcast_tuples;
    summary["broadcast_bytes"] = res.totals.broadcast_bytes;
    write_json(art.path("accounting_summary.json"), summary);
    return 0;
}

}  // namespace

int run_pipeline(const ExperimentConfig& cfg) {
    ArtifactDir art(cfg.out);
    write_json(art.path("config.json"), cfg.to_json());
    int status = 1;
    switch (cfg.mode) {
        case RunMode::experiment: status = run_experiment(cfg, art); break;
        case RunMode::morph: status = run_morph_mode(cfg, art); break;
        case RunMode::build: status = run_build_mode(cfg, art); break;
        case RunMode::train: status = run_train_mode(cfg, art); break;
        case RunMode::accounting: status = run_accounting_mode(cfg, art); break;
    }
    art.finish();
    return status;
}

}  // namespace topomorph
