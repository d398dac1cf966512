#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "refed/aggregator.hpp"
#include "refed/clustering.hpp"
#include "refed/dataset.hpp"
#include "refed/embedding.hpp"
#include "refed/metrics.hpp"
#include "refed/paillier.hpp"
#include "refed/privacy.hpp"
#include "refed/recommender.hpp"
#include "refed/semantic.hpp"

namespace refed {

enum class FederationMode { kRefrs, kFedavgSingle, kLocalOnly };
enum class PrivacyMode { kNone, kDp, kHe };

FederationMode parse_mode(const std::string& s);
PrivacyMode parse_privacy(const std::string& s);

struct FederationConfig {
    FederationMode mode = FederationMode::kRefrs;
    PrivacyMode privacy = PrivacyMode::kNone;
    std::size_t global_epochs = 5;
    std::size_t client_epochs = 50;   // total local epochs per round
    std::size_t beta_send = 10;       // embedding epochs before sending
    double lr = 0.01;
    std::size_t recompute_interval = 2;
    std::uint64_t seed = 1;
    std::size_t initial_pool_size = 16;

    std::size_t w = 16;
    std::size_t session_size = 100;
    std::size_t feat_dim = 16;
    // 0 = independent item features; > 0 = genre-like prototype blocks
    std::size_t feature_clusters = 0;
    double feature_spread = 0.3;
    std::size_t latent_dim = 16;
    std::size_t codebook_size = 64;
    std::size_t heads = 4;
    bool use_attention = true;
    RecommenderBackend backend = RecommenderBackend::kGru;
    double beta_vq = 0.25;

    std::size_t sampler_epochs = 80;
    double sampler_lr = 2e-3;
    bool sampler_finetune = true;  // refresh fine-tunes instead of retraining
    std::size_t sampler_refresh_epochs = 20;

    DpConfig dp;
    std::size_t eval_k = 10;
    std::size_t k_max = 100;

    void validate() const;
    static FederationConfig from_config(const class Config& cfg);
};

struct RoundRecord {
    std::int64_t epoch = 0;
    std::optional<std::size_t> k;  // absent in local-only mode
    std::vector<std::size_t> cluster_member_counts;
    double mean_hr = 0.0;
    double mean_ndcg = 0.0;
    double t_client_train_ms = 0.0;
    double t_server_embed_ms = 0.0;
    double t_cluster_ms = 0.0;
    double t_aggregate_ms = 0.0;
    double t_epoch_ms = 0.0;
    bool recompute_ran = false;
    std::size_t distinct_payload_clusters = 0;

    std::string to_json() const;  // one JSONL line
};

struct FederationResult {
    std::vector<RoundRecord> records;
    std::vector<RankResult> final_ranks;
    EvalSummary final_eval;
    std::size_t server_calls = 0;
    std::size_t server_decrypt_calls = 0;  // must be 0 in HE mode
};

/// Deterministic event-ordered simulation of global epochs: local training,
/// payload exchange, clustering, cluster-wise aggregation and scheduled
/// recomputation. No OS threads; identical seeds give identical records.
class FederationSim {
public:
    FederationSim(const FederationConfig& cfg, const Dataset& dataset);
    ~FederationSim();

    FederationResult run();

    /// Mid-simulation arrival: trains the new client once, assigns it by
    /// nearest centroid without triggering a recompute. Returns the cluster
    /// id, or nullopt if the registry is not yet initialized (the client is
    /// queued into the initial pool).
    std::optional<std::size_t> simulate_client_arrival(const UserStream& stream);

    const ClusterRegistry& registry() const;
    std::size_t client_count() const;

    /// Final shared-encoder aggregate per cluster (plaintext view; in HE mode
    /// this is what a key-holding client decrypts). Used by equivalence tests.
    std::vector<std::vector<double>> final_cluster_aggregates() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace refed
