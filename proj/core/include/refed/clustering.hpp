#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "refed/rng.hpp"
#include "refed/semantic.hpp"

namespace refed {

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> labels;
    double inertia = 0.0;
};

/// Lloyd's algorithm with greedy farthest-point seeding. Runs to an
/// assignment fixpoint or max_iters; an emptied cluster is re-seeded at the
/// point farthest from its centroid assignment.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    Rng rng, std::size_t max_iters = 300);

/// Best-of-n restarts (lowest inertia); each restart re-seeds from a forked
/// stream. Deterministic for a given rng.
KMeansResult kmeans_restarts(const std::vector<std::vector<double>>& points, std::size_t k,
                             Rng rng, std::size_t restarts = 8);

/// Mean silhouette score of a labeled clustering (requires >= 2 clusters).
double mean_silhouette(const std::vector<std::vector<double>>& points,
                       const std::vector<std::size_t>& labels, std::size_t k);

struct SelectKOptions {
    std::size_t k_max = 100;
    /// Below this best silhouette the population is treated as structureless
    /// and k = 1 is returned.
    double no_structure_threshold = 0.1;
};

/// Silhouette-maximizing k over [2, min(k_max, n-1)]; k = 1 for fewer than two
/// points or when no k beats the threshold.
std::size_t select_k(const std::vector<std::vector<double>>& embeddings,
                     const SelectKOptions& opts, Rng rng);

/// Current clustering state: centroids in client-embedding space, client
/// assignments and the stored last shared model per client.
class ClusterRegistry {
public:
    std::size_t k() const { return centroids_.empty() ? 1 : centroids_.size(); }
    bool initialized() const { return !centroids_.empty(); }
    const std::vector<std::vector<double>>& centroids() const { return centroids_; }
    std::int64_t epoch_of_last_recompute() const { return last_recompute_epoch_; }

    /// Nearest-centroid assignment; ties go to the lowest cluster id.
    std::size_t assign(const std::vector<double>& e_u) const;

    void set_assignment(std::int64_t client_id, std::size_t cluster_id);
    std::size_t assignment(std::int64_t client_id) const;
    bool has_assignment(std::int64_t client_id) const;

    /// Most recent shared model per client; re-submission replaces.
    void store_model(std::int64_t client_id, std::vector<double> m_u);
    const std::map<std::int64_t, std::vector<double>>& stored_models() const { return models_; }

    /// Members of a cluster other than `exclude`, in client-id order.
    std::vector<const std::vector<double>*> cluster_members(std::size_t cluster_id,
                                                            std::int64_t exclude) const;

    /// Initial clustering from scratch at the first global epoch.
    void bootstrap(const std::vector<std::int64_t>& client_ids,
                   const std::vector<std::vector<double>>& embeddings,
                   const SelectKOptions& opts, Rng rng, std::int64_t epoch);

    /// Re-runs select_k + k-means over stored models (embedded through
    /// `sampler`) and atomically replaces centroids and assignments. A no-op
    /// unless at least `min_gap` epochs have passed since the last recompute.
    bool recompute(const SemanticSampler& sampler, const SelectKOptions& opts, Rng rng,
                   std::int64_t epoch, std::int64_t min_gap = 2);

    std::string snapshot_json() const;

private:
    std::vector<std::vector<double>> centroids_;
    std::map<std::int64_t, std::size_t> assignments_;
    std::map<std::int64_t, std::vector<double>> models_;
    std::int64_t last_recompute_epoch_ = -1;
};

double euclidean(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace refed
