#include "refed/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace refed {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids,
                             const std::vector<double>& p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = euclidean(centroids[c], p);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    Rng rng, std::size_t max_iters) {
    std::size_t n = points.size();
    if (k == 0 || k > n)
        throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " outside [1," + std::to_string(n) + "]");
    std::size_t dim = points[0].size();

    // greedy farthest-point seeding from a seeded random start
    std::vector<std::size_t> seeds;
    seeds.push_back(rng.index(n));
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    while (seeds.size() < k) {
        for (std::size_t i = 0; i < n; ++i)
            dist[i] = std::min(dist[i], euclidean(points[i], points[seeds.back()]));
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (dist[i] > dist[far]) far = i;
        seeds.push_back(far);
    }

    KMeansResult r;
    r.centroids.reserve(k);
    for (auto s : seeds) r.centroids.push_back(points[s]);
    r.labels.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t c = nearest_centroid(r.centroids, points[i]);
            if (c != r.labels[i]) {
                r.labels[i] = c;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) sums[r.labels[i]][d] += points[i][d];
            ++counts[r.labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed an emptied cluster at the farthest point
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = euclidean(points[i], r.centroids[r.labels[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                r.centroids[c] = points[far];
                r.labels[far] = c;
                changed = true;
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / counts[c];
        }
        if (!changed && iter > 0) break;
    }
    r.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = euclidean(points[i], r.centroids[r.labels[i]]);
        r.inertia += d * d;
    }
    return r;
}

KMeansResult kmeans_restarts(const std::vector<std::vector<double>>& points, std::size_t k,
                             Rng rng, std::size_t restarts) {
    KMeansResult best;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        KMeansResult cand = kmeans(points, k, rng.fork(r));
        if (!have || cand.inertia < best.inertia) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

double mean_silhouette(const std::vector<std::vector<double>>& points,
                       const std::vector<std::size_t>& labels, std::size_t k) {
    std::size_t n = points.size();
    if (k < 2) throw std::invalid_argument("mean_silhouette: needs k >= 2");
    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels) ++counts[l];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum_to(k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_to[labels[j]] += euclidean(points[i], points[j]);
        }
        std::size_t own = labels[i];
        double a = counts[own] > 1 ? sum_to[own] / static_cast<double>(counts[own] - 1) : 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, sum_to[c] / static_cast<double>(counts[c]));
        }
        double s;
        if (counts[own] <= 1)
            s = 0.0;  // singleton convention
        else
            s = (b - a) / std::max(a, b);
        if (std::isnan(s)) s = 0.0;  // identical points: a == b == 0
        total += s;
    }
    return total / static_cast<double>(n);
}

std::size_t select_k(const std::vector<std::vector<double>>& embeddings,
                     const SelectKOptions& opts, Rng rng) {
    std::size_t n = embeddings.size();
    if (n < 2) return 1;
    std::size_t hi = std::min(opts.k_max, n - 1);
    if (hi < 2) return 1;
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 1;
    for (std::size_t k = 2; k <= hi; ++k) {
        KMeansResult r = kmeans_restarts(embeddings, k, rng.fork(k));
        double s = mean_silhouette(embeddings, r.labels, k);
        if (s > best_score) {
            best_score = s;
            best_k = k;
        }
    }
    if (best_score < opts.no_structure_threshold) return 1;
    return best_k;
}

std::size_t ClusterRegistry::assign(const std::vector<double>& e_u) const {
    if (centroids_.empty()) throw std::logic_error("ClusterRegistry::assign: registry is empty");
    return nearest_centroid(centroids_, e_u);
}

void ClusterRegistry::set_assignment(std::int64_t client_id, std::size_t cluster_id) {
    if (cluster_id >= k()) throw std::invalid_argument("ClusterRegistry: cluster id out of range");
    assignments_[client_id] = cluster_id;
}

std::size_t ClusterRegistry::assignment(std::int64_t client_id) const {
    auto it = assignments_.find(client_id);
    if (it == assignments_.end())
        throw std::invalid_argument("ClusterRegistry: client " + std::to_string(client_id) + " unassigned");
    return it->second;
}

bool ClusterRegistry::has_assignment(std::int64_t client_id) const {
    return assignments_.count(client_id) > 0;
}

void ClusterRegistry::store_model(std::int64_t client_id, std::vector<double> m_u) {
    models_[client_id] = std::move(m_u);
}

std::vector<const std::vector<double>*> ClusterRegistry::cluster_members(std::size_t cluster_id,
                                                                         std::int64_t exclude) const {
    std::vector<const std::vector<double>*> out;
    for (const auto& [cid, m] : models_) {
        if (cid == exclude) continue;
        auto it = assignments_.find(cid);
        if (it != assignments_.end() && it->second == cluster_id) out.push_back(&m);
    }
    return out;
}

void ClusterRegistry::bootstrap(const std::vector<std::int64_t>& client_ids,
                                const std::vector<std::vector<double>>& embeddings,
                                const SelectKOptions& opts, Rng rng, std::int64_t epoch) {
    if (client_ids.size() != embeddings.size())
        throw std::invalid_argument("ClusterRegistry::bootstrap: id/embedding count mismatch");
    std::size_t k = select_k(embeddings, opts, rng.fork(0));
    KMeansResult r = kmeans_restarts(embeddings, k, rng.fork(1));
    centroids_ = r.centroids;
    assignments_.clear();
    for (std::size_t i = 0; i < client_ids.size(); ++i) assignments_[client_ids[i]] = r.labels[i];
    last_recompute_epoch_ = epoch;
}

bool ClusterRegistry::recompute(const SemanticSampler& sampler, const SelectKOptions& opts, Rng rng,
                                std::int64_t epoch, std::int64_t min_gap) {
    if (last_recompute_epoch_ >= 0 && epoch - last_recompute_epoch_ < min_gap) return false;
    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> embeddings;
    for (const auto& [cid, m] : models_) {
        ids.push_back(cid);
        embeddings.push_back(sampler.embed(m));
    }
    if (ids.empty()) return false;
    // build the replacement first, then swap; readers never see a mix
    std::size_t k = select_k(embeddings, opts, rng.fork(0));
    KMeansResult r = kmeans_restarts(embeddings, k, rng.fork(1));
    std::map<std::int64_t, std::size_t> new_assignments;
    for (std::size_t i = 0; i < ids.size(); ++i) new_assignments[ids[i]] = r.labels[i];
    centroids_ = std::move(r.centroids);
    assignments_ = std::move(new_assignments);
    last_recompute_epoch_ = epoch;
    return true;
}

std::string ClusterRegistry::snapshot_json() const {
    std::ostringstream os;
    os << "{\"k\":" << k() << ",\"centroids\":[";
    for (std::size_t c = 0; c < centroids_.size(); ++c) {
        os << (c ? "," : "") << "[";
        for (std::size_t d = 0; d < centroids_[c].size(); ++d)
            os << (d ? "," : "") << centroids_[c][d];
        os << "]";
    }
    os << "],\"assignment_counts\":[";
    std::vector<std::size_t> counts(k(), 0);
    for (const auto& [cid, c] : assignments_) ++counts[c];
    for (std::size_t c = 0; c < counts.size(); ++c) os << (c ? "," : "") << counts[c];
    os << "]}";
    return os.str();
}

}  // namespace refed
