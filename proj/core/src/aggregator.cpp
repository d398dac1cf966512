#include "refed/aggregator.hpp"

#include <stdexcept>

namespace refed {

AggregatePayload Aggregator::aggregate(std::int64_t client_id, const std::vector<double>& m_u,
                                       std::size_t cluster_id, ClusterRegistry& registry,
                                       std::int64_t epoch) {
    if (cluster_id >= registry.k())
        throw std::invalid_argument("Aggregator: cluster id " + std::to_string(cluster_id) +
                                    " out of range for k=" + std::to_string(registry.k()));
    auto members = registry.cluster_members(cluster_id, client_id);
    AggregatePayload out;
    out.cluster_id = cluster_id;
    out.epoch = epoch;
    out.member_count = members.size() + 1;
    out.m_agg.assign(m_u.begin(), m_u.end());
    for (const auto* m : members) {
        if (m->size() != m_u.size())
            throw std::invalid_argument("Aggregator: stored model length " + std::to_string(m->size()) +
                                        " != incoming " + std::to_string(m_u.size()));
        for (std::size_t i = 0; i < m_u.size(); ++i) out.m_agg[i] += (*m)[i];
    }
    double inv = 1.0 / static_cast<double>(out.member_count);
    for (auto& v : out.m_agg) v *= inv;
    registry.store_model(client_id, m_u);
    latest_[cluster_id] = out;
    return out;
}

const AggregatePayload& Aggregator::fetch_global(std::size_t cluster_id) const {
    auto it = latest_.find(cluster_id);
    if (it == latest_.end())
        throw std::invalid_argument("Aggregator: cluster " + std::to_string(cluster_id) +
                                    " has never aggregated");
    return it->second;
}

}  // namespace refed
