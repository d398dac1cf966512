#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "refed/clustering.hpp"

namespace refed {

/// Cluster-wise mean of shared encoder parameters.
struct AggregatePayload {
    std::size_t cluster_id = 0;
    std::vector<double> m_agg;
    std::size_t member_count = 0;
    std::int64_t epoch = 0;
};

/// Averages the stored models of the incoming client's cluster together with
/// the incoming model, stores the incoming model (replacing any previous copy
/// from the same client) and keeps the latest payload per cluster.
class Aggregator {
public:
    AggregatePayload aggregate(std::int64_t client_id, const std::vector<double>& m_u,
                               std::size_t cluster_id, ClusterRegistry& registry,
                               std::int64_t epoch);

    /// Latest payload for a cluster; throws if it has never aggregated.
    const AggregatePayload& fetch_global(std::size_t cluster_id) const;

private:
    std::map<std::size_t, AggregatePayload> latest_;
};

}  // namespace refed
