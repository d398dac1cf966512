#include "refed/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace refed {

std::size_t rank_of(const std::vector<double>& scores, std::int64_t target) {
    if (target < 0 || static_cast<std::size_t>(target) >= scores.size())
        throw std::invalid_argument("rank_of: target outside catalog");
    double ts = scores[static_cast<std::size_t>(target)];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (static_cast<std::int64_t>(i) == target) continue;
        if (scores[i] > ts || (scores[i] == ts && static_cast<std::int64_t>(i) < target)) ++rank;
    }
    return rank;
}

int hr_at_k(std::size_t rank, std::size_t k) {
    if (rank < 1) throw std::invalid_argument("hr_at_k: rank is 1-based");
    return rank <= k ? 1 : 0;
}

double ndcg_at_k(std::size_t rank, std::size_t k) {
    if (rank < 1) throw std::invalid_argument("ndcg_at_k: rank is 1-based");
    // single relevant item with gain 1: DCG = 1/log2(rank+1), IDCG = 1
    if (rank > k) return 0.0;
    return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

EvalSummary evaluate(const std::vector<RankResult>& ranks, std::size_t k) {
    EvalSummary s;
    for (const auto& r : ranks) {
        if (r.rank == 0) {
            ++s.skipped;
            continue;
        }
        s.mean_hr += hr_at_k(r.rank, k);
        s.mean_ndcg += ndcg_at_k(r.rank, k);
        ++s.evaluated;
    }
    if (s.evaluated > 0) {
        s.mean_hr /= static_cast<double>(s.evaluated);
        s.mean_ndcg /= static_cast<double>(s.evaluated);
    }
    return s;
}

}  // namespace refed
