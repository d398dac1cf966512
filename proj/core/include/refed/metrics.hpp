#pragma once

#include <cstdint>
#include <vector>

namespace refed {

struct RankResult {
    std::int64_t client_id = 0;
    std::size_t rank = 0;  // 1-based position of the ground-truth item
};

/// 1-based rank of `target` in the full ranked list (score descending, item id
/// ascending on ties).
std::size_t rank_of(const std::vector<double>& scores, std::int64_t target);

int hr_at_k(std::size_t rank, std::size_t k = 10);
double ndcg_at_k(std::size_t rank, std::size_t k = 10);

struct EvalSummary {
    double mean_hr = 0.0;
    double mean_ndcg = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;  // clients without test data
};

EvalSummary evaluate(const std::vector<RankResult>& ranks, std::size_t k = 10);

}  // namespace refed
