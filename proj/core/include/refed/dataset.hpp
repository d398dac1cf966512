#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refed/rng.hpp"
#include "refed/tensor.hpp"

namespace refed {

struct InteractionEvent {
    std::int64_t user_id;
    std::int64_t item_id;
    std::int64_t timestamp;
};

/// One user's temporally ordered item stream.
struct UserStream {
    std::int64_t user_id = 0;
    std::vector<std::int64_t> items;
    /// Synthetic ground-truth group, kept for oracle evaluation only.
    std::optional<int> hidden_group;
};

struct Dataset {
    std::vector<UserStream> users;
    std::size_t n_items = 0;
    std::size_t dropped_users = 0;
};

/// Server-owned deterministic item features: unit-norm pseudo-random vectors
/// keyed by (item_id, seed), identical across clients. With n_clusters > 0 the
/// catalog is split into contiguous id blocks that share a prototype vector
/// (genre-like structure): features(i) = normalize(prototype + spread * noise).
class ItemFeatureProvider {
public:
    ItemFeatureProvider(std::size_t n_items, std::size_t dim, std::uint64_t seed,
                        std::size_t n_clusters = 0, double spread = 0.3);

    const std::vector<double>& features(std::int64_t item_id) const;
    std::size_t dim() const { return dim_; }
    std::size_t n_items() const { return n_items_; }

    /// Nearest-feature inverse lookup over the catalog.
    std::int64_t nearest_item(const std::vector<double>& feat) const;

    /// Stacks features of `items` into a (|items|, dim) tensor.
    Tensor stack(const std::vector<std::int64_t>& items) const;

private:
    std::size_t n_items_, dim_;
    std::vector<std::vector<double>> table_;
};

struct SyntheticSpec {
    std::size_t n_users = 40;
    std::size_t n_items = 48;
    std::size_t n_groups = 4;
    std::size_t items_per_group = 12;
    double in_group_prob = 0.9;    // >= 0.8 per contract
    double repeat_prob = 0.25;     // Markov-style short-range repeats
    std::size_t seq_len = 120;
    std::uint64_t seed = 1;
};

/// Generates non-i.i.d. clients with known hidden group labels.
Dataset synthesize(const SyntheticSpec& spec);

/// Reads a TSV/CSV of (user_id, item_id, timestamp[, rating]); delimiter and
/// optional header are auto-detected. Users with fewer than `min_events`
/// events are dropped and counted.
Dataset ingest(const std::string& path, std::size_t min_events);

/// Writes a dataset back out as TSV (used by the synth subcommand).
void write_tsv(const Dataset& ds, const std::string& path);

struct LeaveOneOutSplit {
    std::vector<std::int64_t> train;        // all events except the last
    std::vector<std::int64_t> test_window;  // w items preceding the target
    std::int64_t test_target;
};

LeaveOneOutSplit leave_one_out_split(const UserStream& stream, std::size_t w);

}  // namespace refed
