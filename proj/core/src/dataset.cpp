#include "refed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace refed {

ItemFeatureProvider::ItemFeatureProvider(std::size_t n_items, std::size_t dim, std::uint64_t seed,
                                         std::size_t n_clusters, double spread) {
    if (n_clusters > n_items)
        throw std::invalid_argument("ItemFeatureProvider: more feature clusters than items");
    if (spread <= 0.0) throw std::invalid_argument("ItemFeatureProvider: spread must be positive");
    n_items_ = n_items;
    dim_ = dim;
    Rng master(seed);

    auto normalize = [](std::vector<double>& f) {
        double norm2 = 0.0;
        for (double v : f) norm2 += v * v;
        double norm = std::sqrt(norm2);
        if (norm < 1e-12) { f[0] = 1.0; norm = 1.0; }
        for (auto& v : f) v /= norm;
    };

    std::vector<std::vector<double>> protos(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        Rng r = master.fork(1000000 + c);
        protos[c].resize(dim);
        for (auto& v : protos[c]) v = r.gaussian(0.0, 1.0);
        normalize(protos[c]);
    }

    table_.resize(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        Rng r = master.fork(i);
        auto& f = table_[i];
        f.resize(dim);
        for (auto& v : f) v = r.gaussian(0.0, 1.0);
        if (n_clusters > 0) {
            const auto& p = protos[i * n_clusters / n_items];
            for (std::size_t j = 0; j < dim; ++j) f[j] = p[j] + spread * f[j];
        }
        normalize(f);
    }
}

const std::vector<double>& ItemFeatureProvider::features(std::int64_t item_id) const {
    if (item_id < 0 || static_cast<std::size_t>(item_id) >= n_items_)
        throw std::invalid_argument("ItemFeatureProvider: item " + std::to_string(item_id) +
                                    " outside catalog of " + std::to_string(n_items_));
    return table_[static_cast<std::size_t>(item_id)];
}

std::int64_t ItemFeatureProvider::nearest_item(const std::vector<double>& feat) const {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_id = 0;
    for (std::size_t i = 0; i < n_items_; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            double diff = table_[i][j] - feat[j];
            d += diff * diff;
        }
        if (d < best) { best = d; best_id = static_cast<std::int64_t>(i); }
    }
    return best_id;
}

Tensor ItemFeatureProvider::stack(const std::vector<std::int64_t>& items) const {
    Tensor x({items.size(), dim_});
    for (std::size_t t = 0; t < items.size(); ++t) {
        const auto& f = features(items[t]);
        for (std::size_t j = 0; j < dim_; ++j) x.at(t, j) = f[j];
    }
    return x;
}

Dataset synthesize(const SyntheticSpec& spec) {
    if (spec.n_groups < 1) throw std::invalid_argument("synthesize: n_groups must be >= 1");
    if (spec.n_groups > spec.n_users)
        throw std::invalid_argument("synthesize: n_groups " + std::to_string(spec.n_groups) +
                                    " > n_users " + std::to_string(spec.n_users));
    if (spec.n_groups * spec.items_per_group > spec.n_items)
        throw std::invalid_argument("synthesize: groups do not fit into the item catalog");
    Rng master(spec.seed);
    Dataset ds;
    ds.n_items = spec.n_items;
    for (std::size_t u = 0; u < spec.n_users; ++u) {
        UserStream s;
        s.user_id = static_cast<std::int64_t>(u);
        int g = static_cast<int>(u % spec.n_groups);
        s.hidden_group = g;
        Rng r = master.fork(1000 + u);
        std::int64_t lo = static_cast<std::int64_t>(g) * spec.items_per_group;
        for (std::size_t t = 0; t < spec.seq_len; ++t) {
            std::int64_t item;
            if (!s.items.empty() && r.uniform(0.0, 1.0) < spec.repeat_prob) {
                std::size_t back = std::min<std::size_t>(3, s.items.size());
                item = s.items[s.items.size() - 1 - r.index(back)];
            } else if (r.uniform(0.0, 1.0) < spec.in_group_prob) {
                item = lo + static_cast<std::int64_t>(r.index(spec.items_per_group));
            } else {
                item = static_cast<std::int64_t>(r.index(spec.n_items));
            }
            s.items.push_back(item);
        }
        ds.users.push_back(std::move(s));
    }
    return ds;
}

namespace {

bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stoll(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) out.push_back(field);
    return out;
}

}  // namespace

Dataset ingest(const std::string& path, std::size_t min_events) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("ingest: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    struct Row { std::int64_t item, ts; std::size_t order; };
    std::map<std::int64_t, std::vector<Row>> per_user;
    std::int64_t max_item = -1;
    char delim = '\t';
    bool first_content = true;
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first_content) {
            delim = line.find('\t') != std::string::npos ? '\t' : ',';
        }
        auto fields = split(line, delim);
        if (fields.size() < 3)
            throw std::runtime_error("ingest: line " + std::to_string(line_no) +
                                     ": expected at least 3 columns, got " + std::to_string(fields.size()));
        std::int64_t uid, item, ts;
        bool ok = parse_int(fields[0], uid) && parse_int(fields[1], item) && parse_int(fields[2], ts);
        if (!ok) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw std::runtime_error("ingest: line " + std::to_string(line_no) + ": malformed row");
        }
        first_content = false;
        if (uid < 0) throw std::runtime_error("ingest: line " + std::to_string(line_no) + ": negative user_id");
        auto& v = per_user[uid];
        v.push_back({item, ts, v.size()});
        max_item = std::max(max_item, item);
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("ingest: " + path + " contains no events");
    Dataset ds;
    ds.n_items = static_cast<std::size_t>(max_item + 1);
    for (auto& [uid, v] : per_user) {
        if (v.size() < min_events) {
            ++ds.dropped_users;
            continue;
        }
        std::stable_sort(v.begin(), v.end(), [](const Row& a, const Row& b) {
            return a.ts != b.ts ? a.ts < b.ts : a.order < b.order;
        });
        UserStream s;
        s.user_id = uid;
        for (const auto& r : v) s.items.push_back(r.item);
        ds.users.push_back(std::move(s));
    }
    if (ds.users.empty()) throw std::runtime_error("ingest: every user was shorter than the minimum of " +
                                                   std::to_string(min_events) + " events");
    return ds;
}

void write_tsv(const Dataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_tsv: cannot open " + path);
    f << "user_id\titem_id\ttimestamp\n";
    for (const auto& u : ds.users)
        for (std::size_t t = 0; t < u.items.size(); ++t)
            f << u.user_id << '\t' << u.items[t] << '\t' << t << '\n';
}

LeaveOneOutSplit leave_one_out_split(const UserStream& stream, std::size_t w) {
    if (stream.items.size() < w + 2)
        throw std::invalid_argument("leave_one_out_split: stream of " + std::to_string(stream.items.size()) +
                                    " events is shorter than w+2 = " + std::to_string(w + 2));
    LeaveOneOutSplit out;
    std::size_t n = stream.items.size();
    out.train.assign(stream.items.begin(), stream.items.end() - 1);
    out.test_window.assign(stream.items.end() - 1 - static_cast<std::ptrdiff_t>(w), stream.items.end() - 1);
    out.test_target = stream.items.back();
    return out;
}

}  // namespace refed
