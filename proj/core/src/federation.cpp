#include "refed/federation.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "json.hpp"

#include "refed/config.hpp"
#include "refed/sampler.hpp"

namespace refed {

namespace {

// fixed fork salts; the salt space is part of the determinism contract
constexpr std::uint64_t kSaltInit = 1;
constexpr std::uint64_t kSaltFeatures = 2;
constexpr std::uint64_t kSaltSampler = 3;
constexpr std::uint64_t kSaltCluster = 4;
constexpr std::uint64_t kSaltKeys = 5;
constexpr std::uint64_t kSaltRecInit = 6;
constexpr std::uint64_t kSaltClientBase = 1000;
constexpr std::uint64_t kSaltEncryptBase = 500000;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FederationMode parse_mode(const std::string& s) {
    if (s == "refrs") return FederationMode::kRefrs;
    if (s == "fedavg_single") return FederationMode::kFedavgSingle;
    if (s == "local_only") return FederationMode::kLocalOnly;
    throw std::invalid_argument("unknown federation mode: " + s);
}

PrivacyMode parse_privacy(const std::string& s) {
    if (s == "none") return PrivacyMode::kNone;
    if (s == "dp") return PrivacyMode::kDp;
    if (s == "he") return PrivacyMode::kHe;
    throw std::invalid_argument("unknown privacy mode: " + s);
}

void FederationConfig::validate() const {
    if (global_epochs == 0) throw std::invalid_argument("config: global_epochs must be >= 1");
    if (beta_send == 0 || beta_send > client_epochs)
        throw std::invalid_argument("config: beta_send must be in [1, client_epochs]");
    if (recompute_interval == 0)
        throw std::invalid_argument("config: recompute_interval must be >= 1");
    if (w == 0 || session_size < w + 1)
        throw std::invalid_argument("config: session_size must be >= w + 1");
    if (latent_dim == 0 || feat_dim == 0)
        throw std::invalid_argument("config: dimensions must be positive");
    if (eval_k == 0) throw std::invalid_argument("config: eval_k must be >= 1");
    if (feature_spread <= 0.0)
        throw std::invalid_argument("config: feature_spread must be positive");
}

FederationConfig FederationConfig::from_config(const Config& cfg) {
    FederationConfig f;
    f.mode = parse_mode(cfg.get_str("mode", "refrs"));
    f.privacy = parse_privacy(cfg.get_str("privacy", "none"));
    f.global_epochs = static_cast<std::size_t>(cfg.get_int("global_epochs", 5));
    f.client_epochs = static_cast<std::size_t>(cfg.get_int("client_epochs", 50));
    f.beta_send = static_cast<std::size_t>(cfg.get_int("beta_send", 10));
    f.lr = cfg.get_double("lr", 0.01);
    f.recompute_interval = static_cast<std::size_t>(cfg.get_int("recompute_interval", 2));
    f.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    f.initial_pool_size = static_cast<std::size_t>(cfg.get_int("initial_pool_size", 16));
    f.w = static_cast<std::size_t>(cfg.get_int("w", 16));
    f.session_size = static_cast<std::size_t>(cfg.get_int("session_size", 100));
    f.feat_dim = static_cast<std::size_t>(cfg.get_int("feat_dim", 16));
    f.feature_clusters = static_cast<std::size_t>(cfg.get_int("feature_clusters", 0));
    f.feature_spread = cfg.get_double("feature_spread", 0.3);
    f.latent_dim = static_cast<std::size_t>(cfg.get_int("latent_dim", 16));
    f.codebook_size = static_cast<std::size_t>(cfg.get_int("codebook_size", 64));
    f.heads = static_cast<std::size_t>(cfg.get_int("heads", 4));
    f.use_attention = cfg.get_bool("use_attention", true);
    f.backend = cfg.get_str("backend", "gru") == "attention" ? RecommenderBackend::kAttention
                                                             : RecommenderBackend::kGru;
    f.beta_vq = cfg.get_double("beta_vq", 0.25);
    f.sampler_epochs = static_cast<std::size_t>(cfg.get_int("sampler_epochs", 80));
    f.sampler_lr = cfg.get_double("sampler_lr", 2e-3);
    f.sampler_finetune = cfg.get_bool("sampler_finetune", true);
    f.sampler_refresh_epochs = static_cast<std::size_t>(cfg.get_int("sampler_refresh_epochs", 20));
    f.dp.clip_norm = cfg.get_double("dp_clip", 1.0);
    f.dp.noise_multiplier = cfg.get_double("dp_sigma", 0.3);
    f.eval_k = static_cast<std::size_t>(cfg.get_int("eval_k", 10));
    f.k_max = static_cast<std::size_t>(cfg.get_int("k_max", 100));
    return f;
}

std::string RoundRecord::to_json() const {
    nlohmann::json j;
    j["epoch"] = epoch;
    if (k) j["k"] = *k;
    j["cluster_member_counts"] = cluster_member_counts;
    j["hr"] = mean_hr;
    j["ndcg"] = mean_ndcg;
    j["t_client_train_ms"] = t_client_train_ms;
    j["t_server_embed_ms"] = t_server_embed_ms;
    j["t_cluster_ms"] = t_cluster_ms;
    j["t_aggregate_ms"] = t_aggregate_ms;
    j["t_epoch_ms"] = t_epoch_ms;
    j["recompute_ran"] = recompute_ran;
    j["distinct_payload_clusters"] = distinct_payload_clusters;
    return j.dump();
}

struct FederationSim::Impl {
    struct Client {
        std::int64_t id;
        std::vector<std::int64_t> train_stream;
        std::vector<std::int64_t> test_window;
        std::int64_t test_target;
        std::vector<Session> sessions;
        EmbeddingModel emb;
        Recommender rec;
        Rng train_rng;
        Rng enc_rng;

        Client(std::int64_t cid, LeaveOneOutSplit split, std::vector<Session> sess,
               const EmbeddingConfig& ecfg, const RecommenderConfig& rcfg,
               Rng emb_init, Rng rec_init, Rng trng, Rng erng)
            : id(cid),
              train_stream(std::move(split.train)),
              test_window(std::move(split.test_window)),
              test_target(split.test_target),
              sessions(std::move(sess)),
              emb(ecfg, emb_init),
              rec(rcfg, rec_init),
              train_rng(trng),
              enc_rng(erng) {}
    };

    FederationConfig cfg;
    Rng master;
    ItemFeatureProvider features;
    std::vector<Client> clients;

    ClusterRegistry registry;
    Aggregator aggregator;
    std::unique_ptr<SemanticSampler> sampler;
    Rng sampler_rng;
    Rng cluster_rng;
    SelectKOptions k_opts;

    // HE state: the server stores ciphertext payloads and plaintext low-dim
    // embeddings only; the flat parameters never appear server-side.
    std::unique_ptr<KeyAuthority> authority;
    std::map<std::int64_t, CipherVector> stored_ciphers;
    std::map<std::int64_t, std::vector<double>> latest_e;

    std::size_t server_calls = 0;
    std::size_t server_decrypt_calls = 0;
    std::size_t skipped_users = 0;
    std::int64_t next_arrival_id = 0;
    bool ran = false;

    Impl(const FederationConfig& c, const Dataset& ds)
        : cfg(c),
          master(c.seed),
          features(ds.n_items, c.feat_dim, master.fork(kSaltFeatures).next_u64(),
                   c.feature_clusters, c.feature_spread),
          sampler_rng(master.fork(kSaltSampler)),
          cluster_rng(master.fork(kSaltCluster)) {
        cfg.validate();
        k_opts.k_max = cfg.k_max;

        EmbeddingConfig ecfg;
        ecfg.w = cfg.w;
        ecfg.feat_dim = cfg.feat_dim;
        ecfg.latent_dim = cfg.latent_dim;
        ecfg.codebook_size = cfg.codebook_size;
        ecfg.heads = cfg.heads;
        ecfg.beta_vq = cfg.beta_vq;
        ecfg.use_attention = cfg.use_attention;
        RecommenderConfig rcfg;
        rcfg.backend = cfg.backend;
        rcfg.latent_dim = cfg.latent_dim;
        rcfg.n_items = ds.n_items;
        rcfg.heads = cfg.heads;

        // identical initial weights for every client: parameter differences
        // after local training then reflect data, which is what clustering reads
        Rng emb_init = master.fork(kSaltInit);
        Rng rec_init = master.fork(kSaltRecInit);
        for (const auto& u : ds.users) {
            if (u.items.size() < cfg.w + 2) {
                ++skipped_users;
                continue;
            }
            LeaveOneOutSplit split = leave_one_out_split(u, cfg.w);
            auto sessions = make_sessions(split.train, cfg.session_size, cfg.w);
            clients.emplace_back(u.user_id, std::move(split), std::move(sessions), ecfg, rcfg,
                                 emb_init, rec_init,
                                 master.fork(kSaltClientBase + static_cast<std::uint64_t>(u.user_id)),
                                 master.fork(kSaltEncryptBase + static_cast<std::uint64_t>(u.user_id)));
            next_arrival_id = std::max(next_arrival_id, u.user_id + 1);
        }
        if (clients.empty())
            throw std::invalid_argument("federation: no client has at least w + 2 events");
        if (cfg.mode != FederationMode::kLocalOnly && clients.size() < 2)
            throw std::invalid_argument("federation: federated modes need at least 2 clients");

        if (cfg.privacy == PrivacyMode::kHe)
            authority = std::make_unique<KeyAuthority>(master.fork(kSaltKeys).next_u64());

        EmbeddingConfig probe_cfg = ecfg;
        EmbeddingModel probe(probe_cfg, emb_init);
        SemanticConfig scfg;
        scfg.input_dim = probe.shared_payload().total_size();
        scfg.latent_dim = cfg.latent_dim;
        sampler = std::make_unique<SemanticSampler>(scfg, master.fork(kSaltSampler + 100));
    }

    void local_train(Client& c, std::size_t epoch) {
        // sessions are consumed in order; once exhausted the cycle restarts
        std::size_t si = (epoch - 1) % c.sessions.size();
        auto windows = make_windows(c.train_stream, c.sessions[si], cfg.w, features);
        if (windows.empty()) return;
        const DpConfig* dp = cfg.privacy == PrivacyMode::kDp ? &cfg.dp : nullptr;
        c.emb.train({windows}, cfg.beta_send, cfg.lr, dp, dp ? &c.train_rng : nullptr);

        std::vector<RecPair> pairs;
        pairs.reserve(windows.size());
        for (const auto& wnd : windows) {
            QuantizeResult q = c.emb.embed_window(wnd);
            for (std::size_t t = 0; t < cfg.w; ++t) {
                std::vector<double> code(q.z.values.begin() + static_cast<std::ptrdiff_t>(t * cfg.latent_dim),
                                         q.z.values.begin() + static_cast<std::ptrdiff_t>((t + 1) * cfg.latent_dim));
                c.rec.set_item_code(wnd.window_items[t], code);
            }
            pairs.push_back(RecPair{q.z, wnd.target_item});
        }
        c.rec.train(pairs, cfg.client_epochs - cfg.beta_send, cfg.lr, c.train_rng);
    }

    void install_flat(Client& c, const std::vector<double>& flat) {
        ParameterSet ps = c.emb.shared_payload();
        ps.unflatten(flat);
        c.emb.install_shared(ps);
    }

    // one submit/assign/aggregate/return exchange; returns the cluster id
    std::size_t serve_client(Client& c, std::int64_t epoch, RoundRecord* rec) {
        ++server_calls;
        std::vector<double> m_u = c.emb.shared_payload().flatten();
        if (cfg.privacy == PrivacyMode::kHe) {
            // the client embeds its own parameters with the distributed
            // sampler and ships only e_u plus a ciphertext of m_u
            auto t0 = std::chrono::steady_clock::now();
            std::vector<double> e_u = sampler->embed(m_u);
            CipherVector ct = he_encrypt(m_u, authority->public_key(), c.enc_rng);
            if (rec) rec->t_server_embed_ms += ms_since(t0);

            std::size_t before = authority->decrypt_call_count();
            auto t1 = std::chrono::steady_clock::now();
            // nearest-centroid placement is for clients the registry has not
            // seen; known clients keep their cluster until the next recompute
            std::size_t cluster = cfg.mode == FederationMode::kFedavgSingle ? 0
                                  : registry.has_assignment(c.id) ? registry.assignment(c.id)
                                                                  : registry.assign(e_u);
            registry.set_assignment(c.id, cluster);
            latest_e[c.id] = e_u;
            std::vector<CipherVector> inputs{ct};
            for (const auto& [cid, stored] : stored_ciphers) {
                if (cid == c.id) continue;
                if (registry.has_assignment(cid) && registry.assignment(cid) == cluster)
                    inputs.push_back(stored);
            }
            CipherVector agg = he_aggregate_mean(inputs, authority->public_key());
            stored_ciphers[c.id] = std::move(ct);
            server_decrypt_calls += authority->decrypt_call_count() - before;
            if (rec) rec->t_aggregate_ms += ms_since(t1);

            // client-side: decrypt the aggregate and install it
            std::vector<double> flat = he_decrypt(agg, authority->issue_private_key());
            install_flat(c, flat);
            return cluster;
        }

        auto t0 = std::chrono::steady_clock::now();
        std::size_t cluster;
        if (cfg.mode == FederationMode::kFedavgSingle) {
            cluster = 0;
        } else {
            std::vector<double> e_u = sampler->embed(m_u);
            cluster = registry.has_assignment(c.id) ? registry.assignment(c.id)
                                                    : registry.assign(e_u);
            latest_e[c.id] = e_u;
        }
        registry.set_assignment(c.id, cluster);
        if (rec) rec->t_server_embed_ms += ms_since(t0);

        auto t1 = std::chrono::steady_clock::now();
        AggregatePayload payload = aggregator.aggregate(c.id, m_u, cluster, registry, epoch);
        if (rec) rec->t_aggregate_ms += ms_since(t1);
        install_flat(c, payload.m_agg);
        return cluster;
    }

    // Epoch exchange, phase 1: the client ships its payload (ciphertext under
    // HE) and is placed in a cluster. Nothing comes back yet.
    std::size_t submit_client(Client& c, RoundRecord* rec) {
        ++server_calls;
        std::vector<double> m_u = c.emb.shared_payload().flatten();
        auto t0 = std::chrono::steady_clock::now();
        std::size_t cluster;
        if (cfg.mode == FederationMode::kFedavgSingle) {
            cluster = 0;
        } else {
            // under HE the client embeds its own parameters with the
            // distributed sampler; either way only e_u informs placement
            std::vector<double> e_u = sampler->embed(m_u);
            cluster = registry.has_assignment(c.id) ? registry.assignment(c.id)
                                                    : registry.assign(e_u);
            latest_e[c.id] = e_u;
        }
        registry.set_assignment(c.id, cluster);
        if (cfg.privacy == PrivacyMode::kHe) {
            stored_ciphers[c.id] = he_encrypt(m_u, authority->public_key(), c.enc_rng);
        } else {
            registry.store_model(c.id, std::move(m_u));
        }
        if (rec) rec->t_server_embed_ms += ms_since(t0);
        return cluster;
    }

    // Epoch exchange, phase 2: one aggregate per cluster, every member
    // installs the same payload. Keeps members of a cluster in lockstep; the
    // rolling per-arrival path below is only used for mid-simulation joins.
    void distribute_aggregates(std::int64_t epoch, RoundRecord* rec) {
        std::map<std::size_t, std::vector<Client*>> members;
        for (auto& c : clients) members[registry.assignment(c.id)].push_back(&c);
        for (auto& [cl, mem] : members) {
            auto t1 = std::chrono::steady_clock::now();
            if (cfg.privacy == PrivacyMode::kHe) {
                std::vector<CipherVector> inputs;
                inputs.reserve(mem.size());
                for (auto* c : mem) inputs.push_back(stored_ciphers.at(c->id));
                std::size_t before = authority->decrypt_call_count();
                CipherVector agg = he_aggregate_mean(inputs, authority->public_key());
                server_decrypt_calls += authority->decrypt_call_count() - before;
                if (rec) rec->t_aggregate_ms += ms_since(t1);
                for (auto* c : mem)
                    install_flat(*c, he_decrypt(agg, authority->issue_private_key()));
            } else {
                // re-submitting one member's stored model turns the rolling
                // aggregate into a plain mean over the whole cluster
                Client* first = mem.front();
                AggregatePayload payload = aggregator.aggregate(
                    first->id, registry.stored_models().at(first->id), cl, registry, epoch);
                if (rec) rec->t_aggregate_ms += ms_since(t1);
                for (auto* c : mem) install_flat(*c, payload.m_agg);
            }
        }
    }

    void bootstrap_epoch1(RoundRecord& rec) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<std::vector<double>> payloads;
        payloads.reserve(clients.size());
        for (auto& c : clients) payloads.push_back(c.emb.shared_payload().flatten());

        if (cfg.mode == FederationMode::kFedavgSingle) {
            // degenerate single-cluster registry; no sampler involved
            std::vector<std::int64_t> ids;
            std::vector<std::vector<double>> zeros;
            for (auto& c : clients) {
                ids.push_back(c.id);
                zeros.emplace_back(cfg.latent_dim, 0.0);
            }
            registry.bootstrap(ids, zeros, k_opts, cluster_rng.fork(1), 1);
            rec.t_cluster_ms += ms_since(t0);
            return;
        }

        // the initial pool donates plaintext payloads once, as trusted setup
        // for the sampler; afterwards only embeddings (and ciphertexts under
        // HE) reach the server
        std::size_t pool = std::min(cfg.initial_pool_size, payloads.size());
        std::vector<std::vector<double>> pool_vecs(payloads.begin(),
                                                   payloads.begin() + static_cast<std::ptrdiff_t>(pool));
        if (pool_vecs.size() < 2) pool_vecs = payloads;
        sampler->train(pool_vecs, cfg.sampler_epochs, cfg.sampler_lr, sampler_rng);
        rec.t_server_embed_ms += ms_since(t0);

        auto t1 = std::chrono::steady_clock::now();
        std::vector<std::int64_t> ids;
        std::vector<std::vector<double>> embeds;
        for (std::size_t i = 0; i < clients.size(); ++i) {
            ids.push_back(clients[i].id);
            embeds.push_back(sampler->embed(payloads[i]));
            latest_e[clients[i].id] = embeds.back();
        }
        registry.bootstrap(ids, embeds, k_opts, cluster_rng.fork(1), 1);
        rec.t_cluster_ms += ms_since(t1);
    }

    void maybe_recompute(std::int64_t epoch, RoundRecord& rec) {
        if (cfg.mode != FederationMode::kRefrs) return;
        if (!registry.initialized()) return;
        if (epoch - registry.epoch_of_last_recompute() < static_cast<std::int64_t>(cfg.recompute_interval))
            return;
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.privacy == PrivacyMode::kHe) {
            // no plaintext models server-side: recluster the stored embeddings
            std::vector<std::int64_t> ids;
            std::vector<std::vector<double>> embeds;
            for (const auto& [cid, e] : latest_e) {
                ids.push_back(cid);
                embeds.push_back(e);
            }
            registry.bootstrap(ids, embeds, k_opts,
                               cluster_rng.fork(static_cast<std::uint64_t>(epoch)), epoch);
            rec.recompute_ran = true;
        } else {
            if (cfg.sampler_finetune && cfg.sampler_refresh_epochs > 0 &&
                !registry.stored_models().empty()) {
                // refresh on the same-size pool the sampler was born on; training
                // on the whole population measurably blurs the embedding space
                std::vector<std::vector<double>> vecs;
                for (const auto& [cid, m] : registry.stored_models()) {
                    vecs.push_back(m);
                    if (vecs.size() == cfg.initial_pool_size) break;
                }
                if (vecs.size() >= 2)
                    sampler->train(vecs, cfg.sampler_refresh_epochs, cfg.sampler_lr, sampler_rng);
            }
            rec.recompute_ran = registry.recompute(
                *sampler, k_opts, cluster_rng.fork(static_cast<std::uint64_t>(epoch)), epoch,
                static_cast<std::int64_t>(cfg.recompute_interval));
            if (rec.recompute_ran)
                for (const auto& [cid, m] : registry.stored_models()) latest_e[cid] = sampler->embed(m);
        }
        rec.t_cluster_ms += ms_since(t0);
    }

    std::vector<RankResult> evaluate_clients() {
        std::vector<RankResult> out;
        out.reserve(clients.size());
        for (auto& c : clients) {
            WindowSample ws;
            ws.x = features.stack(c.test_window);
            ws.window_items = c.test_window;
            ws.target_item = c.test_target;
            QuantizeResult q = c.emb.embed_window(ws);
            Tensor h = c.rec.sequence_repr(q.z);
            std::vector<double> scores = c.rec.score(h);
            out.push_back(RankResult{c.id, rank_of(scores, c.test_target)});
        }
        return out;
    }

    FederationResult run() {
        if (ran) throw std::logic_error("FederationSim::run: already ran");
        ran = true;
        FederationResult result;
        for (std::size_t epoch = 1; epoch <= cfg.global_epochs; ++epoch) {
            RoundRecord rec;
            rec.epoch = static_cast<std::int64_t>(epoch);
            auto te = std::chrono::steady_clock::now();

            auto tc = std::chrono::steady_clock::now();
            for (auto& c : clients) local_train(c, epoch);
            rec.t_client_train_ms = ms_since(tc);

            if (cfg.mode != FederationMode::kLocalOnly) {
                if (epoch == 1) bootstrap_epoch1(rec);
                std::vector<bool> touched;
                for (auto& c : clients) {
                    std::size_t cl = submit_client(c, &rec);
                    if (touched.size() <= cl) touched.resize(cl + 1, false);
                    touched[cl] = true;
                }
                rec.distinct_payload_clusters =
                    static_cast<std::size_t>(std::count(touched.begin(), touched.end(), true));
                // recompute between the submit and distribute phases, so a
                // fresh clustering is what the aggregates are built over
                if (epoch > 1) maybe_recompute(static_cast<std::int64_t>(epoch), rec);
                distribute_aggregates(static_cast<std::int64_t>(epoch), &rec);
                rec.k = registry.k();
                std::vector<std::size_t> counts(registry.k(), 0);
                for (const auto& c : clients)
                    if (registry.has_assignment(c.id)) ++counts[registry.assignment(c.id)];
                rec.cluster_member_counts = counts;
            }

            auto ranks = evaluate_clients();
            EvalSummary s = evaluate(ranks, cfg.eval_k);
            rec.mean_hr = s.mean_hr;
            rec.mean_ndcg = s.mean_ndcg;
            rec.t_epoch_ms = ms_since(te);
            result.records.push_back(rec);
            if (epoch == cfg.global_epochs) {
                result.final_ranks = std::move(ranks);
                result.final_eval = s;
            }
        }
        result.server_calls = server_calls;
        result.server_decrypt_calls = server_decrypt_calls;
        return result;
    }

    std::optional<std::size_t> arrival(const UserStream& stream) {
        if (stream.items.size() < cfg.w + 2)
            throw std::invalid_argument("arrival: stream needs at least w + 2 events");
        if (cfg.mode == FederationMode::kRefrs && !registry.initialized()) return std::nullopt;

        std::int64_t id = std::max(next_arrival_id, stream.user_id);
        ++next_arrival_id;
        LeaveOneOutSplit split = leave_one_out_split(UserStream{id, stream.items, stream.hidden_group},
                                                     cfg.w);
        auto sessions = make_sessions(split.train, cfg.session_size, cfg.w);
        EmbeddingConfig ecfg = clients.front().emb.config();
        RecommenderConfig rcfg = clients.front().rec.config();
        clients.emplace_back(id, std::move(split), std::move(sessions), ecfg, rcfg,
                             master.fork(kSaltInit), master.fork(kSaltRecInit),
                             master.fork(kSaltClientBase + static_cast<std::uint64_t>(id)),
                             master.fork(kSaltEncryptBase + static_cast<std::uint64_t>(id)));
        Client& c = clients.back();
        local_train(c, 1);
        if (cfg.mode == FederationMode::kLocalOnly) return std::nullopt;
        // nearest-centroid assignment only; never triggers a recompute
        std::int64_t epoch = registry.epoch_of_last_recompute();
        return serve_client(c, epoch, nullptr);
    }

    std::vector<std::vector<double>> cluster_aggregates() const {
        std::vector<std::vector<double>> out;
        for (std::size_t cl = 0; cl < registry.k(); ++cl) {
            std::vector<const std::vector<double>*> members;
            if (cfg.privacy == PrivacyMode::kHe) {
                std::vector<CipherVector> inputs;
                for (const auto& [cid, ct] : stored_ciphers)
                    if (registry.has_assignment(cid) && registry.assignment(cid) == cl)
                        inputs.push_back(ct);
                if (inputs.empty()) {
                    out.emplace_back();
                    continue;
                }
                CipherVector agg = he_aggregate_mean(inputs, authority->public_key());
                out.push_back(he_decrypt(agg, authority->issue_private_key()));
                continue;
            }
            members = registry.cluster_members(cl, /*exclude=*/-1);
            if (members.empty()) {
                out.emplace_back();
                continue;
            }
            std::vector<double> mean(members.front()->size(), 0.0);
            for (const auto* m : members)
                for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*m)[i];
            for (auto& v : mean) v /= static_cast<double>(members.size());
            out.push_back(std::move(mean));
        }
        return out;
    }
};

FederationSim::FederationSim(const FederationConfig& cfg, const Dataset& dataset)
    : impl_(std::make_unique<Impl>(cfg, dataset)) {}

FederationSim::~FederationSim() = default;

FederationResult FederationSim::run() { return impl_->run(); }

std::optional<std::size_t> FederationSim::simulate_client_arrival(const UserStream& stream) {
    return impl_->arrival(stream);
}

const ClusterRegistry& FederationSim::registry() const { return impl_->registry; }
std::size_t FederationSim::client_count() const { return impl_->clients.size(); }

std::vector<std::vector<double>> FederationSim::final_cluster_aggregates() const {
    return impl_->cluster_aggregates();
}

}  // namespace refed
