// Command-line surface for the federated recommendation simulator: dataset
// synthesis/ingestion, simulation runs, evaluation, ablation sweeps and report
// rendering. All side effects are files under --out-dir.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "refed/config.hpp"
#include "refed/dataset.hpp"
#include "refed/federation.hpp"
#include "refed/metrics.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace refed;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

Dataset load_or_synthesize(const std::string& data_path, const Config& cfg, std::uint64_t seed) {
    if (!data_path.empty()) {
        std::size_t w = static_cast<std::size_t>(cfg.get_int("w", 16));
        std::size_t min_events = static_cast<std::size_t>(
            cfg.get_int("min_events", static_cast<long>(w + 2)));
        return ingest(data_path, min_events);
    }
    SyntheticSpec spec;
    spec.n_users = static_cast<std::size_t>(cfg.get_int("synth_users", 40));
    spec.n_items = static_cast<std::size_t>(cfg.get_int("synth_items", 48));
    spec.n_groups = static_cast<std::size_t>(cfg.get_int("synth_groups", 4));
    spec.items_per_group = static_cast<std::size_t>(cfg.get_int("synth_items_per_group", 12));
    spec.in_group_prob = cfg.get_double("synth_in_group_prob", 0.9);
    spec.repeat_prob = cfg.get_double("synth_repeat_prob", 0.25);
    spec.seq_len = static_cast<std::size_t>(cfg.get_int("synth_seq_len", 120));
    spec.seed = seed;
    return synthesize(spec);
}

void write_per_client_csv(const std::string& path, const std::vector<RankResult>& ranks,
                          std::size_t k) {
    std::ofstream f(path);
    f << "client_id,rank,hr,ndcg\n";
    for (const auto& r : ranks)
        f << r.client_id << "," << r.rank << "," << hr_at_k(r.rank, k) << ","
          << ndcg_at_k(r.rank, k) << "\n";
}

FederationResult run_and_dump(const FederationConfig& fcfg, const Dataset& ds,
                              const std::string& out_dir, bool echo) {
    fs::create_directories(out_dir);
    FederationSim sim(fcfg, ds);
    FederationResult res = sim.run();

    std::ofstream rec(out_dir + "/records.jsonl");
    for (const auto& r : res.records) {
        rec << r.to_json() << "\n";
        if (echo) std::cout << r.to_json() << "\n";
    }
    write_per_client_csv(out_dir + "/per_client.csv", res.final_ranks, fcfg.eval_k);

    json summary;
    summary["hr"] = res.final_eval.mean_hr;
    summary["ndcg"] = res.final_eval.mean_ndcg;
    summary["evaluated"] = res.final_eval.evaluated;
    summary["skipped"] = res.final_eval.skipped;
    summary["server_calls"] = res.server_calls;
    summary["server_decrypt_calls"] = res.server_decrypt_calls;
    std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
    std::ofstream(out_dir + "/clusters.json") << sim.registry().snapshot_json() << "\n";
    return res;
}

std::vector<json> read_records(const std::string& run_dir) {
    std::ifstream f(run_dir + "/records.jsonl");
    if (!f) throw std::runtime_error("no records.jsonl in " + run_dir);
    std::vector<json> out;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) out.push_back(json::parse(line));
    if (out.empty()) throw std::runtime_error("records.jsonl in " + run_dir + " is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clustered federated sequential recommendation simulator"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a grouped synthetic dataset");
    std::string s_out = "synth_out";
    SyntheticSpec spec;
    synth->add_option("--out-dir", s_out);
    synth->add_option("--users", spec.n_users);
    synth->add_option("--items", spec.n_items);
    synth->add_option("--groups", spec.n_groups);
    synth->add_option("--items-per-group", spec.items_per_group);
    synth->add_option("--in-group-prob", spec.in_group_prob);
    synth->add_option("--repeat-prob", spec.repeat_prob);
    synth->add_option("--seq-len", spec.seq_len);
    synth->add_option("--seed", spec.seed);

    // ingest
    auto* ing = app.add_subcommand("ingest", "normalize a TSV/CSV interaction log");
    std::string i_input, i_out = "ingest_out";
    std::size_t i_min_events = 18;
    ing->add_option("--input", i_input)->required();
    ing->add_option("--out-dir", i_out);
    ing->add_option("--min-events", i_min_events);

    // run
    auto* run = app.add_subcommand("run", "execute a federation simulation");
    std::string r_config, r_mode, r_privacy, r_out = "run_out", r_data;
    long r_seed = -1;
    run->add_option("--config", r_config);
    run->add_option("--seed", r_seed);
    run->add_option("--mode", r_mode);
    run->add_option("--privacy", r_privacy);
    run->add_option("--out-dir", r_out);
    run->add_option("--data", r_data);

    // eval
    auto* ev = app.add_subcommand("eval", "print metrics for a finished run");
    std::string e_dir;
    ev->add_option("--run-dir", e_dir)->required();

    // ablate
    auto* ab = app.add_subcommand("ablate", "sweep embedding dims, modes and privacy");
    std::string a_config, a_dims = "4,8,16,32", a_modes = "refrs", a_privacy = "none",
                a_seeds = "1", a_out = "ablate_out";
    ab->add_option("--config", a_config);
    ab->add_option("--dims", a_dims);
    ab->add_option("--modes", a_modes);
    ab->add_option("--privacy", a_privacy);
    ab->add_option("--seeds", a_seeds);
    ab->add_option("--out-dir", a_out);

    // report
    auto* rep = app.add_subcommand("report", "render metric and cluster-count charts");
    std::string p_dir;
    rep->add_option("--run-dir", p_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            fs::create_directories(s_out);
            Dataset ds = synthesize(spec);
            write_tsv(ds, s_out + "/dataset.tsv");
            json manifest;
            manifest["n_users"] = spec.n_users;
            manifest["n_items"] = spec.n_items;
            manifest["n_groups"] = spec.n_groups;
            manifest["items_per_group"] = spec.items_per_group;
            manifest["in_group_prob"] = spec.in_group_prob;
            manifest["repeat_prob"] = spec.repeat_prob;
            manifest["seq_len"] = spec.seq_len;
            manifest["seed"] = spec.seed;
            json groups = json::object();
            for (const auto& u : ds.users)
                if (u.hidden_group) groups[std::to_string(u.user_id)] = *u.hidden_group;
            manifest["hidden_groups"] = groups;
            std::ofstream(s_out + "/manifest.json") << manifest.dump(2) << "\n";
            std::cout << "wrote " << ds.users.size() << " users to " << s_out << "\n";
        } else if (*ing) {
            fs::create_directories(i_out);
            Dataset ds = ingest(i_input, i_min_events);
            write_tsv(ds, i_out + "/dataset.tsv");
            json manifest;
            manifest["source"] = i_input;
            manifest["n_users"] = ds.users.size();
            manifest["n_items"] = ds.n_items;
            manifest["dropped_users"] = ds.dropped_users;
            manifest["min_events"] = i_min_events;
            std::ofstream(i_out + "/manifest.json") << manifest.dump(2) << "\n";
            std::cout << "kept " << ds.users.size() << " users, dropped " << ds.dropped_users
                      << "\n";
        } else if (*run) {
            Config cfg = r_config.empty() ? Config{} : Config::parse_file(r_config);
            if (r_seed >= 0) cfg.set("seed", std::to_string(r_seed));
            if (!r_mode.empty()) cfg.set("mode", r_mode);
            if (!r_privacy.empty()) cfg.set("privacy", r_privacy);
            FederationConfig fcfg = FederationConfig::from_config(cfg);
            Dataset ds = load_or_synthesize(r_data.empty() ? cfg.get_str("data", "") : r_data,
                                            cfg, fcfg.seed);
            FederationResult res = run_and_dump(fcfg, ds, r_out, /*echo=*/true);
            std::cout << "final hr@" << fcfg.eval_k << "=" << res.final_eval.mean_hr << " ndcg@"
                      << fcfg.eval_k << "=" << res.final_eval.mean_ndcg << "\n";
        } else if (*ev) {
            auto records = read_records(e_dir);
            std::cout << "epoch\tk\thr\tndcg\n";
            for (const auto& r : records) {
                std::cout << r["epoch"].get<long>() << "\t"
                          << (r.contains("k") ? std::to_string(r["k"].get<std::size_t>()) : "-")
                          << "\t" << r["hr"].get<double>() << "\t" << r["ndcg"].get<double>()
                          << "\n";
            }
            std::ifstream sf(e_dir + "/summary.json");
            if (sf) {
                json s = json::parse(sf);
                std::cout << "final: hr=" << s["hr"].get<double>()
                          << " ndcg=" << s["ndcg"].get<double>() << " evaluated=" << s["evaluated"]
                          << " skipped=" << s["skipped"] << "\n";
            }
        } else if (*ab) {
            Config cfg = a_config.empty() ? Config{} : Config::parse_file(a_config);
            fs::create_directories(a_out);
            std::ofstream csv(a_out + "/ablate.csv");
            csv << "dim,mode,privacy,seed,hr,ndcg\n";
            for (const auto& mode : split_csv(a_modes))
                for (const auto& priv : split_csv(a_privacy))
                    for (const auto& dim : split_csv(a_dims))
                        for (const auto& seed : split_csv(a_seeds)) {
                            Config c = cfg;
                            c.set("mode", mode);
                            c.set("privacy", priv);
                            c.set("latent_dim", dim);
                            c.set("seed", seed);
                            FederationConfig fcfg = FederationConfig::from_config(c);
                            Dataset ds = load_or_synthesize(c.get_str("data", ""), c, fcfg.seed);
                            std::string sub = a_out + "/" + mode + "_" + priv + "_d" + dim + "_s" + seed;
                            FederationResult res = run_and_dump(fcfg, ds, sub, /*echo=*/false);
                            csv << dim << "," << mode << "," << priv << "," << seed << ","
                                << res.final_eval.mean_hr << "," << res.final_eval.mean_ndcg
                                << "\n";
                            std::cout << mode << " " << priv << " dim=" << dim << " seed=" << seed
                                      << " hr=" << res.final_eval.mean_hr << "\n";
                        }
            std::cout << "wrote " << a_out << "/ablate.csv\n";
        } else if (*rep) {
            auto records = read_records(p_dir);
            plot::Series hr{"HR@10", {}, {}}, nd{"NDCG@10", {}, {}}, kk{"k", {}, {}};
            for (const auto& r : records) {
                double e = r["epoch"].get<double>();
                hr.x.push_back(e);
                hr.y.push_back(r["hr"].get<double>());
                nd.x.push_back(e);
                nd.y.push_back(r["ndcg"].get<double>());
                if (r.contains("k")) {
                    kk.x.push_back(e);
                    kk.y.push_back(r["k"].get<double>());
                }
            }
            plot::write_line_chart(p_dir + "/metric_vs_epoch.svg", "accuracy per global epoch",
                                   "global epoch", "metric", {hr, nd});
            if (!kk.x.empty())
                plot::write_line_chart(p_dir + "/k_vs_epoch.svg", "cluster count per global epoch",
                                       "global epoch", "k", {kk});
            std::cout << "wrote charts to " << p_dir << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
