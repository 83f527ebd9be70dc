#include "invcol/pipeline.hpp"

#include "digest.hpp"
#include "invcol/coherence.hpp"
#include "invcol/error.hpp"
#include "invcol/metrics.hpp"
#include "invcol/mkkm.hpp"
#include "invcol/null_model.hpp"
#include "invcol/rng.hpp"
#include "io_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace invcol::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// ---- configuration ---------------------------------------------------------

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"pipeline", {"seed", "output_dir", "threads"}},
        {"mcl", {"expansion", "inflation", "prune_threshold", "max_iterations",
                 "convergence_epsilon"}},
        {"mkkm", {"k", "coarsen_until", "refine_iterations"}},
        {"selection", {"min_size", "max_size", "max_conductance", "min_jaccard"}},
        {"coherence", {"stoplist", "reps", "min_articles"}},
        {"edge_cases", {"external_threshold", "hub_fraction"}},
        {"shuffle", {"datasets", "swaps", "min_size", "max_size"}},
    };
    return keys;
}

template <class Int>
Int to_int(const std::string& section, const std::string& key, const std::string& value) {
    Int out{};
    if (!detail::parse_int(detail::trim(value), out)) {
        throw ValidationError("[" + section + "] " + key + ": expected an integer, got '" + value +
                              "'");
    }
    return out;
}

double to_double(const std::string& section, const std::string& key, const std::string& value) {
    double out = 0.0;
    if (!detail::parse_double(detail::trim(value), out)) {
        throw ValidationError("[" + section + "] " + key + ": expected a number, got '" + value +
                              "'");
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(std::string(detail::trim(value)));
    if (p.is_relative()) p = base / p;
    return p.lexically_normal();
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// ---- run state -------------------------------------------------------------

std::string fmt(double v) { return detail::format_fixed(v, 6); }

struct Artifact {
    fs::path rel;
    std::string stage;
};

class Run {
public:
    explicit Run(fs::path root) : root_(std::move(root)) {}

    const fs::path& root() const { return root_; }

    /// Absolute path for a new artifact of the current stage.
    fs::path out(const fs::path& rel) {
        artifacts_.push_back({rel, stage_});
        return root_ / rel;
    }

    void stage(std::string name, const std::function<void()>& body) {
        stage_ = std::move(name);
        stages_.push_back(stage_);
        body();
    }

    const std::string& current_stage() const { return stage_; }
    const std::vector<Artifact>& artifacts() const { return artifacts_; }
    const std::vector<std::string>& stages() const { return stages_; }

    std::map<std::string, std::uint64_t> seeds;

private:
    fs::path root_;
    std::string stage_;
    std::vector<std::string> stages_;
    std::vector<Artifact> artifacts_;
};

json ingest_summary(const Dataset& d, std::size_t self_loops, std::size_t duplicates) {
    std::size_t with_text = 0;
    std::size_t synthesized = 0;
    for (const auto& r : d.records) {
        with_text += r.has_text();
        synthesized += r.synthesized;
    }
    json obj;
    obj["dataset"] = d.label;
    obj["nodes"] = d.graph.node_count();
    obj["edges"] = d.graph.edge_count();
    obj["dropped_self_loops"] = self_loops;
    obj["dropped_duplicates"] = duplicates;
    obj["records_with_text"] = with_text;
    obj["synthesized_records"] = synthesized;
    return obj;
}

struct SliceState {
    Dataset data;
    Clustering mcl;
    Clustering mkkm;
    MetricsTable mcl_metrics;
    MetricsTable mkkm_metrics;
    std::vector<ClusterMatch> mcl_to_mkkm;
};

struct Selected {
    std::string match_label;
    std::string dataset;
    ClusterId mcl_id = 0;
    ClusterId mkkm_id = 0;
    double jaccard = 0.0;
};

double mean_defined(std::span<const CoherenceResult> rows) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.status != CoherenceStatus::Ok || std::isnan(r.coherence)) continue;
        sum += r.coherence;
        ++n;
    }
    return n == 0 ? std::nan("") : sum / static_cast<double>(n);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path require(const fs::path& root, const fs::path& rel) {
    if (!fs::exists(root / rel)) throw Error("missing artifact: " + rel.generic_string());
    return root / rel;
}

std::vector<Selected> read_selected(const fs::path& path) {
    const std::string text = detail::read_file(path);
    auto rows = detail::lines(text);
    if (rows.empty() || rows[0] != "match_label,dataset,mcl_id,mkkm_id,jaccard") {
        throw ParseError("'" + path.string() + "' is not a selection CSV", 1);
    }
    std::vector<Selected> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        auto f = detail::split(rows[i], ',');
        Selected s;
        if (f.size() != 5 || !detail::parse_int(f[2], s.mcl_id) ||
            !detail::parse_int(f[3], s.mkkm_id) || !detail::parse_double(f[4], s.jaccard)) {
            throw ParseError("malformed selection row", i + 1);
        }
        s.match_label = std::string(f[0]);
        s.dataset = std::string(f[1]);
        out.push_back(std::move(s));
    }
    return out;
}

void write_selected(std::span<const Selected> rows, const fs::path& path) {
    std::string out = "match_label,dataset,mcl_id,mkkm_id,jaccard\n";
    for (const auto& s : rows) {
        out += s.match_label + ',' + s.dataset + ',' + std::to_string(s.mcl_id) + ',' +
               std::to_string(s.mkkm_id) + ',' + fmt(s.jaccard) + '\n';
    }
    detail::write_file(path, out);
}

void move_to_failed(const Run& run) {
    const fs::path failed = run.root() / "failed";
    for (const auto& a : run.artifacts()) {
        const fs::path src = run.root() / a.rel;
        std::error_code ec;
        if (!fs::exists(src, ec)) continue;
        fs::create_directories((failed / a.rel).parent_path(), ec);
        fs::rename(src, failed / a.rel, ec);
    }
}

void write_manifest(const Config& config, const Run& run, const fs::path& path) {
    json m;
    m["schema"] = "invcol-manifest/1";
    m["created_at"] = utc_timestamp();
    m["status"] = "ok";
    m["seed"] = config.seed;
    m["seeds"] = json::object();
    for (const auto& [label, value] : run.seeds) m["seeds"][label] = value;

    json inputs = json::array();
    auto add_input = [&](const std::string& role, const std::string& dataset, const fs::path& p) {
        json in;
        in["role"] = role;
        if (!dataset.empty()) in["dataset"] = dataset;
        in["path"] = p.generic_string();
        in["sha256"] = detail::sha256_file(p);
        inputs.push_back(std::move(in));
    };
    if (!config.config_path.empty()) add_input("config", "", config.config_path);
    for (const auto& d : config.datasets) {
        add_input("edges", d.label, d.edges);
        if (d.metadata) add_input("metadata", d.label, *d.metadata);
    }
    if (config.stoplist) add_input("stoplist", "", *config.stoplist);
    m["inputs"] = std::move(inputs);

    m["stages"] = run.stages();
    std::vector<Artifact> sorted = run.artifacts();
    std::sort(sorted.begin(), sorted.end(),
              [](const Artifact& a, const Artifact& b) { return a.rel < b.rel; });
    json artifacts = json::array();
    for (const auto& a : sorted) {
        json entry;
        entry["path"] = a.rel.generic_string();
        entry["stage"] = a.stage;
        entry["sha256"] = detail::sha256_file(run.root() / a.rel);
        artifacts.push_back(std::move(entry));
    }
    m["artifacts"] = std::move(artifacts);
    detail::write_file(path, m.dump(2) + "\n");
}

}  // namespace

// ---- configuration ---------------------------------------------------------

Config parse_config(std::string_view text, const fs::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("config: " + std::string(e.what()));
    }

    Config config;
    if (const char* env = std::getenv(std::string(kOutputDirEnv).c_str()); env && *env) {
        config.output_dir = fs::path(env);
    } else {
        config.output_dir = "invcol-out";
    }
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) {
            throw ValidationError("config: key '" + section + "' outside any section");
        }
        if (section.rfind("dataset.", 0) == 0) {
            DatasetSpec spec;
            spec.label = section.substr(8);
            for (const auto& [key, value] : body) {
                const std::string v = value.data();
                if (key == "edges") {
                    spec.edges = resolve(base_dir, v);
                } else if (key == "metadata") {
                    spec.metadata = resolve(base_dir, v);
                } else {
                    throw ValidationError("[" + section + "] unknown key '" + key + "'");
                }
            }
            config.datasets.push_back(std::move(spec));
            continue;
        }
        auto known = known_keys().find(section);
        if (known == known_keys().end()) {
            throw ValidationError("config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!known->second.contains(key)) {
                throw ValidationError("[" + section + "] unknown key '" + key + "'");
            }
            const std::string v = value.data();
            auto as_size = [&] { return to_int<std::size_t>(section, key, v); };
            auto as_double = [&] { return to_double(section, key, v); };
            if (section == "pipeline") {
                if (key == "seed") config.seed = to_int<std::uint64_t>(section, key, v);
                if (key == "output_dir") config.output_dir = resolve(base_dir, v);
                if (key == "threads") config.threads = to_int<unsigned>(section, key, v);
            } else if (section == "mcl") {
                if (key == "expansion") config.mcl.expansion = to_int<int>(section, key, v);
                if (key == "inflation") config.mcl.inflation = as_double();
                if (key == "prune_threshold") config.mcl.prune_threshold = as_double();
                if (key == "max_iterations") config.mcl.max_iterations = as_size();
                if (key == "convergence_epsilon") config.mcl.convergence_epsilon = as_double();
            } else if (section == "mkkm") {
                if (key == "k") {
                    if (detail::trim(v) == "auto") {
                        config.mkkm_k.reset();
                    } else {
                        config.mkkm_k = as_size();
                    }
                }
                if (key == "coarsen_until") config.mkkm_coarsen_until = as_size();
                if (key == "refine_iterations") config.mkkm_refine_iterations = as_size();
            } else if (section == "selection") {
                if (key == "min_size") config.selection.min_size = as_size();
                if (key == "max_size") config.selection.max_size = as_size();
                if (key == "max_conductance") config.selection.max_conductance = as_double();
                if (key == "min_jaccard") config.selection.min_jaccard = as_double();
            } else if (section == "coherence") {
                if (key == "stoplist") config.stoplist = resolve(base_dir, v);
                if (key == "reps") config.coherence_reps = as_size();
                if (key == "min_articles") config.coherence_min_articles = as_size();
            } else if (section == "edge_cases") {
                if (key == "external_threshold") config.edge_cases.external_threshold = as_size();
                if (key == "hub_fraction") config.edge_cases.hub_fraction = as_double();
            } else if (section == "shuffle") {
                if (key == "datasets") config.shuffle_datasets = split_list(v);
                if (key == "swaps") config.shuffle_swaps = as_size();
                if (key == "min_size") config.shuffle_min_size = as_size();
                if (key == "max_size") config.shuffle_max_size = as_size();
            }
        }
    }
    return config;
}

Config load_config(const fs::path& path) {
    std::string text;
    try {
        text = detail::read_file(path);
    } catch (const Error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    Config config = parse_config(text, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    config.config_path = path.lexically_normal();
    return config;
}

void validate(const Config& config) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    if (config.datasets.empty()) fail("config: no [dataset.<label>] section");
    if (config.output_dir.empty()) {
        fail("config: no output directory ([pipeline] output_dir or " + std::string(kOutputDirEnv) +
             ")");
    }
    if (config.threads == 0) fail("[pipeline] threads must be at least 1");

    std::set<std::string> labels;
    for (const auto& d : config.datasets) {
        if (d.label.empty()) fail("config: dataset label is empty");
        if (d.label == kCombinedLabel) fail("config: dataset label 'combined' is reserved");
        if (d.label.find_first_of("/\\ \t,:") != std::string::npos) {
            fail("config: dataset label '" + d.label + "' contains a separator character");
        }
        if (!labels.insert(d.label).second) fail("config: duplicate dataset '" + d.label + "'");
        if (d.edges.empty()) fail("[dataset." + d.label + "] edges is required");
        if (!fs::is_regular_file(d.edges)) {
            fail("[dataset." + d.label + "] edge file not found: " + d.edges.string());
        }
        if (d.metadata && !fs::is_regular_file(*d.metadata)) {
            fail("[dataset." + d.label + "] metadata file not found: " + d.metadata->string());
        }
    }
    if (config.stoplist && !fs::is_regular_file(*config.stoplist)) {
        fail("[coherence] stoplist not found: " + config.stoplist->string());
    }

    const auto& m = config.mcl;
    if (m.expansion < 2) fail("[mcl] expansion must be at least 2");
    if (!(m.inflation > 1.0)) fail("[mcl] inflation must exceed 1");
    if (!(m.prune_threshold >= 0.0 && m.prune_threshold < 1.0)) {
        fail("[mcl] prune_threshold must lie in [0, 1)");
    }
    if (m.max_iterations == 0) fail("[mcl] max_iterations must be at least 1");
    if (!(m.convergence_epsilon > 0.0)) fail("[mcl] convergence_epsilon must be positive");
    if (config.mkkm_k && *config.mkkm_k == 0) fail("[mkkm] k must be at least 1 or 'auto'");

    const auto& s = config.selection;
    if (s.min_size > s.max_size) fail("[selection] min_size exceeds max_size");
    if (!(s.max_conductance >= 0.0 && s.max_conductance <= 1.0)) {
        fail("[selection] max_conductance must lie in [0, 1]");
    }
    if (!(s.min_jaccard >= 0.0 && s.min_jaccard <= 1.0)) {
        fail("[selection] min_jaccard must lie in [0, 1]");
    }
    if (config.coherence_reps == 0) fail("[coherence] reps must be at least 1");
    if (!(config.edge_cases.hub_fraction > 0.0 && config.edge_cases.hub_fraction <= 1.0)) {
        fail("[edge_cases] hub_fraction must lie in (0, 1]");
    }
    for (const auto& label : config.shuffle_datasets) {
        if (label != kCombinedLabel && !labels.contains(label)) {
            fail("[shuffle] unknown dataset '" + label + "'");
        }
    }
    if (config.shuffle_min_size > config.shuffle_max_size) {
        fail("[shuffle] min_size exceeds max_size");
    }
}

// ---- run -------------------------------------------------------------------

RunResult run_pipeline(const Config& config) {
    RunResult result;
    try {
        validate(config);
    } catch (const ValidationError& e) {
        result.exit_code = kExitValidation;
        result.failure = StageFailure{"validate", e.what()};
        return result;
    }

    const fs::path root = config.output_dir;
    {
        std::error_code ec;
        fs::remove_all(root / "failed", ec);
        fs::remove(root / "manifest.json", ec);
    }
    Run run(root);
    const unsigned threads = std::max(1u, config.threads);

    std::vector<SliceState> slices;
    Dataset combined;
    Clustering combined_mcl;
    MetricsTable combined_metrics;
    std::vector<Selected> selected;
    text::StopList stop_list = text::StopList::defaults();

    try {
        run.stage("ingest", [&] {
            json index;
            index["datasets"] = json::array();
            std::vector<Dataset> parts;
            for (const auto& spec : config.datasets) {
                auto loaded = load_edges(spec.edges);
                std::vector<PubRecord> records;
                if (spec.metadata) records = load_metadata(*spec.metadata);
                Dataset d = Dataset::assemble(spec.label, std::move(loaded.graph), std::move(records));
                detail::write_file(run.out("ingest/" + spec.label + ".json"),
                                   ingest_summary(d, loaded.self_loops, loaded.duplicates).dump(2) +
                                       "\n");
                index["datasets"].push_back(spec.label);
                parts.push_back(std::move(d));
            }
            UnionReport report;
            combined = union_datasets(parts, &report);
            json summary = ingest_summary(combined, 0, 0);
            summary["metadata_conflicts"] = report.metadata_conflicts;
            detail::write_file(run.out("ingest/combined.json"), summary.dump(2) + "\n");
            write_edges(combined.graph, run.out("ingest/combined.edges.tsv"));
            write_metadata(combined.records, run.out("ingest/combined.metadata.jsonl"));
            index["datasets"].push_back(kCombinedLabel);
            detail::write_file(run.out("index.json"), index.dump(2) + "\n");
            for (auto& d : parts) slices.push_back(SliceState{std::move(d), {}, {}, {}, {}, {}});
        });

        run.stage("cluster", [&] {
            mcl::Params mp = config.mcl;
            mp.threads = threads;
            for (auto& s : slices) {
                const std::string& label = s.data.label;
                s.mcl = mcl::cluster(s.data.graph, mp);
                s.mcl.provenance.dataset_label = label;
                write_clustering(s.mcl, s.data.graph, run.out("clusters/" + label + ".mcl.tsv"));
                write_provenance(s.mcl.provenance, s.mcl.size(),
                                 run.out("clusters/" + label + ".mcl.json"));

                mkkm::Params kp;
                kp.k = config.mkkm_k.value_or(mkkm::choose_k(s.mcl));
                kp.coarsen_until = config.mkkm_coarsen_until;
                kp.refine_iterations = config.mkkm_refine_iterations;
                kp.seed = derive_seed(config.seed, "mkkm/" + label);
                run.seeds["mkkm/" + label] = kp.seed;
                s.mkkm = mkkm::cluster(s.data.graph, kp);
                s.mkkm.provenance.dataset_label = label;
                write_clustering(s.mkkm, s.data.graph, run.out("clusters/" + label + ".mkkm.tsv"));
                write_provenance(s.mkkm.provenance, s.mkkm.size(),
                                 run.out("clusters/" + label + ".mkkm.json"));
            }
            combined_mcl = mcl::cluster(combined.graph, mp);
            combined_mcl.provenance.dataset_label = std::string(kCombinedLabel);
            write_clustering(combined_mcl, combined.graph, run.out("clusters/combined.mcl.tsv"));
            write_provenance(combined_mcl.provenance, combined_mcl.size(),
                             run.out("clusters/combined.mcl.json"));
        });

        run.stage("metrics", [&] {
            for (auto& s : slices) {
                s.mcl_metrics = metrics_table(s.data.graph, s.mcl);
                s.mkkm_metrics = metrics_table(s.data.graph, s.mkkm);
                write_metrics_csv(s.mcl_metrics, run.out("metrics/" + s.data.label + ".mcl.csv"));
                write_metrics_csv(s.mkkm_metrics, run.out("metrics/" + s.data.label + ".mkkm.csv"));
            }
            combined_metrics = metrics_table(combined.graph, combined_mcl);
            write_metrics_csv(combined_metrics, run.out("metrics/combined.mcl.csv"));
        });

        std::set<std::pair<std::string, ClusterId>> matched_by_combined;
        run.stage("match", [&] {
            std::vector<PubClustering> slice_mcl;
            for (const auto& s : slices) {
                slice_mcl.push_back(to_pub_clustering(s.mcl, s.data.graph, s.data.label));
            }
            auto combined_pub =
                to_pub_clustering(combined_mcl, combined.graph, std::string(kCombinedLabel));
            auto matches = match_all(combined_pub, slice_mcl);
            write_matches_csv(matches, run.out("matches/combined_to_slices.csv"));
            for (const auto& m : matches) {
                if (m.target_cluster_id) {
                    matched_by_combined.emplace(m.target_label, *m.target_cluster_id);
                }
            }
            for (std::size_t i = 0; i < slices.size(); ++i) {
                auto& s = slices[i];
                PubClustering mkkm_pub = to_pub_clustering(s.mkkm, s.data.graph, s.data.label + ".mkkm");
                s.mcl_to_mkkm = match_all(slice_mcl[i], std::span(&mkkm_pub, 1));
                write_matches_csv(s.mcl_to_mkkm,
                                  run.out("matches/" + s.data.label + ".mcl_to_mkkm.csv"));
            }
        });

        Corpus corpus;
        BaselineCache cache;
        CoherenceSettings cs;
        cs.reps = config.coherence_reps;
        cs.min_articles_exclusive = config.coherence_min_articles;
        cs.seed = derive_seed(config.seed, "coherence");
        run.seeds["coherence"] = cs.seed;
        run.stage("coherence", [&] {
            if (config.stoplist) stop_list = text::StopList::load(*config.stoplist);
            corpus = Corpus::build(combined.records, stop_list);
            for (const auto& s : slices) {
                write_coherence_csv(coherence_table(s.mcl, s.data.graph, corpus, cache, cs, threads),
                                    run.out("coherence/" + s.data.label + ".mcl.csv"));
                write_coherence_csv(coherence_table(s.mkkm, s.data.graph, corpus, cache, cs, threads),
                                    run.out("coherence/" + s.data.label + ".mkkm.csv"));
            }
            write_coherence_csv(
                coherence_table(combined_mcl, combined.graph, corpus, cache, cs, threads),
                run.out("coherence/combined.mcl.csv"));
        });

        run.stage("selection", [&] {
            for (const auto& s : slices) {
                for (ClusterId id :
                     select_candidates(s.mcl_metrics.rows, s.mcl_to_mkkm, config.selection)) {
                    if (!matched_by_combined.contains({s.data.label, id})) continue;
                    const ClusterMatch& m = s.mcl_to_mkkm[id];
                    Selected sel;
                    sel.dataset = s.data.label;
                    sel.mcl_id = id;
                    sel.mkkm_id = *m.target_cluster_id;
                    sel.jaccard = m.jaccard;
                    sel.match_label = s.data.label + "-" + std::to_string(id) + "-" +
                                      std::to_string(sel.mkkm_id);
                    selected.push_back(std::move(sel));
                }
            }
            write_selected(selected, run.out("selection/selected.csv"));
        });

        std::vector<EdgeCaseLabel> labels;
        run.stage("edge-cases", [&] {
            std::string out = "match_label,kind,size,external_edges,hub,hub_links\n";
            for (const auto& sel : selected) {
                const auto& s = *std::find_if(slices.begin(), slices.end(), [&](const SliceState& x) {
                    return x.data.label == sel.dataset;
                });
                auto label = classify_edge_case(s.mcl.clusters[sel.mcl_id], s.data.graph,
                                                config.edge_cases);
                out += sel.match_label + ',' + std::string(to_string(label.kind)) + ',' +
                       std::to_string(label.size) + ',' + std::to_string(label.external_edges) +
                       ',' + (label.hub ? s.data.graph.id(*label.hub) : std::string()) + ',' +
                       std::to_string(label.hub_links) + '\n';
                labels.push_back(label);
            }
            detail::write_file(run.out("communities/edge_cases.csv"), out);
        });

        run.stage("communities", [&] {
            std::vector<CommunityProfile> profiles;
            for (const auto& sel : selected) {
                const auto& s = *std::find_if(slices.begin(), slices.end(), [&](const SliceState& x) {
                    return x.data.label == sel.dataset;
                });
                profiles.push_back(build_profile(sel.mcl_id, s.mcl.clusters[sel.mcl_id], s.data));
            }
            auto filtered = filter_communities(profiles, labels);
            write_profiles_jsonl(filtered.accepted, run.out("communities/accepted.jsonl"));
            std::string rejected = "dataset,cluster_id,kind\n";
            for (const auto& r : filtered.rejected) {
                rejected += r.profile.dataset_label + ',' + std::to_string(r.profile.cluster_id) +
                            ',' + std::string(to_string(r.label.kind)) + '\n';
            }
            detail::write_file(run.out("communities/rejected.csv"), rejected);
            write_author_distribution(author_cluster_distribution(combined_mcl, combined.records),
                                      run.out("communities/author_distribution.json"));
            result.accepted_communities = filtered.accepted.size();
        });

        if (!config.shuffle_datasets.empty()) {
            run.stage("null-model", [&] {
                mcl::Params mp = config.mcl;
                mp.threads = threads;
                for (const auto& label : config.shuffle_datasets) {
                    const Dataset* d = &combined;
                    const Clustering* original = &combined_mcl;
                    const MetricsTable* original_metrics = &combined_metrics;
                    for (const auto& s : slices) {
                        if (s.data.label == label) {
                            d = &s.data;
                            original = &s.mcl;
                            original_metrics = &s.mcl_metrics;
                        }
                    }
                    const std::size_t swaps = config.shuffle_swaps > 0
                                                  ? config.shuffle_swaps
                                                  : 10 * d->graph.edge_count();
                    const std::uint64_t seed = derive_seed(config.seed, "shuffle/" + label);
                    run.seeds["shuffle/" + label] = seed;
                    auto shuffled = shuffle_citations(d->graph, swaps, seed);
                    write_edges(shuffled.graph, run.out("shuffle/" + label + ".edges.tsv"));
                    write_shuffle_report(shuffled.report, run.out("shuffle/" + label + ".report.json"));
                    Clustering sc = mcl::cluster(shuffled.graph, mp);
                    sc.provenance.dataset_label = label + ".shuffled";
                    write_clustering(sc, shuffled.graph, run.out("shuffle/" + label + ".mcl.tsv"));
                    auto sm = metrics_table(shuffled.graph, sc);
                    write_metrics_csv(sm, run.out("shuffle/" + label + ".metrics.csv"));
                    auto scoh = coherence_table(sc, shuffled.graph, corpus, cache, cs, threads);
                    write_coherence_csv(scoh, run.out("shuffle/" + label + ".coherence.csv"));
                    auto ocoh = coherence_table(*original, d->graph, corpus, cache, cs, threads);

                    auto summarize = [&](const MetricsTable& mt,
                                         const std::vector<CoherenceResult>& coh) {
                        std::vector<double> cond;
                        std::vector<CoherenceResult> kept;
                        for (std::size_t i = 0; i < mt.rows.size(); ++i) {
                            const auto& r = mt.rows[i];
                            if (r.size < config.shuffle_min_size || r.size > config.shuffle_max_size) {
                                continue;
                            }
                            cond.push_back(r.conductance);
                            kept.push_back(coh[i]);
                        }
                        const double med = cond.empty() ? std::nan("") : median(cond);
                        return std::to_string(cond.size()) + ',' + fmt(med) + ',' +
                               fmt(mean_defined(kept));
                    };
                    std::string cmp = "graph,clusters,median_conductance,mean_coherence\n";
                    cmp += "original," + summarize(*original_metrics, ocoh) + '\n';
                    cmp += "shuffled," + summarize(sm, scoh) + '\n';
                    detail::write_file(run.out("shuffle/" + label + ".comparison.csv"), cmp);
                }
            });
        }

        run.stage("reports", [&] {
            run.out("reports/table1.csv");
            run.out("reports/table3.csv");
            report_tables(root);
        });
    } catch (const std::exception& e) {
        result.exit_code = kExitStageFailure;
        result.failure = StageFailure{run.current_stage(), e.what()};
        move_to_failed(run);
        json err;
        err["stage"] = run.current_stage();
        err["cause"] = e.what();
        std::error_code ec;
        fs::create_directories(root / "failed", ec);
        try {
            detail::write_file(root / "failed" / "error.json", err.dump(2) + "\n");
        } catch (const std::exception&) {
        }
        return result;
    }

    for (const auto& a : run.artifacts()) result.artifacts.push_back(a.rel);
    result.manifest = root / "manifest.json";
    try {
        write_manifest(config, run, result.manifest);
    } catch (const std::exception& e) {
        result.exit_code = kExitStageFailure;
        result.failure = StageFailure{"manifest", e.what()};
    }
    return result;
}

// ---- reports ---------------------------------------------------------------

void report_tables(const fs::path& output_dir) {
    const json index = json::parse(detail::read_file(require(output_dir, "index.json")));
    std::string table1 = std::string(kTable1Header) + '\n';
    for (const auto& label_json : index.at("datasets")) {
        const std::string label = label_json.get<std::string>();
        auto mt = read_metrics_csv(require(output_dir, "metrics/" + label + ".mcl.csv"));
        auto coh = read_coherence_csv(require(output_dir, "coherence/" + label + ".mcl.csv"));
        const auto& s = mt.summary;
        table1 += label + ',' + std::to_string(s.cluster_count) + ',' + std::to_string(s.node_count) +
                  ',' + fmt(s.mean_size) + ',' + fmt(s.median_size) + ',' +
                  fmt(s.mean_conductance) + ',' + fmt(mean_defined(coh)) + '\n';
    }

    std::string table3 = std::string(kTable3Header) + '\n';
    auto selected = read_selected(require(output_dir, "selection/selected.csv"));
    std::map<fs::path, MetricsTable> metrics_cache;
    std::map<fs::path, std::vector<CoherenceResult>> coherence_cache;
    auto metrics_row = [&](const fs::path& rel, ClusterId id) -> const ClusterMetrics& {
        auto it = metrics_cache.find(rel);
        if (it == metrics_cache.end()) {
            it = metrics_cache.emplace(rel, read_metrics_csv(require(output_dir, rel))).first;
        }
        if (id >= it->second.rows.size()) {
            throw Error("cluster " + std::to_string(id) + " missing from " + rel.generic_string());
        }
        return it->second.rows[id];
    };
    auto coherence_row = [&](const fs::path& rel, ClusterId id) -> const CoherenceResult& {
        auto it = coherence_cache.find(rel);
        if (it == coherence_cache.end()) {
            it = coherence_cache.emplace(rel, read_coherence_csv(require(output_dir, rel))).first;
        }
        if (id >= it->second.size()) {
            throw Error("cluster " + std::to_string(id) + " missing from " + rel.generic_string());
        }
        return it->second[id];
    };
    for (const auto& sel : selected) {
        const auto& mm = metrics_row("metrics/" + sel.dataset + ".mcl.csv", sel.mcl_id);
        const auto& mg = metrics_row("metrics/" + sel.dataset + ".mkkm.csv", sel.mkkm_id);
        const auto& cm = coherence_row("coherence/" + sel.dataset + ".mcl.csv", sel.mcl_id);
        const auto& cg = coherence_row("coherence/" + sel.dataset + ".mkkm.csv", sel.mkkm_id);
        table3 += sel.match_label + ',' + std::to_string(mm.size) + ',' + std::to_string(mg.size) +
                  ',' + fmt(mm.conductance) + ',' + fmt(mg.conductance) + ',' + fmt(cm.coherence) +
                  ',' + fmt(cg.coherence) + ',' + std::to_string(mm.internal_edges) + ',' +
                  std::to_string(mg.internal_edges) + ',' + fmt(sel.jaccard) + '\n';
    }
    detail::write_file(output_dir / "reports" / "table1.csv", table1);
    detail::write_file(output_dir / "reports" / "table3.csv", table3);
}

}  // namespace invcol::pipeline
