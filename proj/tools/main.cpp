// invcol: command-line front end. Each subcommand runs one stage against
// explicit artifact paths; `pipeline` runs them all from a config file.

#include "invcol/coherence.hpp"
#include "invcol/community.hpp"
#include "invcol/error.hpp"
#include "invcol/matching.hpp"
#include "invcol/mcl.hpp"
#include "invcol/metrics.hpp"
#include "invcol/mkkm.hpp"
#include "invcol/null_model.hpp"
#include "invcol/pipeline.hpp"
#include "invcol/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace invcol;

namespace {

unsigned g_threads = 1;

Dataset load_dataset(const std::string& label, const fs::path& edges,
                     const std::optional<fs::path>& metadata) {
    auto loaded = load_edges(edges);
    std::vector<PubRecord> records;
    if (metadata) {
        // Records outside the edge list would become extra isolated nodes and break
        // the clustering's partition of the graph.
        for (auto& r : load_metadata(*metadata)) {
            if (loaded.graph.find(r.pub_id)) records.push_back(std::move(r));
        }
    }
    return Dataset::assemble(label, std::move(loaded.graph), std::move(records));
}

void write_text(const fs::path& path, const std::string& text) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

struct IngestArgs {
    std::string label = "dataset";
    fs::path edges;
    std::optional<fs::path> metadata;
    fs::path out_dir;
};

int run_ingest(const IngestArgs& a) {
    auto loaded = load_edges(a.edges);
    std::vector<PubRecord> records;
    if (a.metadata) records = load_metadata(*a.metadata);
    const std::size_t self_loops = loaded.self_loops;
    const std::size_t duplicates = loaded.duplicates;
    Dataset d = Dataset::assemble(a.label, std::move(loaded.graph), std::move(records));
    write_edges(d.graph, a.out_dir / (a.label + ".edges.tsv"));
    write_metadata(d.records, a.out_dir / (a.label + ".metadata.jsonl"));
    std::cout << a.label << ": " << d.graph.node_count() << " nodes, " << d.graph.edge_count()
              << " edges (dropped " << self_loops << " self-loops, " << duplicates
              << " duplicates)\n";
    return 0;
}

struct MclArgs {
    fs::path edges;
    fs::path out;
    std::optional<fs::path> provenance;
    mcl::Params params;
};

int run_mcl(MclArgs a) {
    auto loaded = load_edges(a.edges);
    a.params.threads = g_threads;
    Clustering c = mcl::cluster(loaded.graph, a.params);
    c.provenance.dataset_label = a.edges.stem().string();
    write_clustering(c, loaded.graph, a.out);
    if (a.provenance) write_provenance(c.provenance, c.size(), *a.provenance);
    std::cout << c.size() << " clusters in " << c.provenance.iterations << " iterations"
              << (c.provenance.converged ? "" : " (not converged)") << "\n";
    return 0;
}

struct MkkmArgs {
    fs::path edges;
    fs::path out;
    std::optional<fs::path> provenance;
    std::string k = "auto";
    std::optional<fs::path> mcl_clustering;
    mkkm::Params params;
};

int run_mkkm(MkkmArgs a) {
    auto loaded = load_edges(a.edges);
    if (a.k == "auto") {
        if (!a.mcl_clustering) throw ValidationError("--k auto needs --mcl <clustering.tsv>");
        a.params.k = mkkm::choose_k(read_clustering(*a.mcl_clustering, loaded.graph));
    } else {
        std::size_t k = 0;
        try {
            k = std::stoul(a.k);
        } catch (const std::exception&) {
            throw ValidationError("--k must be a positive integer or 'auto'");
        }
        if (k == 0) throw ValidationError("--k must be a positive integer or 'auto'");
        a.params.k = k;
    }
    Clustering c = mkkm::cluster(loaded.graph, a.params);
    c.provenance.dataset_label = a.edges.stem().string();
    write_clustering(c, loaded.graph, a.out);
    if (a.provenance) write_provenance(c.provenance, c.size(), *a.provenance);
    std::cout << c.size() << " clusters (k = " << a.params.k << ")\n";
    return 0;
}

struct MetricsArgs {
    fs::path edges;
    fs::path clustering;
    fs::path out;
};

int run_metrics(const MetricsArgs& a) {
    auto loaded = load_edges(a.edges);
    auto table = metrics_table(loaded.graph, read_clustering(a.clustering, loaded.graph));
    write_metrics_csv(table, a.out);
    std::cout << table.summary.cluster_count << " clusters, mean conductance "
              << table.summary.mean_conductance << "\n";
    return 0;
}

struct CoherenceArgs {
    fs::path edges;
    fs::path clustering;
    fs::path metadata;
    std::optional<fs::path> corpus;
    std::optional<fs::path> stoplist;
    fs::path out;
    CoherenceSettings settings;
};

int run_coherence(const CoherenceArgs& a) {
    auto loaded = load_edges(a.edges);
    Clustering c = read_clustering(a.clustering, loaded.graph);
    auto records = load_metadata(a.corpus.value_or(a.metadata));
    const auto stop = a.stoplist ? text::StopList::load(*a.stoplist) : text::StopList::defaults();
    Corpus corpus = Corpus::build(records, stop);
    BaselineCache cache;
    auto rows = coherence_table(c, loaded.graph, corpus, cache, a.settings, g_threads);
    write_coherence_csv(rows, a.out);
    std::size_t ok = 0;
    for (const auto& r : rows) ok += (r.status == CoherenceStatus::Ok);
    std::cout << ok << " of " << rows.size() << " clusters scored\n";
    return 0;
}

struct MatchArgs {
    fs::path source;
    std::vector<fs::path> targets;
    fs::path out;
};

int run_match(const MatchArgs& a) {
    PubClustering source = read_pub_clustering(a.source, a.source.stem().string());
    std::vector<PubClustering> targets;
    for (const auto& t : a.targets) targets.push_back(read_pub_clustering(t, t.stem().string()));
    auto matches = match_all(source, targets);
    write_matches_csv(matches, a.out);
    std::size_t high = 0;
    for (const auto& m : matches) high += (m.jaccard > 0.9);
    std::cout << matches.size() << " source clusters, " << high << " with Jaccard > 0.9\n";
    return 0;
}

struct ShuffleArgs {
    fs::path edges;
    std::optional<std::size_t> swaps;
    std::uint64_t seed = 1;
    std::optional<fs::path> out;
    std::optional<fs::path> report;
};

int run_shuffle(const ShuffleArgs& a) {
    auto loaded = load_edges(a.edges);
    const std::size_t swaps = a.swaps.value_or(10 * loaded.graph.edge_count());
    auto result = shuffle_citations(loaded.graph, swaps, a.seed);
    if (a.out) write_edges(result.graph, *a.out);
    if (a.report) write_shuffle_report(result.report, *a.report);
    std::cout << shuffle_report_json(result.report);
    return 0;
}

struct CommunitiesArgs {
    fs::path edges;
    std::optional<fs::path> metadata;
    fs::path clustering;
    std::vector<ClusterId> clusters;
    fs::path out;
    std::optional<fs::path> rejected;
    std::optional<fs::path> author_distribution;
    EdgeCaseThresholds thresholds;
};

int run_communities(const CommunitiesArgs& a) {
    Dataset d = load_dataset(a.edges.stem().string(), a.edges, a.metadata);
    Clustering c = read_clustering(a.clustering, d.graph);
    std::vector<ClusterId> ids = a.clusters;
    if (ids.empty()) {
        for (ClusterId i = 0; i < c.size(); ++i) ids.push_back(i);
    }
    std::vector<CommunityProfile> profiles;
    std::vector<EdgeCaseLabel> labels;
    for (ClusterId id : ids) {
        if (id >= c.size()) throw ValidationError("no cluster " + std::to_string(id));
        profiles.push_back(build_profile(id, c.clusters[id], d));
        labels.push_back(classify_edge_case(c.clusters[id], d.graph, a.thresholds));
    }
    auto filtered = filter_communities(profiles, labels);
    write_profiles_jsonl(filtered.accepted, a.out);
    if (a.rejected) {
        std::string text = "cluster_id,kind,size,external_edges,hub,hub_links\n";
        for (const auto& r : filtered.rejected) {
            text += std::to_string(r.profile.cluster_id) + ',' + std::string(to_string(r.label.kind)) +
                    ',' + std::to_string(r.label.size) + ',' +
                    std::to_string(r.label.external_edges) + ',' +
                    (r.label.hub ? d.graph.id(*r.label.hub) : std::string()) + ',' +
                    std::to_string(r.label.hub_links) + '\n';
        }
        write_text(*a.rejected, text);
    }
    if (a.author_distribution) {
        write_author_distribution(author_cluster_distribution(c, d.records), *a.author_distribution);
    }
    std::cout << filtered.accepted.size() << " accepted, " << filtered.rejected.size()
              << " rejected\n";
    return 0;
}

struct PipelineArgs {
    fs::path config;
    std::optional<fs::path> output_dir;
};

int run_pipeline_cmd(const PipelineArgs& a) {
    pipeline::Config config;
    try {
        config = pipeline::load_config(a.config);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return pipeline::kExitValidation;
    }
    if (a.output_dir) config.output_dir = *a.output_dir;
    config.threads = std::min(config.threads, g_threads);
    auto result = pipeline::run_pipeline(config);
    if (result.failure) {
        if (result.exit_code == pipeline::kExitValidation) {
            std::cerr << "validation error: " << result.failure->cause << "\n";
        } else {
            std::cerr << "stage '" << result.failure->stage << "' failed: " << result.failure->cause
                      << "\n";
        }
        return result.exit_code;
    }
    std::cout << result.artifacts.size() << " artifacts, " << result.accepted_communities
              << " communities accepted; manifest " << result.manifest.string() << "\n";
    return result.exit_code;
}

struct SynthArgs {
    std::size_t blocks = 2;
    std::size_t block_size = 30;
    double p_in = 0.5;
    double p_out = 0.01;
    std::uint64_t seed = 1;
    std::string slice = "2000";
    fs::path out_dir;
    synthetic::TextParams text;
};

int run_synth(const SynthArgs& a) {
    auto planted = synthetic::planted_partition(a.blocks, a.block_size, a.p_in, a.p_out, a.seed);
    auto records = synthetic::topic_records(planted.graph, planted.truth, a.text,
                                            a.seed ^ 0x5eedULL, a.slice);
    write_edges(planted.graph, a.out_dir / "edges.tsv");
    write_metadata(records, a.out_dir / "metadata.jsonl");
    std::string truth;
    for (NodeId u = 0; u < planted.graph.node_count(); ++u) {
        truth += std::to_string(planted.truth[u]) + '\t' + planted.graph.id(u) + '\n';
    }
    write_text(a.out_dir / "truth.tsv", truth);
    std::cout << planted.graph.node_count() << " nodes, " << planted.graph.edge_count()
              << " edges\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Citation-cluster and author-community analysis"};
    app.require_subcommand(1);
    app.add_option("--threads", g_threads, "Worker thread cap for every stage")
        ->check(CLI::PositiveNumber);

    IngestArgs ingest;
    auto* ing = app.add_subcommand("ingest", "Normalize an edge list and metadata into a dataset");
    ing->add_option("--label", ingest.label, "Dataset label");
    ing->add_option("--edges", ingest.edges, "citing<TAB>cited edge list")->required()->check(CLI::ExistingFile);
    ing->add_option("--metadata", ingest.metadata, "JSON-lines records")->check(CLI::ExistingFile);
    ing->add_option("--out-dir", ingest.out_dir, "Output directory")->required();

    MclArgs mcl_args;
    auto* mc = app.add_subcommand("cluster-mcl", "Markov clustering");
    mc->add_option("--edges", mcl_args.edges)->required()->check(CLI::ExistingFile);
    mc->add_option("--out", mcl_args.out, "Clustering TSV")->required();
    mc->add_option("--provenance", mcl_args.provenance, "Provenance JSON sidecar");
    mc->add_option("--inflation", mcl_args.params.inflation, "Inflation exponent")->capture_default_str();
    mc->add_option("--expansion", mcl_args.params.expansion, "Expansion power")->capture_default_str();
    mc->add_option("--prune", mcl_args.params.prune_threshold)->capture_default_str();
    mc->add_option("--max-iterations", mcl_args.params.max_iterations)->capture_default_str();
    mc->add_option("--epsilon", mcl_args.params.convergence_epsilon)->capture_default_str();

    MkkmArgs mkkm_args;
    auto* mk = app.add_subcommand("cluster-mkkm", "Multilevel kernel k-means (normalized cut)");
    mk->add_option("--edges", mkkm_args.edges)->required()->check(CLI::ExistingFile);
    mk->add_option("--out", mkkm_args.out, "Clustering TSV")->required();
    mk->add_option("--provenance", mkkm_args.provenance, "Provenance JSON sidecar");
    mk->add_option("--k", mkkm_args.k, "Cluster count or 'auto'")->capture_default_str();
    mk->add_option("--mcl", mkkm_args.mcl_clustering, "MCL clustering used by --k auto")
        ->check(CLI::ExistingFile);
    mk->add_option("--seed", mkkm_args.params.seed)->capture_default_str();
    mk->add_option("--coarsen-until", mkkm_args.params.coarsen_until);
    mk->add_option("--refine-iterations", mkkm_args.params.refine_iterations)->capture_default_str();

    MetricsArgs metrics_args;
    auto* me = app.add_subcommand("metrics", "Per-cluster conductance and edge counts");
    me->add_option("--edges", metrics_args.edges)->required()->check(CLI::ExistingFile);
    me->add_option("--clustering", metrics_args.clustering)->required()->check(CLI::ExistingFile);
    me->add_option("--out", metrics_args.out)->required();

    CoherenceArgs coh;
    auto* co = app.add_subcommand("coherence", "Textual coherence against random baselines");
    co->add_option("--edges", coh.edges)->required()->check(CLI::ExistingFile);
    co->add_option("--clustering", coh.clustering)->required()->check(CLI::ExistingFile);
    co->add_option("--metadata", coh.metadata, "Records of the clustered graph")
        ->required()
        ->check(CLI::ExistingFile);
    co->add_option("--corpus", coh.corpus, "Records used for random baselines (default: --metadata)")
        ->check(CLI::ExistingFile);
    co->add_option("--stoplist", coh.stoplist)->check(CLI::ExistingFile);
    co->add_option("--reps", coh.settings.reps)->capture_default_str();
    co->add_option("--seed", coh.settings.seed)->capture_default_str();
    co->add_option("--min-articles", coh.settings.min_articles_exclusive)->capture_default_str();
    co->add_option("--out", coh.out)->required();

    MatchArgs match_args;
    auto* ma = app.add_subcommand("match", "Best-match each source cluster against targets");
    ma->add_option("--source", match_args.source)->required()->check(CLI::ExistingFile);
    ma->add_option("--target", match_args.targets, "Target clustering (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    ma->add_option("--out", match_args.out)->required();

    ShuffleArgs shuffle_args;
    auto* sh = app.add_subcommand("shuffle", "Degree-preserving citation shuffle");
    sh->add_option("--edges", shuffle_args.edges)->required()->check(CLI::ExistingFile);
    sh->add_option("--swaps", shuffle_args.swaps, "Swap attempts (default 10 x edges)");
    sh->add_option("--seed", shuffle_args.seed)->capture_default_str();
    sh->add_option("--out", shuffle_args.out, "Shuffled edge list");
    sh->add_option("--report", shuffle_args.report, "Report JSON path");

    CommunitiesArgs comm;
    auto* cm = app.add_subcommand("communities", "Author profiles and edge-case filtering");
    cm->add_option("--edges", comm.edges)->required()->check(CLI::ExistingFile);
    cm->add_option("--metadata", comm.metadata)->check(CLI::ExistingFile);
    cm->add_option("--clustering", comm.clustering)->required()->check(CLI::ExistingFile);
    cm->add_option("--cluster", comm.clusters, "Cluster id to profile (repeatable; default all)");
    cm->add_option("--out", comm.out, "Accepted profiles (JSON lines)")->required();
    cm->add_option("--rejected", comm.rejected, "Rejected clusters CSV");
    cm->add_option("--author-distribution", comm.author_distribution, "Author summary JSON");
    cm->add_option("--external-threshold", comm.thresholds.external_threshold)->capture_default_str();
    cm->add_option("--hub-fraction", comm.thresholds.hub_fraction)->capture_default_str();

    PipelineArgs pipe;
    auto* pi = app.add_subcommand("pipeline", "Run every stage from a config file");
    pi->add_option("--config", pipe.config)->required();
    pi->add_option("--output-dir", pipe.output_dir, "Overrides the configured output directory");

    fs::path report_dir;
    auto* re = app.add_subcommand("report", "Rebuild summary tables from a pipeline run");
    re->add_option("--dir", report_dir, "Pipeline output directory")->required();

    SynthArgs synth;
    auto* sy = app.add_subcommand("synth", "Generate a planted-partition dataset with topic text");
    sy->add_option("--blocks", synth.blocks)->capture_default_str();
    sy->add_option("--block-size", synth.block_size)->capture_default_str();
    sy->add_option("--p-in", synth.p_in)->capture_default_str();
    sy->add_option("--p-out", synth.p_out)->capture_default_str();
    sy->add_option("--seed", synth.seed)->capture_default_str();
    sy->add_option("--slice", synth.slice)->capture_default_str();
    sy->add_option("--missing-text", synth.text.missing_text)->capture_default_str();
    sy->add_option("--out-dir", synth.out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pipeline::kExitValidation;
    }

    try {
        if (*ing) return run_ingest(ingest);
        if (*mc) return run_mcl(mcl_args);
        if (*mk) return run_mkkm(mkkm_args);
        if (*me) return run_metrics(metrics_args);
        if (*co) return run_coherence(coh);
        if (*ma) return run_match(match_args);
        if (*sh) return run_shuffle(shuffle_args);
        if (*cm) return run_communities(comm);
        if (*pi) return run_pipeline_cmd(pipe);
        if (*re) {
            pipeline::report_tables(report_dir);
            return 0;
        }
        if (*sy) return run_synth(synth);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return pipeline::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pipeline::kExitStageFailure;
    }
    return 0;
}
