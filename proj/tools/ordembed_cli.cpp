// Command-line driver: sample clouds, build comparison designs, run
// embedders, evaluate alignment, and reproduce the rate and lemma
// experiments.  Exit codes: 0 = all gated checks pass, 1 = check failure,
// 2 = usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "ordembed/ordembed.hpp"

using namespace ordembed;

namespace {

DomainSpec domain_from_args(const std::string& domain_json, int unit_ball_dim) {
    if (!domain_json.empty()) {
        Json j = Json::parse(read_file(domain_json));
        if (j.contains("domain")) j = j["domain"];
        return domain_from_json(j);
    }
    return DomainSpec({Ball{Vec::Zero(unit_ball_dim), 1.0}});
}

std::shared_ptr<DissimilarityOracle> oracle_from_cloud(const std::string& cloud_path,
                                                       const std::string& transform) {
    Json j = Json::parse(read_file(cloud_path));
    PointCloud cloud = cloud_from_json(j);
    MonotoneTransform g = MonotoneTransform::identity();
    if (transform == "square") g = MonotoneTransform::square();
    else if (transform == "log1p") g = MonotoneTransform::log1p();
    else if (!transform.empty() && transform != "identity")
        throw ConfigError("unknown transform: " + transform);
    return std::make_shared<DissimilarityOracle>(std::move(cloud), g);
}

ComparisonSet design_from_args(std::shared_ptr<DissimilarityOracle> oracle,
                               const std::string& kind, double r, int k, int ell) {
    if (kind == "quadruple") return design_quadruple(oracle);
    if (kind == "triple") return design_triple(oracle);
    if (kind == "local") {
        if (r > 0.0) return design_local(oracle, r);
        if (k > 0) return design_local_knn(oracle, k);
        throw ConfigError("local design needs --r or --K");
    }
    if (kind == "landmark-triple" || kind == "landmark-quadruple") {
        if (ell < 1) throw ConfigError("landmark design needs --ell");
        std::vector<int> idx(static_cast<std::size_t>(ell));
        std::iota(idx.begin(), idx.end(), 0);
        return design_landmark(oracle, LandmarkIndex::of(idx, oracle->n()),
                               kind == "landmark-quadruple");
    }
    throw ConfigError("unknown design kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordinal embedding from distance comparisons"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "sample a point cloud from a ball-union domain");
    std::string gen_domain, gen_out = "cloud.json";
    int gen_dim = 2, gen_n = 100;
    std::uint64_t gen_seed = 1;
    gen->add_option("--domain", gen_domain, "domain JSON file (defaults to the unit ball)");
    gen->add_option("--dim", gen_dim, "dimension of the default unit-ball domain");
    gen->add_option("--n", gen_n, "number of points")->required();
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output cloud JSON");

    // design
    auto* des = app.add_subcommand("design", "build a comparison design and export or summarize it");
    std::string des_cloud, des_kind = "quadruple", des_out, des_transform;
    double des_r = 0.0;
    int des_k = 0, des_ell = 0;
    des->add_option("--cloud", des_cloud, "cloud JSON")->required();
    des->add_option("--kind", des_kind, "quadruple|triple|local|landmark-triple|landmark-quadruple");
    des->add_option("--r", des_r, "locality radius (ambient units)");
    des->add_option("--K", des_k, "locality neighbor count");
    des->add_option("--ell", des_ell, "landmark count (first ell items)");
    des->add_option("--transform", des_transform, "identity|square|log1p");
    des->add_option("--out", des_out, "materialized CSV output (guarded to small n)");

    // embed
    auto* emb = app.add_subcommand("embed", "run an embedder on a design");
    std::string emb_cloud, emb_kind = "quadruple", emb_embedder = "refine", emb_out = "embedding.json";
    std::string emb_format = "json", emb_transform;
    double emb_r = 0.0;
    int emb_k = 0, emb_ell = 0, emb_d = 2;
    std::uint64_t emb_seed = 1, emb_draws = 10000000;
    emb->add_option("--cloud", emb_cloud, "cloud JSON")->required();
    emb->add_option("--kind", emb_kind, "design kind");
    emb->add_option("--r", emb_r, "locality radius");
    emb->add_option("--K", emb_k, "locality neighbor count");
    emb->add_option("--ell", emb_ell, "landmark count");
    emb->add_option("--transform", emb_transform, "identity|square|log1p");
    emb->add_option("--embedder", emb_embedder, "refine|rejection|landmark");
    emb->add_option("--d", emb_d, "embedding dimension");
    emb->add_option("--seed", emb_seed, "RNG seed");
    emb->add_option("--max-draws", emb_draws, "draw budget for the rejection embedder");
    emb->add_option("--out", emb_out, "output path");
    emb->add_option("--format", emb_format, "json|csv");

    // eval
    auto* ev = app.add_subcommand("eval", "verify an embedding against a design and align to truth");
    std::string ev_cloud, ev_embedding, ev_kind = "quadruple", ev_out, ev_transform;
    double ev_r = 0.0, ev_core_h = 0.0;
    int ev_k = 0, ev_ell = 0;
    ev->add_option("--cloud", ev_cloud, "truth cloud JSON")->required();
    ev->add_option("--embedding", ev_embedding, "embedding JSON")->required();
    ev->add_option("--kind", ev_kind, "design kind");
    ev->add_option("--r", ev_r, "locality radius");
    ev->add_option("--K", ev_k, "locality neighbor count");
    ev->add_option("--ell", ev_ell, "landmark count");
    ev->add_option("--transform", ev_transform, "identity|square|log1p");
    ev->add_option("--core-h", ev_core_h, "restrict alignment to U^h (needs balls in the cloud JSON)");
    ev->add_option("--out", ev_out, "write the JSON report here instead of stdout");

    // rates
    auto* rt = app.add_subcommand("rates", "run a rate experiment from a config");
    std::string rt_config, rt_out;
    std::uint64_t rt_seed = 0;
    bool rt_have_seed = false;
    rt->add_option("--config", rt_config, "experiment config JSON")->required();
    rt->add_option("--out", rt_out, "output directory (overrides config)");
    rt->add_option("--seed", rt_seed, "master seed override")->each([&](const std::string&) {
        rt_have_seed = true;
    });

    // lemmas
    auto* lm = app.add_subcommand("lemmas", "run the lemma certification suite");
    std::uint64_t lm_seed = 1;
    std::vector<int> lm_sizes{100};
    std::string lm_format = "table", lm_out;
    lm->add_option("--seed", lm_seed, "RNG seed");
    lm->add_option("--sizes", lm_sizes, "instance sizes");
    lm->add_option("--format", lm_format, "table|json|csv");
    lm->add_option("--out", lm_out, "write the report here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            DomainSpec dom = domain_from_args(gen_domain, gen_dim);
            PointCloud cloud = sample_domain(dom, static_cast<std::size_t>(gen_n), gen_seed);
            write_file(gen_out, cloud_to_json(cloud, &dom).dump(2) + "\n");
            std::printf("wrote %s (n=%d, dim=%d)\n", gen_out.c_str(), gen_n, cloud.dim);
            return 0;
        }
        if (des->parsed()) {
            auto oracle = oracle_from_cloud(des_cloud, des_transform);
            auto cset = design_from_args(oracle, des_kind, des_r, des_k, des_ell);
            if (!des_out.empty()) {
                write_file(des_out, comparisons_to_csv(cset.materialize()));
                std::printf("wrote %s\n", des_out.c_str());
            } else {
                Json j;
                j["n"] = cset.n();
                j["kind"] = des_kind;
                j["query_budget"] = cset.query_budget();
                if (cset.n() <= ComparisonSet::kMaterializeGuard)
                    j["asserted"] = cset.materialize().size();
                std::printf("%s\n", j.dump(2).c_str());
            }
            return 0;
        }
        if (emb->parsed()) {
            auto oracle = oracle_from_cloud(emb_cloud, emb_transform);
            auto cset = design_from_args(oracle, emb_kind, emb_r, emb_k, emb_ell);
            Embedding embedding;
            EmbedReport rep;
            if (emb_embedder == "refine") {
                auto warm = rank_mds_init(cset, emb_d);
                std::tie(embedding, rep) = refine_embed(cset, emb_d, emb_seed, warm);
            } else if (emb_embedder == "rejection") {
                std::tie(embedding, rep) = exact_rejection_embed(cset, emb_d, emb_seed, emb_draws);
            } else if (emb_embedder == "landmark") {
                std::tie(embedding, rep) = landmark_embed(cset, emb_d, emb_seed, Stage1::Refine);
            } else {
                throw ConfigError("unknown embedder: " + emb_embedder);
            }
            if (emb_format == "csv")
                write_file(emb_out, embedding_to_csv(embedding));
            else
                write_file(emb_out, embedding_to_json(embedding).dump(2) + "\n");
            std::printf("wrote %s (violations=%llu, iterations=%llu, wall=%.2fs)\n", emb_out.c_str(),
                        static_cast<unsigned long long>(rep.violations),
                        static_cast<unsigned long long>(rep.iterations), rep.wall_time);
            return rep.violations == 0 ? 0 : 1;
        }
        if (ev->parsed()) {
            Json cj = Json::parse(read_file(ev_cloud));
            PointCloud cloud = cloud_from_json(cj);
            auto oracle = std::make_shared<DissimilarityOracle>(cloud);
            if (!ev_transform.empty() && ev_transform != "identity") {
                MonotoneTransform g = ev_transform == "square" ? MonotoneTransform::square()
                                                               : MonotoneTransform::log1p();
                oracle = std::make_shared<DissimilarityOracle>(cloud, g);
            }
            auto cset = design_from_args(oracle, ev_kind, ev_r, ev_k, ev_ell);
            Embedding embedding = embedding_from_json(Json::parse(read_file(ev_embedding)));
            Json rep;
            const bool exact = embedding_is_exact(embedding, cset);
            rep["exact"] = exact;
            if (cset.n() <= ComparisonSet::kMaterializeGuard)
                rep["violations"] = verify_embedding(embedding, cset).violations;
            else
                rep["violations_sampled"] =
                    verify_embedding(embedding, cset, VerifyMode::Sampled, 100000, 7).violations;
            std::vector<int> restrict_idx;
            if (ev_core_h > 0.0) {
                DomainSpec dom = domain_from_json(cj);
                for (std::size_t i = 0; i < cloud.points.size(); ++i)
                    if (dom.contains_in_core(cloud.points[i], ev_core_h))
                        restrict_idx.push_back(static_cast<int>(i));
            }
            auto align = alignment_error(embedding, cloud, restrict_idx);
            rep["sup_error"] = align.sup_error;
            rep["rms_error"] = align.rms_error;
            rep["scale_estimate"] = align.scale_estimate;
            const std::string text = rep.dump(2) + "\n";
            if (!ev_out.empty())
                write_file(ev_out, text);
            else
                std::fputs(text.c_str(), stdout);
            return exact ? 0 : 1;
        }
        if (rt->parsed()) {
            Json cj = Json::parse(read_file(rt_config));
            ExperimentConfig config = ExperimentConfig::parse(cj);
            if (rt_have_seed) config.master_seed = rt_seed;
            if (!rt_out.empty()) config.output_dir = rt_out;
            auto result = run_rate_experiment(config);
            emit_report(result, config.output_dir);
            Json summary = rates_summary_json(result);
            std::printf("%s\n", summary.dump(2).c_str());
            std::printf("wrote %s/rates.csv, summary.json, rates.svg\n", config.output_dir.c_str());
            return 0;
        }
        if (lm->parsed()) {
            auto results = run_lemma_suite(lm_seed, lm_sizes);
            bool all_pass = true;
            std::ostringstream table, csv;
            csv << "lemma,pass,applicable,slack,note\n";
            Json jarr = Json::array();
            for (const auto& r : results) {
                const char* status = !r.applicable ? "inapplicable" : (r.pass ? "pass" : "FAIL");
                table << r.name;
                for (std::size_t p = r.name.size(); p < 16; ++p) table << ' ';
                table << status;
                for (std::size_t p = std::string(status).size(); p < 14; ++p) table << ' ';
                table << "slack=" << format_double(r.slack);
                if (!r.note.empty()) table << "  (" << r.note << ")";
                table << "\n";
                csv << r.name << "," << (r.pass ? 1 : 0) << "," << (r.applicable ? 1 : 0) << ","
                    << format_double(r.slack) << "," << r.note << "\n";
                Json jr;
                jr["lemma"] = r.name;
                jr["pass"] = r.pass;
                jr["applicable"] = r.applicable;
                jr["slack"] = r.slack;
                jr["note"] = r.note;
                jarr.push_back(jr);
                if (r.applicable && !r.pass) all_pass = false;
            }
            std::string out_text;
            if (lm_format == "json") out_text = jarr.dump(2) + "\n";
            else if (lm_format == "csv") out_text = csv.str();
            else out_text = table.str();
            std::fputs(out_text.c_str(), stdout);
            if (!lm_out.empty()) write_file(lm_out, out_text);
            return all_pass ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
