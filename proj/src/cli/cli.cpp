#include "bioace/cli/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bioace/core/corpus_io.hpp"
#include "bioace/core/validate.hpp"
#include "bioace/error.hpp"
#include "bioace/gateway/config.hpp"
#include "bioace/pipeline/pipelines.hpp"
#include "bioace/stats/report.hpp"
#include "bioace/stats/stats.hpp"
#include "bioace/util/text.hpp"

namespace bioace::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::string config;
    std::string cache_dir;
    std::uint64_t seed = 13;
    std::size_t max_in_flight = 0;
    std::string corpus = ".";
    std::string out = "out";
};

/// Per-file overrides of the corpus directory layout.
struct CorpusFiles {
    std::string questions, documents, runs, nuggets, judgments;
};

struct Session {
    gateway::GatewayConfig config;
    std::shared_ptr<gateway::ModelGateway> gateway;
    core::Corpus corpus;
    std::size_t workers = 4;

    pipeline::EvalContext context(std::uint64_t seed) { return {corpus, *gateway, config, seed, workers}; }
};

gateway::GatewayConfig make_config(const Globals& g) {
    auto config = g.config.empty() ? gateway::GatewayConfig::defaults() : gateway::load_gateway_config(g.config);
    if (g.config.empty()) gateway::apply_environment_overrides(config);
    if (!g.cache_dir.empty()) config.cache_dir = fs::path(g.cache_dir);
    if (g.max_in_flight > 0) {
        for (auto& [_, e] : config.endpoints) e.max_in_flight = g.max_in_flight;
    }
    return config;
}

core::Corpus load(const Globals& g, const CorpusFiles& files) {
    auto paths = core::CorpusPaths::in_directory(g.corpus);
    if (!files.questions.empty()) paths.questions = files.questions;
    if (!files.documents.empty()) paths.documents = files.documents;
    if (!files.runs.empty()) paths.runs = files.runs;
    if (!files.nuggets.empty()) paths.nuggets = files.nuggets;
    if (!files.judgments.empty()) paths.judgments = files.judgments;
    return core::load_corpus(paths);
}

Session open_session(const Globals& g, const CorpusFiles& files, bool need_corpus = true) {
    Session s;
    s.config = make_config(g);
    s.gateway = gateway::make_gateway(s.config);
    if (need_corpus) s.corpus = load(g, files);
    s.workers = g.max_in_flight > 0 ? g.max_in_flight : s.config.endpoint(gateway::Capability::generate).max_in_flight;
    return s;
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) fail(ErrorKind::IoError, "cannot write " + path.string());
}

void finish(const Session& s, const stats::EvalReport& report, const Globals& g, std::ostream& out,
            std::ostream& err) {
    stats::emit_report(report, g.out);
    const auto st = s.gateway->stats();
    err << "gateway: " << st.network_requests << " network requests, " << st.cache_hits << " cache hits\n";
    out << "wrote " << (fs::path(g.out) / "report.json").string() << "\n";
    for (const auto& row : report.summary)
        out << row.system << "\t" << row.metric << "\t" << text::format_real(row.value) << "\n";
}

/// system -> value for one metric of a summary.csv file.
std::map<std::string, double> read_metric(const fs::path& path, const std::string& metric) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::map<std::string, double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || text::is_blank(line)) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 3) throw MalformedRecordError(path.string(), line_no, "", "expected system,metric,value");
        if (cells[1] != metric) continue;
        try {
            values[cells[0]] = std::stod(cells[2]);
        } catch (const std::exception&) {
            throw MalformedRecordError(path.string(), line_no, "value", "not a number");
        }
    }
    if (values.empty()) fail(ErrorKind::EmptyInput, "no rows for metric '" + metric + "' in " + path.string());
    return values;
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');) {
        try {
            out.push_back(std::stoul(cell));
        } catch (const std::exception&) {
            fail(ErrorKind::PreconditionFailed, "bad k list entry '" + cell + "'");
        }
    }
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Biomedical answer and citation evaluation", "bioace"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Endpoint configuration (JSON)");
    app.add_option("--cache-dir", g.cache_dir, "Response cache directory");
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--max-in-flight", g.max_in_flight, "Concurrent requests per endpoint");
    app.add_option("--corpus", g.corpus, "Corpus directory")->capture_default_str();
    app.add_option("--out", g.out, "Output file or directory")->capture_default_str();

    CorpusFiles files;
    const auto corpus_options = [&](CLI::App* cmd) {
        cmd->add_option("--questions", files.questions, "questions.jsonl");
        cmd->add_option("--documents,--docs", files.documents, "documents.jsonl");
        cmd->add_option("--run", files.runs, "runs.jsonl");
    };

    std::function<void()> action;

    // index build
    auto* index = app.add_subcommand("index", "BM25 index over documents")->require_subcommand(1);
    auto* index_build = index->add_subcommand("build", "Build and save an index");
    std::string index_docs;
    index_build->add_option("--docs", index_docs, "documents.jsonl")->required();
    index_build->callback([&] {
        action = [&] {
            std::vector<retrieval::IndexUnit> units;
            for (const auto& d : core::load_documents(index_docs)) units.push_back({d.pmid, d.reference_text()});
            const auto idx = retrieval::build_index(units);
            const fs::path path = g.out == "out" ? fs::path("index.json") : fs::path(g.out);
            retrieval::save_index(idx, path);
            out << "indexed " << idx.doc_count() << " documents into " << path.string() << "\n";
        };
    });

    // validate
    auto* validate = app.add_subcommand("validate", "Check corpus invariants");
    corpus_options(validate);
    validate->add_option("--nuggets", files.nuggets, "nuggets.jsonl");
    validate->add_option("--judgments", files.judgments, "judgments.jsonl");
    int validate_status = 0;
    validate->callback([&] {
        action = [&] {
            const auto corpus = load(g, files);
            const auto violations = core::validate_corpus(corpus);
            for (const auto& v : violations) out << v.record_id << "\t" << v.rule << "\t" << v.message << "\n";
            out << violations.size() << " violation(s)\n";
            validate_status = violations.empty() ? 0 : 2;
        };
    });

    // prep
    auto* prep = app.add_subcommand("prep", "Prepare derived inputs")->require_subcommand(1);
    auto* prep_pairs = prep->add_subcommand("training-pairs", "Correct/incorrect sentence-fragment pairs (JSONL)");
    corpus_options(prep_pairs);
    prep_pairs->add_option("--judgments", files.judgments, "judgments.jsonl");
    correctness::FragmentOptions pair_fragments;
    prep_pairs->add_option("--window", pair_fragments.window)->capture_default_str();
    prep_pairs->add_option("--stride", pair_fragments.stride)->capture_default_str();
    prep_pairs->callback([&] {
        action = [&] {
            const auto corpus = load(g, files);
            const auto fi = correctness::build_fragment_index(corpus.documents, pair_fragments);
            const auto pairs = correctness::build_training_pairs(corpus, fi);
            std::string body;
            for (const auto& p : pairs) {
                body += json{{"sentence_id", p.sentence_id},
                             {"sentence", p.sentence},
                             {"fragment", p.fragment},
                             {"pmid", p.pmid},
                             {"start_sentence", p.start_sentence},
                             {"end_sentence", p.end_sentence},
                             {"label", p.label == correctness::PairLabel::correct ? "correct" : "incorrect"},
                             {"provenance", p.provenance == correctness::PairProvenance::annotated_span
                                                ? "annotated_span"
                                                : "bm25_negative"}}
                            .dump() +
                        "\n";
            }
            const fs::path path = g.out == "out" ? fs::path("training_pairs.jsonl") : fs::path(g.out);
            write_text(path, body);
            out << "wrote " << pairs.size() << " pairs to " << path.string() << "\n";
        };
    });

    auto* prep_nuggets = prep->add_subcommand("nuggets", "Extract system nuggets; writes a corpus directory");
    corpus_options(prep_nuggets);
    prep_nuggets->add_option("--gold", files.nuggets, "nuggets.jsonl");
    prep_nuggets->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            auto corpus = s.corpus;
            corpus.nuggets = pipeline::prepare_nuggets(s.context(g.seed));
            corpus.reindex();
            core::save_corpus(corpus, g.out);
            out << "wrote " << corpus.nuggets.size() << " nuggets into " << g.out << "\n";
        };
    });

    // eval
    auto* eval = app.add_subcommand("eval", "Run an evaluation")->require_subcommand(1);
    std::string embed_model, gen_model;

    auto* eval_nuggets = eval->add_subcommand("nuggets", "Nugget precision / recall / F1");
    corpus_options(eval_nuggets);
    eval_nuggets->add_option("--gold", files.nuggets, "nuggets.jsonl");
    eval_nuggets->add_option("--embed-model", embed_model, "Embedding model id");
    eval_nuggets->add_option("--gen-model", gen_model, "Generation model id (nugget extraction)");
    std::string nugget_threshold;
    bool one_to_one = false;
    eval_nuggets->add_option("--threshold", nugget_threshold, "Probability threshold or 'auto'");
    eval_nuggets->add_flag("--one-to-one", one_to_one, "Greedy one-to-one matching");
    eval_nuggets->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            if (!embed_model.empty()) s.config.endpoints[gateway::Capability::embed].model_id = embed_model;
            if (!gen_model.empty()) s.config.endpoints[gateway::Capability::generate].model_id = gen_model;
            pipeline::NuggetEvalOptions o;
            if (nugget_threshold == "auto") {
                o.auto_threshold = true;
            } else if (!nugget_threshold.empty()) {
                try {
                    o.threshold = std::stod(nugget_threshold);
                } catch (const std::exception&) {
                    fail(ErrorKind::PreconditionFailed, "--threshold takes a number or 'auto'");
                }
            }
            if (one_to_one) o.align.mode = nugget::MatchingMode::greedy_one_to_one;
            finish(s, pipeline::eval_nuggets(s.context(g.seed), o), g, out, err);
        };
    });

    auto* eval_completeness = eval->add_subcommand("completeness", "Relevance labels and completeness");
    corpus_options(eval_completeness);
    eval_completeness->add_option("--gold", files.judgments, "judgments.jsonl");
    eval_completeness->add_option("--gen-model", gen_model, "Generation model id");
    eval_completeness->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            if (!gen_model.empty()) s.config.endpoints[gateway::Capability::generate].model_id = gen_model;
            finish(s, pipeline::eval_completeness(s.context(g.seed)), g, out, err);
        };
    });

    auto* eval_correctness = eval->add_subcommand("correctness", "Answer-sentence correctness");
    corpus_options(eval_correctness);
    eval_correctness->add_option("--gold", files.judgments, "judgments.jsonl");
    pipeline::CorrectnessOptions co;
    std::string mode = "classify", judge = "gen", negative = "documents", index_path, k_list;
    eval_correctness->add_option("--mode", mode)->check(CLI::IsMember({"classify", "simnli", "topk"}))->capture_default_str();
    eval_correctness->add_option("--judge", judge)->check(CLI::IsMember({"gen", "nli", "cosine"}))->capture_default_str();
    eval_correctness->add_option("--threshold", co.judge_threshold, "NLI / cosine judge threshold")->capture_default_str();
    eval_correctness->add_option("--window", co.fragments.window)->capture_default_str();
    eval_correctness->add_option("--stride", co.fragments.stride)->capture_default_str();
    eval_correctness->add_flag("--supported-only", co.supported_only, "Judge only gold-supporting documents");
    eval_correctness->add_flag("--deterministic-deciding", co.deterministic_deciding, "Judge every fragment");
    eval_correctness->add_option("--negative", negative, "simnli negative reading")
        ->check(CLI::IsMember({"documents", "sentence"}))
        ->capture_default_str();
    eval_correctness->add_option("--index", index_path, "Prebuilt BM25 index (topk)");
    eval_correctness->add_option("--k-list", k_list, "Comma-separated k values (topk)");
    eval_correctness->add_option("--retrieve", co.topk.retrieve, "BM25 depth before reranking (topk)")
        ->capture_default_str();
    eval_correctness->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            co.mode = mode == "simnli" ? pipeline::CorrectnessMode::simnli
                      : mode == "topk" ? pipeline::CorrectnessMode::topk
                                       : pipeline::CorrectnessMode::classify;
            co.judge = judge == "nli" ? pipeline::JudgeKind::nli
                       : judge == "cosine" ? pipeline::JudgeKind::cosine
                                           : pipeline::JudgeKind::gen;
            co.negative = negative == "sentence" ? correctness::NegativeReading::sampled_sentence
                                                 : correctness::NegativeReading::sampled_documents;
            if (!index_path.empty()) co.index = retrieval::load_index(index_path);
            if (!k_list.empty()) co.topk.k_list = parse_k_list(k_list);
            finish(s, pipeline::eval_correctness(s.context(g.seed), co), g, out, err);
        };
    });

    auto* eval_citations = eval->add_subcommand("citations", "Citation attribution");
    corpus_options(eval_citations);
    eval_citations->add_option("--gold", files.judgments, "judgments.jsonl");
    pipeline::CitationOptions cit;
    std::string setting = "doc", scheme = "binary", cjudge = "gen", fit_train;
    double score_threshold = 0.0;
    eval_citations->add_option("--setting", setting)->check(CLI::IsMember({"doc", "maxsim", "nuggets"}))->capture_default_str();
    eval_citations->add_option("--scheme", scheme)->check(CLI::IsMember({"binary", "ternary"}))->capture_default_str();
    eval_citations->add_option("--judge", cjudge)
        ->check(CLI::IsMember({"gen", "score", "pairwise-oracle"}))
        ->capture_default_str();
    auto* threshold_opt = eval_citations->add_option("--threshold", score_threshold, "Score-judge threshold");
    eval_citations->add_option("--fit-threshold", fit_train, "Fit the score threshold on this JSONL first");
    eval_citations->add_flag("--lenient-supports", cit.lenient_supports, "One supported answer nugget suffices");
    eval_citations->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            cit.setting = setting == "maxsim" ? pipeline::CitationSetting::maxsim
                          : setting == "nuggets" ? pipeline::CitationSetting::nuggets
                                                 : pipeline::CitationSetting::doc;
            cit.scheme = scheme == "ternary" ? citation::Scheme::ternary : citation::Scheme::binary;
            cit.judge = cjudge == "score" ? pipeline::CitationJudge::score
                        : cjudge == "pairwise-oracle" ? pipeline::CitationJudge::pairwise_oracle
                                                      : pipeline::CitationJudge::gen;
            if (*threshold_opt) cit.score_threshold = score_threshold;
            if (!fit_train.empty()) {
                const auto fit = pipeline::fit_score_threshold(s.context(g.seed), pipeline::load_score_examples(fit_train));
                err << "fitted score threshold " << text::format_real(fit.threshold) << " (F1 "
                    << text::format_real(fit.f1) << ")\n";
                cit.score_threshold = fit.threshold;
            }
            finish(s, pipeline::eval_citations(s.context(g.seed), cit), g, out, err);
        };
    });

    // fit
    auto* fit = app.add_subcommand("fit", "Fit thresholds")->require_subcommand(1);
    auto* fit_nugget = fit->add_subcommand("nugget-threshold", "Tune the nugget probability threshold");
    corpus_options(fit_nugget);
    fit_nugget->add_option("--gold", files.nuggets, "nuggets.jsonl");
    fit_nugget->add_option("--embed-model", embed_model, "Embedding model id");
    pipeline::NuggetEvalOptions tune;
    fit_nugget->add_option("--lo", tune.grid.lo)->capture_default_str();
    fit_nugget->add_option("--hi", tune.grid.hi)->capture_default_str();
    fit_nugget->add_option("--step", tune.grid.step)->capture_default_str();
    fit_nugget->add_option("--w-f1", tune.weights.f1)->capture_default_str();
    fit_nugget->add_option("--w-sim", tune.weights.similarity)->capture_default_str();
    fit_nugget->add_option("--w-count", tune.weights.alignments)->capture_default_str();
    fit_nugget->callback([&] {
        action = [&] {
            auto s = open_session(g, files);
            if (!embed_model.empty()) s.config.endpoints[gateway::Capability::embed].model_id = embed_model;
            const auto instances = pipeline::nugget_instances(s.context(g.seed), tune);
            const auto best = pipeline::tune_nugget_threshold(instances, tune);
            const json result{{"embed_model", s.config.endpoint(gateway::Capability::embed).model_id},
                              {"threshold", stats::real(best.threshold)},
                              {"avg_f1", stats::real(best.avg_f1)},
                              {"avg_similarity", stats::real(best.avg_similarity)},
                              {"avg_alignments", stats::real(best.avg_alignments)},
                              {"scalarized", stats::real(best.scalarized)}};
            out << result.dump(2) << "\n";
        };
    });

    auto* fit_score = fit->add_subcommand("score-threshold", "Fit a score-judge threshold for F1");
    std::string train_path;
    fit_score->add_option("--train", train_path, "JSONL of {claim, reference, label}")->required();
    fit_score->callback([&] {
        action = [&] {
            auto s = open_session(g, files, false);
            const auto best = pipeline::fit_score_threshold(s.context(g.seed), pipeline::load_score_examples(train_path));
            out << json{{"threshold", stats::real(best.threshold)}, {"f1", stats::real(best.f1)}}.dump(2) << "\n";
        };
    });

    // rank
    auto* rank = app.add_subcommand("rank", "Rank systems and correlate with a reference ranking");
    std::string metrics_path, metric, reference_path, reference_metric;
    rank->add_option("--metrics", metrics_path, "summary.csv")->required();
    rank->add_option("--metric", metric, "Metric to rank by")->required();
    rank->add_option("--reference", reference_path, "Reference summary.csv");
    rank->add_option("--reference-metric", reference_metric, "Reference metric (defaults to --metric)");
    rank->callback([&] {
        action = [&] {
            const auto values = read_metric(metrics_path, metric);
            const auto ranking = stats::rank_systems(values, metric);
            json result{{"metric", metric}, {"ranks", ranking.ranks}};
            if (!reference_path.empty()) {
                const auto ref = read_metric(reference_path, reference_metric.empty() ? metric : reference_metric);
                const auto c = stats::correlate_rankings(values, ref);
                result["correlation"] = {
                    {"spearman", stats::real(c.spearman)}, {"kendall", stats::real(c.kendall)}, {"n", c.n}};
            }
            out << result.dump(2) << "\n";
        };
    });

    // report
    auto* report = app.add_subcommand("report", "Re-emit report files from a report.json");
    std::string from;
    report->add_option("--from", from, "report.json")->required();
    report->callback([&] {
        action = [&] {
            std::ifstream in(from, std::ios::binary);
            if (!in) fail(ErrorKind::IoError, "cannot open " + from);
            std::stringstream buf;
            buf << in.rdbuf();
            stats::emit_report(stats::parse_report(buf.str()), g.out);
            out << "wrote report files into " << g.out << "\n";
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (action) action();
        return validate_status;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return is_endpoint_failure(e.kind()) ? 3 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace bioace::cli
