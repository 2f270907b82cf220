#include <lexgraph/config.hpp>
#include <lexgraph/metrics.hpp>
#include <lexgraph/pipeline.hpp>
#include <lexgraph/text.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

int runIngest(const std::string& graph, const std::string& terms, const std::string& templates,
              const std::string& embeddings) {
    lexgraph::pipeline::RunConfig cfg;
    cfg.graph_path = graph;
    cfg.terms_path = terms;
    cfg.templates_path = templates;
    if (!embeddings.empty()) {
        cfg.embeddings_path = embeddings;
    }
    auto rt = lexgraph::pipeline::ingestCorpus(cfg);
    std::cout << lexgraph::pipeline::ingestSummary(rt);
    auto violations = lexgraph::kg::validateGraph(rt.graph);
    for (const auto& v : violations) {
        std::cout << "violation: " << v.record << ": " << v.message << "\n";
    }
    std::cout << (violations.empty() ? "graph valid\n" : "graph INVALID\n");
    return violations.empty() ? 0 : 1;
}

std::vector<std::string> readLines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file '" + path + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

json metricOrNa(const std::optional<double>& v) {
    if (!v) {
        return "n/a";
    }
    return *v;
}

int runEval(const std::string& refs_path, const std::string& cands_path,
            const std::string& labels_path) {
    auto refs = readLines(refs_path);
    auto cands = readLines(cands_path);
    if (refs.size() != cands.size()) {
        throw std::runtime_error("refs and cands must have the same number of lines");
    }
    if (refs.empty()) {
        throw std::runtime_error("no reference lines");
    }

    lexgraph::metrics::EvalReport report;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        auto ref = lexgraph::tokenize(refs[i]);
        auto cand = lexgraph::tokenize(cands[i]);
        report.bleu_1 += lexgraph::metrics::bleuN(cand, ref, 1);
        report.bleu_2 += lexgraph::metrics::bleuN(cand, ref, 2);
        report.bleu_l += lexgraph::metrics::rougeL(cand, ref);
        report.rouge_1 += lexgraph::metrics::rougeN(cand, ref, 1);
        report.rouge_2 += lexgraph::metrics::rougeN(cand, ref, 2);
        report.rouge_l += lexgraph::metrics::rougeL(cand, ref);
    }
    const auto n = static_cast<double>(refs.size());
    for (double* v : {&report.bleu_1, &report.bleu_2, &report.bleu_l, &report.rouge_1,
                      &report.rouge_2, &report.rouge_l}) {
        *v /= n;
    }

    if (!labels_path.empty()) {
        lexgraph::metrics::ConfusionCounts counts;
        for (const auto& line : readLines(labels_path)) {
            if (line.empty() || line.front() == '#') {
                continue;
            }
            std::istringstream row(line);
            int gold = 0, pred = 0;
            if (!(row >> gold >> pred)) {
                throw std::runtime_error("labels line must be '<gold> <pred>' with 0/1 values");
            }
            if (gold == 1 && pred == 1) ++counts.tp;
            if (gold == 0 && pred == 1) ++counts.fp;
            if (gold == 0 && pred == 0) ++counts.tn;
            if (gold == 1 && pred == 0) ++counts.fn;
        }
        auto m = lexgraph::metrics::confusionMetrics(counts);
        report.sensitivity = m.sensitivity;
        report.specificity = m.specificity;
        report.precision = m.precision;
    }

    json out{{"bleu_1", report.bleu_1},
             {"bleu_2", report.bleu_2},
             {"bleu_l", report.bleu_l},
             {"rouge_1", report.rouge_1},
             {"rouge_2", report.rouge_2},
             {"rouge_l", report.rouge_l},
             {"sensitivity", metricOrNa(report.sensitivity)},
             {"specificity", metricOrNa(report.specificity)},
             {"precision", metricOrNa(report.precision)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct QueryOptions {
    std::string config_path;
    std::string mode = "complete";
    std::string disable;
    std::string out_path;
    std::string queries_path;
    bool trace = false;
    bool no_timing = false;
    int jobs = 1;
};

lexgraph::prompt::ToggleSet parseDisabled(const std::string& csv) {
    lexgraph::prompt::ToggleSet disabled;
    std::stringstream in(csv);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (part.empty()) {
            continue;
        }
        auto toggle = lexgraph::prompt::toggleFromName(part);
        if (!toggle) {
            throw std::runtime_error("unknown component toggle '" + part +
                                     "' (expected TD, KB, RG, DO, LCM, or SVM)");
        }
        disabled.insert(*toggle);
    }
    return disabled;
}

void writeReport(const lexgraph::pipeline::QueryReport& report, const QueryOptions& opts,
                 const std::string& out_path) {
    const std::string body = report.toJson(!opts.no_timing).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write report to '" + out_path + "'");
        }
        out << body;
    }
}

int runQueryCommand(const QueryOptions& opts, const std::string& query_text) {
    auto mode = lexgraph::prompt::modeFromName(opts.mode);
    if (!mode) {
        throw std::runtime_error("unknown mode '" + opts.mode + "'");
    }
    auto file = lexgraph::ConfigFile::load(opts.config_path);
    auto cfg = lexgraph::pipeline::resolveRunConfig(file, *mode, parseDisabled(opts.disable));
    auto rt = lexgraph::pipeline::ingestCorpus(cfg);

    std::ofstream trace_out;
    std::mutex trace_mutex;
    std::function<void(const std::string&, const std::string&)> trace_sink;
    if (opts.trace) {
        const std::string trace_path =
            opts.out_path.empty() ? "query.trace.json" : opts.out_path + ".trace.json";
        trace_out.open(trace_path, std::ios::binary);
        if (!trace_out) {
            throw std::runtime_error("cannot write trace to '" + trace_path + "'");
        }
        trace_sink = [&trace_out, &trace_mutex](const std::string& req, const std::string& res) {
            std::lock_guard<std::mutex> lock(trace_mutex);
            trace_out << json{{"request", req}, {"response", res}}.dump() << "\n";
        };
    }

    if (opts.queries_path.empty()) {
        auto provider = lexgraph::pipeline::makeProvider(cfg, trace_sink);
        auto report = lexgraph::pipeline::runQuery(query_text, rt, cfg, *provider);
        writeReport(report, opts, opts.out_path);
        return report.provider_error ? 1 : 0;
    }

    // Batch mode: one report per input line, fanned out over --jobs
    // threads. Every job gets its own provider so mock scripts replay
    // deterministically per query.
    auto queries = readLines(opts.queries_path);
    std::vector<int> status(queries.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= queries.size()) {
                return;
            }
            try {
                auto provider = lexgraph::pipeline::makeProvider(cfg, trace_sink);
                auto report = lexgraph::pipeline::runQuery(queries[i], rt, cfg, *provider);
                std::string path = opts.out_path.empty()
                                       ? "query-" + std::to_string(i + 1) + ".report.json"
                                       : opts.out_path + "." + std::to_string(i + 1) + ".json";
                writeReport(report, opts, path);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(trace_mutex);
                std::cerr << "query " << i + 1 << " failed: " << e.what() << "\n";
                status[i] = 1;
            }
        }
    };
    std::vector<std::thread> threads;
    const int jobs = std::max(1, opts.jobs);
    for (int t = 0; t < jobs; ++t) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    for (int s : status) {
        if (s != 0) {
            return 1;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexgraph: knowledge-graph backed legal prompt pipeline"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load and validate a corpus, print a summary");
    std::string graph_path, terms_path, templates_path, embeddings_path;
    ingest->add_option("--graph", graph_path, "concept/relation .kg.jsonl file")->required();
    ingest->add_option("--terms", terms_path, "term statistics .terms.tsv file")->required();
    ingest->add_option("--templates", templates_path, "task template .templates.json file")
        ->required();
    ingest->add_option("--embeddings", embeddings_path, "token vector .vectors.tsv file");

    // query
    auto* query = app.add_subcommand("query", "Run the full pipeline for one query");
    QueryOptions opts;
    std::string query_text;
    query->add_option("--config", opts.config_path, "run configuration file")->required();
    query->add_option("--mode", opts.mode, "baseline, traditional, or complete");
    query->add_option("--disable", opts.disable, "comma list of TD,KB,RG,DO,LCM,SVM to turn off");
    query->add_option("--out", opts.out_path, "write the report here instead of stdout");
    query->add_option("--queries", opts.queries_path, "file with one query per line (batch mode)");
    query->add_option("--jobs", opts.jobs, "concurrent sessions in batch mode");
    query->add_flag("--trace", opts.trace, "log provider request/response bodies");
    query->add_flag("--no-timing", opts.no_timing, "omit timing from the report");
    query->add_option("text", query_text, "the legal query");

    // eval
    auto* eval = app.add_subcommand("eval", "Text-quality metrics for candidate answers");
    std::string refs_path, cands_path, labels_path;
    eval->add_option("--refs", refs_path, "reference answers, one per line")->required();
    eval->add_option("--cands", cands_path, "candidate answers, one per line")->required();
    eval->add_option("--labels", labels_path, "'gold pred' 0/1 pairs for confusion metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            return runIngest(graph_path, terms_path, templates_path, embeddings_path);
        }
        if (query->parsed()) {
            if (query_text.empty() && opts.queries_path.empty()) {
                std::cerr << "error: empty query\n";
                return 2;
            }
            return runQueryCommand(opts, query_text);
        }
        if (eval->parsed()) {
            return runEval(refs_path, cands_path, labels_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
