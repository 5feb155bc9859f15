#include "legalir/miner.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {

std::size_t MiningConfig::default_k(int round) {
    switch (round) {
        case 1: return 35;
        case 2: return 20;
        case 3: return 15;
        default: throw Error(ErrorKind::kInvalidArgument, "mining round must be 1, 2 or 3");
    }
}

MiningConfig MiningConfig::for_round(int round) { return {round, default_k(round)}; }

MiningResult mine(const std::vector<QARecord>& qa, const Run& run, const MiningConfig& cfg) {
    MiningConfig::default_k(cfg.round);
    if (cfg.k == 0) throw Error(ErrorKind::kInvalidArgument, "negatives per query must be >= 1");

    std::vector<const QARecord*> order;
    order.reserve(qa.size());
    for (const auto& rec : qa) order.push_back(&rec);
    std::stable_sort(order.begin(), order.end(),
                     [](const QARecord* a, const QARecord* b) { return a->query_id < b->query_id; });

    MiningResult result;
    for (const auto* rec : order) {
        const auto* ranking = run.find(rec->query_id);
        if (ranking == nullptr) {
            throw Error(ErrorKind::kValidation, "query " + std::to_string(rec->query_id) + " is missing from the run");
        }
        const std::set<ArticleRef> gold(rec->relevant.begin(), rec->relevant.end());
        for (const auto& ref : rec->relevant) result.pairs.push_back({rec->query_id, rec->question, ref, 1});

        std::size_t taken = 0;
        std::set<ArticleRef> emitted;
        for (const auto& hit : ranking->hits) {
            if (taken == cfg.k) break;
            if (gold.contains(hit.ref) || !emitted.insert(hit.ref).second) continue;
            result.pairs.push_back({rec->query_id, rec->question, hit.ref, 0});
            ++taken;
        }
        if (taken < cfg.k) {
            result.warnings.push_back("query " + std::to_string(rec->query_id) + ": only " + std::to_string(taken) +
                                      " negative candidates available, wanted " + std::to_string(cfg.k));
        }
    }
    return result;
}

void export_pairs(const std::vector<TrainingPair>& pairs, const std::filesystem::path& path) {
    if (pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "no training pairs to export");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path.string(), "cannot open for writing");
    for (const auto& p : pairs) {
        nlohmann::ordered_json doc;
        doc["query_id"] = p.query_id;
        doc["question"] = p.question;
        doc["law_id"] = p.ref.law_id;
        doc["article_id"] = p.ref.article_id;
        doc["label"] = p.label;
        out << doc.dump() << '\n';
    }
    if (!out) throw io_error(path.string(), "write failed");
}

std::vector<TrainingPair> read_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open pair file");
    std::vector<TrainingPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            const auto doc = nlohmann::json::parse(line);
            TrainingPair p;
            p.query_id = doc.at("query_id").get<std::size_t>();
            p.question = doc.at("question").get<std::string>();
            p.ref = {doc.at("law_id").get<std::string>(), doc.at("article_id").get<std::string>()};
            p.label = doc.at("label").get<int>();
            pairs.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pairs;
}

}  // namespace legalir
