#include "legalir/run_file.hpp"

#include <fstream>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir {

void Run::add(QueryRanking ranking) {
    if (index_.contains(ranking.query_id)) {
        throw Error(ErrorKind::kValidation, "duplicate query_id " + std::to_string(ranking.query_id) + " in run");
    }
    index_.emplace(ranking.query_id, rankings_.size());
    rankings_.push_back(std::move(ranking));
}

const QueryRanking* Run::find(std::size_t query_id) const {
    auto it = index_.find(query_id);
    return it == index_.end() ? nullptr : &rankings_[it->second];
}

void Run::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path.string(), "cannot open for writing");
    for (const auto& r : rankings_) {
        nlohmann::ordered_json doc;
        doc["query_id"] = r.query_id;
        auto& hits = doc["hits"] = nlohmann::ordered_json::array();
        for (const auto& h : r.hits) {
            hits.push_back({{"law_id", h.ref.law_id},
                            {"article_id", h.ref.article_id},
                            {"lexical", h.lexical},
                            {"semantic", h.semantic},
                            {"fused", h.fused}});
        }
        out << doc.dump() << '\n';
    }
    if (!out) throw io_error(path.string(), "write failed");
}

Run Run::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string(), "cannot open run file");
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto loc = path.string() + ":" + std::to_string(line_no);
        try {
            const auto doc = nlohmann::json::parse(line);
            QueryRanking r;
            r.query_id = doc.at("query_id").get<std::size_t>();
            for (const auto& h : doc.at("hits")) {
                ScoredHit hit;
                hit.ref.law_id = h.at("law_id").get<std::string>();
                hit.ref.article_id = h.at("article_id").get<std::string>();
                hit.lexical = h.at("lexical").get<double>();
                hit.semantic = h.at("semantic").get<double>();
                hit.fused = h.at("fused").get<double>();
                r.hits.push_back(std::move(hit));
            }
            run.add(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::kParse, loc + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), loc + ": " + e.what());
        }
    }
    return run;
}

}  // namespace legalir
