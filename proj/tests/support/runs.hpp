#pragma once

#include <string>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/run_file.hpp"

namespace testing_support {

inline legalir::ArticleRef ref(const std::string& article) { return {"L", article}; }

/// A ranking whose fused scores descend by 0.01 from 1.0 unless given.
inline legalir::QueryRanking ranking(std::size_t query_id, const std::vector<std::string>& articles,
                                     std::vector<double> scores = {}) {
    legalir::QueryRanking r;
    r.query_id = query_id;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        legalir::ScoredHit h;
        h.position = i;
        h.ref = ref(articles[i]);
        h.fused = i < scores.size() ? scores[i] : 1.0 - 0.01 * static_cast<double>(i);
        h.lexical = h.fused;
        r.hits.push_back(h);
    }
    return r;
}

inline legalir::QARecord qa(std::size_t query_id, const std::vector<std::string>& relevant) {
    legalir::QARecord rec;
    rec.query_id = query_id;
    rec.question = "câu hỏi " + std::to_string(query_id);
    for (const auto& a : relevant) rec.relevant.push_back(ref(a));
    return rec;
}

}  // namespace testing_support
