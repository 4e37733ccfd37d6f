#pragma once

#include "lexirag/pipeline.hpp"
#include "lexirag/qa.hpp"
#include "lexirag/ranked_list.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace lexirag::eval {

using Qrels = std::map<std::string, std::set<std::string>>;
using Run = std::map<std::string, RankedList>;

/// Each metric averages over the run's queries. Throws Error(invalid_argument)
/// for an empty run or a run query without qrels.
double mrr(const Run& run, const Qrels& qrels);
double map_metric(const Run& run, const Qrels& qrels);
double recall_at_k(const Run& run, const Qrels& qrels, std::size_t k);

struct RetrievalReport {
    double mrr = 0.0;
    double map = 0.0;
    double recall = 0.0;
    std::size_t k = 10;
    std::size_t queries = 0;
};

RetrievalReport evaluate_run(const Run& run, const Qrels& qrels, std::size_t k = 10);

/// TSV `query_id<TAB>doc_id`. Throws Error(format) naming the line.
Qrels read_qrels(std::istream& in);
/// TSV `query_id<TAB>doc_id<TAB>rank<TAB>score`; lists come back in rank order.
Run read_run(std::istream& in);
void write_run(std::ostream& out, const Run& run);

inline constexpr std::array<int, 5> kRubric = {0, 25, 50, 75, 100};

/// Nearest rubric value; halfway cases go to the lower value. Out-of-range
/// input clamps to 0 or 100.
int snap_to_rubric(double raw) noexcept;

/// First number in a judge reply, snapped. Throws Error(format) when there is none.
int parse_judge_reply(const std::string& reply);

/// Rubric prompt sent to a chat backend; the reply is parsed with parse_judge_reply.
std::vector<ChatMessage> judge_messages(const std::string& question, const std::string& reference,
                                        const std::string& candidate);
int judge_remote(ChatClient& client, const std::string& question, const std::string& reference,
                 const std::string& candidate);

/// Offline judge: 100 when the normalized candidate contains every normalized
/// key value (or the whole reference answer when there are none), else 0.
/// Not-found answers score 0.
int judge_exact(const QAItem& item, const std::string& candidate);

struct ScorePair {
    std::string item_id;
    int judge = 0;
    int human = 0;
};

struct AgreementReport {
    std::size_t n = 0;
    double exact_match_rate = 0.0;
    double within_one_category_rate = 0.0;
    double mean_signed_diff = 0.0;  // mean(judge - human)
    double mae = 0.0;
    /// Undefined (nullopt) when either rater has zero variance.
    std::optional<double> pearson_r;
    /// Quadratic weights (i - j)^2 / 16 over the five rubric categories;
    /// undefined when the expected weighted disagreement is zero.
    std::optional<double> weighted_kappa_quadratic;
};

/// Throws Error(invalid_argument) for fewer than two pairs or off-rubric scores.
AgreementReport agreement(std::span<const ScorePair> pairs);

/// TSV `item_id<TAB>judge<TAB>human`.
std::vector<ScorePair> read_score_pairs(std::istream& in);

/// Seeded sample of `n` indices with proportional (largest remainder)
/// allocation across strata, returned in ascending order.
std::vector<std::size_t> stratified_sample(std::span<const std::string> strata, std::size_t n, std::uint64_t seed);

} // namespace lexirag::eval
