#include "lexirag/evalkit.hpp"

#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"
#include "lexirag/random.hpp"
#include "lexirag/resources.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lexirag::eval {

namespace {

const std::set<std::string>& relevant_for(const Qrels& qrels, const std::string& query) {
    auto it = qrels.find(query);
    if (it == qrels.end()) throw Error(ErrorKind::invalid_argument, "run query '" + query + "' has no qrels");
    if (it->second.empty()) throw Error(ErrorKind::invalid_argument, "qrels for '" + query + "' are empty");
    return it->second;
}

template <typename PerQuery>
double average(const Run& run, const Qrels& qrels, PerQuery&& per_query) {
    if (run.empty()) throw Error(ErrorKind::invalid_argument, "empty run");
    double sum = 0.0;
    for (const auto& [query, list] : run) sum += per_query(list, relevant_for(qrels, query));
    return sum / static_cast<double>(run.size());
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

template <typename Fn>
void for_each_row(std::istream& in, std::size_t columns, const char* what, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != columns) {
            throw Error(ErrorKind::format, std::string(what) + " line " + std::to_string(lineno) + ": expected " +
                                               std::to_string(columns) + " tab-separated columns, got " +
                                               std::to_string(cols.size()));
        }
        fn(cols, lineno);
    }
}

template <typename T>
T parse_number(const std::string& s, const char* what, std::size_t lineno) {
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::format, std::string(what) + " line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
    return value;
}

int category(int score) {
    for (std::size_t i = 0; i < kRubric.size(); ++i) {
        if (kRubric[i] == score) return static_cast<int>(i);
    }
    throw Error(ErrorKind::invalid_argument, "score " + std::to_string(score) + " is not one of 0, 25, 50, 75, 100");
}

} // namespace

double mrr(const Run& run, const Qrels& qrels) {
    return average(run, qrels, [](const RankedList& list, const std::set<std::string>& rel) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (rel.contains(list[i].doc_id)) return 1.0 / static_cast<double>(i + 1);
        }
        return 0.0;
    });
}

double map_metric(const Run& run, const Qrels& qrels) {
    return average(run, qrels, [](const RankedList& list, const std::set<std::string>& rel) {
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!rel.contains(list[i].doc_id)) continue;
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
        return sum / static_cast<double>(rel.size());
    });
}

double recall_at_k(const Run& run, const Qrels& qrels, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::invalid_argument, "k must be >= 1");
    return average(run, qrels, [k](const RankedList& list, const std::set<std::string>& rel) {
        std::size_t found = 0;
        for (std::size_t i = 0; i < std::min(k, list.size()); ++i) found += rel.contains(list[i].doc_id) ? 1 : 0;
        return static_cast<double>(found) / static_cast<double>(rel.size());
    });
}

RetrievalReport evaluate_run(const Run& run, const Qrels& qrels, std::size_t k) {
    return RetrievalReport{mrr(run, qrels), map_metric(run, qrels), recall_at_k(run, qrels, k), k, run.size()};
}

Qrels read_qrels(std::istream& in) {
    Qrels qrels;
    for_each_row(in, 2, "qrels", [&](const std::vector<std::string>& cols, std::size_t lineno) {
        if (cols[0].empty() || cols[1].empty()) {
            throw Error(ErrorKind::format, "qrels line " + std::to_string(lineno) + ": empty id");
        }
        qrels[cols[0]].insert(cols[1]);
    });
    return qrels;
}

Run read_run(std::istream& in) {
    std::map<std::string, std::vector<std::pair<long, ScoredDoc>>> rows;
    for_each_row(in, 4, "run", [&](const std::vector<std::string>& cols, std::size_t lineno) {
        const auto rank = parse_number<long>(cols[2], "run", lineno);
        double score = 0.0;
        try {
            std::size_t used = 0;
            score = std::stod(cols[3], &used);
            if (used != cols[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(ErrorKind::format, "run line " + std::to_string(lineno) + ": bad score '" + cols[3] + "'");
        }
        rows[cols[0]].emplace_back(rank, ScoredDoc{cols[1], score});
    });
    Run run;
    for (auto& [query, docs] : rows) {
        std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::set<std::string> seen;
        RankedList list;
        for (auto& [rank, doc] : docs) {
            if (!seen.insert(doc.doc_id).second) {
                throw Error(ErrorKind::format, "run lists '" + doc.doc_id + "' twice for query '" + query + "'");
            }
            list.items.push_back(std::move(doc));
        }
        run.emplace(query, std::move(list));
    }
    return run;
}

void write_run(std::ostream& out, const Run& run) {
    for (const auto& [query, list] : run) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            out << query << '\t' << list[i].doc_id << '\t' << (i + 1) << '\t' << list[i].score << '\n';
        }
    }
}

int snap_to_rubric(double raw) noexcept {
    if (!(raw > 0.0)) return 0;
    if (raw >= 100.0) return 100;
    int best = kRubric.front();
    for (int v : kRubric) {
        if (std::abs(raw - v) < std::abs(raw - best)) best = v;
    }
    return best;
}

int parse_judge_reply(const std::string& reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        if (reply[i] < '0' || reply[i] > '9') continue;
        std::size_t j = i;
        while (j < reply.size() && ((reply[j] >= '0' && reply[j] <= '9') || reply[j] == '.')) ++j;
        double value = 0.0;
        std::istringstream(reply.substr(i, j - i)) >> value;
        return snap_to_rubric(value);
    }
    throw Error(ErrorKind::format, "judge reply holds no score: '" + reply.substr(0, 80) + "'");
}

std::vector<ChatMessage> judge_messages(const std::string& question, const std::string& reference,
                                        const std::string& candidate) {
    std::string user = "السؤال: " + question + "\nالإجابة المرجعية: " + reference + "\nالإجابة المرشحة: " + candidate +
                       "\nالدرجة:";
    return {ChatMessage{"system", std::string(resources::get("prompts/judge.txt"))}, ChatMessage{"user", std::move(user)}};
}

int judge_remote(ChatClient& client, const std::string& question, const std::string& reference,
                 const std::string& candidate) {
    return parse_judge_reply(client.chat(judge_messages(question, reference, candidate)));
}

int judge_exact(const QAItem& item, const std::string& candidate) {
    if (is_not_found(candidate)) return 0;
    const auto cand = text::normalize(candidate);
    if (cand.empty()) return 0;
    if (item.key_values.empty()) return cand.find(text::normalize(item.gold_answer)) != std::string::npos ? 100 : 0;
    for (const auto& key : item.key_values) {
        const auto k = text::normalize(key);
        if (!k.empty() && cand.find(k) == std::string::npos) return 0;
    }
    return 100;
}

AgreementReport agreement(std::span<const ScorePair> pairs) {
    if (pairs.size() < 2) throw Error(ErrorKind::invalid_argument, "agreement needs at least two score pairs");
    const double n = static_cast<double>(pairs.size());
    AgreementReport r;
    r.n = pairs.size();

    std::array<std::array<double, 5>, 5> observed{};
    std::array<double, 5> judge_marginal{}, human_marginal{};
    double sum_j = 0, sum_h = 0;
    for (const auto& p : pairs) {
        const int cj = category(p.judge);
        const int ch = category(p.human);
        observed[cj][ch] += 1.0;
        judge_marginal[cj] += 1.0;
        human_marginal[ch] += 1.0;
        const int diff = p.judge - p.human;
        r.exact_match_rate += diff == 0 ? 1.0 : 0.0;
        r.within_one_category_rate += std::abs(diff) <= 25 ? 1.0 : 0.0;
        r.mean_signed_diff += diff;
        r.mae += std::abs(diff);
        sum_j += p.judge;
        sum_h += p.human;
    }
    r.exact_match_rate /= n;
    r.within_one_category_rate /= n;
    r.mean_signed_diff /= n;
    r.mae /= n;

    const double mean_j = sum_j / n, mean_h = sum_h / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& p : pairs) {
        const double dx = p.judge - mean_j, dy = p.human - mean_h;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx > 0 && syy > 0) r.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

    double wo = 0, we = 0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double w = static_cast<double>((i - j) * (i - j)) / 16.0;
            wo += w * observed[i][j] / n;
            we += w * (judge_marginal[i] / n) * (human_marginal[j] / n);
        }
    }
    if (we > 0) r.weighted_kappa_quadratic = 1.0 - wo / we;
    return r;
}

std::vector<ScorePair> read_score_pairs(std::istream& in) {
    std::vector<ScorePair> pairs;
    for_each_row(in, 3, "score pairs", [&](const std::vector<std::string>& cols, std::size_t lineno) {
        pairs.push_back(ScorePair{cols[0], parse_number<int>(cols[1], "score pairs", lineno),
                                  parse_number<int>(cols[2], "score pairs", lineno)});
    });
    return pairs;
}

std::vector<std::size_t> stratified_sample(std::span<const std::string> strata, std::size_t n, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);
    n = std::min(n, strata.size());
    if (n == 0) return {};

    struct Quota {
        const std::string* name;
        std::size_t take;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [name, members] : groups) {
        const double exact = static_cast<double>(n) * static_cast<double>(members.size()) /
                             static_cast<double>(strata.size());
        const auto take = static_cast<std::size_t>(std::floor(exact));
        quotas.push_back(Quota{&name, take, exact - static_cast<double>(take)});
        assigned += take;
    }
    std::vector<std::size_t> order(quotas.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++quotas[order[i % order.size()]].take;

    std::vector<std::size_t> out;
    out.reserve(n);
    Rng rng(seed);
    for (const auto& q : quotas) {
        auto members = groups.at(*q.name);
        for (std::size_t i = 0; i < q.take; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(members.size() - i));
            std::swap(members[i], members[j]);
            out.push_back(members[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace lexirag::eval
