#include "lexirag/qa.hpp"

#include "lexirag/error.hpp"

#include <json.hpp>

#include <fstream>

namespace lexirag {

using json = nlohmann::ordered_json;

std::string qa_to_json(const QAItem& item) {
    json j;
    j["id"] = item.id;
    j["question"] = item.question;
    j["gold_answer"] = item.gold_answer;
    j["fine_intent"] = std::string(to_string(item.fine_intent));
    j["gold_doc_ids"] = item.gold_doc_ids;
    j["key_values"] = item.key_values;
    return j.dump();
}

QAItem qa_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format, std::string("qa record: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::format, "qa record: expected a JSON object");
    auto str = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw Error(ErrorKind::format, std::string("qa record: missing '") + key + "'");
        return it->get<std::string>();
    };
    auto list = [&](const char* key, bool required) {
        std::vector<std::string> out;
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) throw Error(ErrorKind::format, std::string("qa record: missing '") + key + "'");
            return out;
        }
        if (!it->is_array()) throw Error(ErrorKind::format, std::string("qa record: '") + key + "' must be an array");
        for (const auto& v : *it) {
            if (!v.is_string()) throw Error(ErrorKind::format, std::string("qa record: '") + key + "' holds a non-string");
            out.push_back(v.get<std::string>());
        }
        return out;
    };
    QAItem item;
    item.id = str("id");
    item.question = str("question");
    item.gold_answer = str("gold_answer");
    const auto label = str("fine_intent");
    const auto fine = parse_fine_intent(label);
    if (!fine) throw Error(ErrorKind::format, "qa record " + item.id + ": unknown fine_intent '" + label + "'");
    item.fine_intent = *fine;
    item.gold_doc_ids = list("gold_doc_ids", true);
    if (item.gold_doc_ids.empty()) throw Error(ErrorKind::format, "qa record " + item.id + ": no gold documents");
    item.key_values = list("key_values", false);
    return item;
}

void write_qa_jsonl(std::ostream& out, const std::vector<QAItem>& items) {
    for (const auto& item : items) out << qa_to_json(item) << '\n';
}

std::vector<QAItem> read_qa_jsonl(std::istream& in) {
    std::vector<QAItem> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            items.push_back(qa_from_json(line));
        } catch (const Error& e) {
            throw Error(ErrorKind::format, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return items;
}

std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    return read_qa_jsonl(in);
}

} // namespace lexirag
