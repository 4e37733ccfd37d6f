#pragma once

#include "lexirag/labels.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace lexirag {

/// A generated question with its reference answer and gold documents.
struct QAItem {
    std::string id;
    std::string question;
    std::string gold_answer;
    FineIntent fine_intent = FineIntent::other;
    /// Non-empty; one question may have several gold documents.
    std::vector<std::string> gold_doc_ids;
    /// Answer slot values absent from the question (e.g. the meaning or the
    /// date). The offline judge checks candidates for these.
    std::vector<std::string> key_values;

    friend bool operator==(const QAItem&, const QAItem&) = default;
};

std::string qa_to_json(const QAItem& item);
/// Throws Error(format) on schema violations.
QAItem qa_from_json(const std::string& line);

void write_qa_jsonl(std::ostream& out, const std::vector<QAItem>& items);
std::vector<QAItem> read_qa_jsonl(std::istream& in);
std::vector<QAItem> read_qa_jsonl(const std::filesystem::path& path);

} // namespace lexirag
