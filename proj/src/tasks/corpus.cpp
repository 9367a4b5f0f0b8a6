#include "seqlab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

struct RawCorpus {
    // input string -> responses, in first-appearance order
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    std::set<std::string> tokens;
};

RawCorpus read_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus '" + path + "'");
    RawCorpus raw;
    std::map<std::string, size_t> index;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("corpus '" + path + "' line " + std::to_string(line_no) +
                             ": missing TAB separator");
        }
        std::string input = line.substr(0, tab);
        std::string response = line.substr(tab + 1);
        if (split_ws(input).empty() || split_ws(response).empty()) {
            throw ParseError("corpus '" + path + "' line " + std::to_string(line_no) +
                             ": empty input or response");
        }
        auto [it, inserted] = index.try_emplace(input, raw.groups.size());
        if (inserted) raw.groups.emplace_back(input, std::vector<std::string>{});
        raw.groups[it->second].second.push_back(response);
        for (const auto& w : split_ws(input)) raw.tokens.insert(w);
        for (const auto& w : split_ws(response)) raw.tokens.insert(w);
    }
    if (raw.groups.empty()) throw ParseError("corpus '" + path + "' is empty");
    return raw;
}

std::vector<int> tokenize(const std::string& text, const Vocab& vocab) {
    std::vector<int> ids;
    for (const auto& w : split_ws(text)) ids.push_back(vocab.id(w));
    return ids;
}

std::vector<ReferenceSet> to_sets(const RawCorpus& raw, const Vocab& vocab) {
    std::vector<ReferenceSet> sets;
    sets.reserve(raw.groups.size());
    for (const auto& [input, responses] : raw.groups) {
        ReferenceSet set;
        set.input = tokenize(input, vocab);
        for (const auto& r : responses) {
            std::vector<int> ref = tokenize(r, vocab);
            if (std::find(set.references.begin(), set.references.end(), ref) ==
                set.references.end()) {
                set.references.push_back(std::move(ref));
            }
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    RawCorpus raw = read_raw(path);
    Corpus corpus;
    corpus.vocab =
        Vocab::from_tokens(std::vector<std::string>(raw.tokens.begin(), raw.tokens.end()));
    corpus.sets = to_sets(raw, corpus.vocab);
    for (const auto& [input, responses] : raw.groups) {
        for (const auto& r : responses) {
            corpus.line_pairs.push_back({tokenize(input, corpus.vocab), tokenize(r, corpus.vocab)});
        }
    }
    return corpus;
}

std::vector<ReferenceSet> load_corpus_with_vocab(const std::string& path, const Vocab& vocab) {
    return to_sets(read_raw(path), vocab);
}

std::vector<TrainPair> load_corpus_with_vocab_pairs(const std::string& path, const Vocab& vocab) {
    RawCorpus raw = read_raw(path);
    std::vector<TrainPair> pairs;
    for (const auto& [input, responses] : raw.groups) {
        for (const auto& r : responses) {
            pairs.push_back({tokenize(input, vocab), tokenize(r, vocab)});
        }
    }
    return pairs;
}

void write_corpus(const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& lines) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& [input, response] : lines) {
        out << input << "\t" << response << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace seqlab
