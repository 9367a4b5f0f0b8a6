#include "seqlab/vocab.hpp"

#include "seqlab/errors.hpp"

namespace seqlab {

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
    Vocab v;
    v.tokens_ = {"<pad>", "<bos>", "<eos>"};
    for (const auto& t : tokens) v.tokens_.push_back(t);
    for (size_t i = 0; i < v.tokens_.size(); ++i) {
        auto [it, inserted] = v.index_.emplace(v.tokens_[i], static_cast<int>(i));
        if (!inserted) throw Error("duplicate token '" + v.tokens_[i] + "' in vocab");
    }
    return v;
}

Vocab Vocab::counting() {
    std::vector<std::string> digits;
    for (int d = 0; d <= 9; ++d) digits.push_back(std::to_string(d));
    return from_tokens(digits);
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) throw Error("unknown token '" + token + "'");
    return it->second;
}

int Vocab::try_id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw Error("token id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<size_t>(id)];
}

nlohmann::json Vocab::to_json() const {
    return nlohmann::json(std::vector<std::string>(tokens_.begin() + 3, tokens_.end()));
}

Vocab Vocab::from_json(const nlohmann::json& j) {
    return from_tokens(j.get<std::vector<std::string>>());
}

}  // namespace seqlab
