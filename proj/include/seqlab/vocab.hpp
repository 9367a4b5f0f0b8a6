#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace seqlab {

/// Token <-> id bijection with reserved PAD/BOS/EOS ids.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;

    Vocab() = default;

    /// Builds a vocab from regular tokens (specials are prepended).
    static Vocab from_tokens(const std::vector<std::string>& tokens);
    /// Digits 0-9 plus specials: 13 tokens.
    static Vocab counting();

    int id(const std::string& token) const;
    /// -1 when unknown.
    int try_id(const std::string& token) const;
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    nlohmann::json to_json() const;
    static Vocab from_json(const nlohmann::json& j);

    bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace seqlab
