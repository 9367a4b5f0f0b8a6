#include "seqlab/curves.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seqlab/errors.hpp"

namespace seqlab {

using nlohmann::json;

namespace {

struct Stream {
    std::string label;
    std::map<long, double> by_iteration;
    bool has_precision = false;
    bool has_bleu = false;
};

Stream read_stream(const CurveInput& input, const std::string& metric) {
    std::ifstream in(input.metrics_path);
    if (!in) throw IoError("cannot open metrics file '" + input.metrics_path + "'");
    Stream stream;
    stream.label = input.label;
    std::string line;
    std::vector<json> records;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw ParseError("'" + input.metrics_path + "' line " + std::to_string(line_no) +
                             ": " + e.what());
        }
        stream.has_precision = stream.has_precision || records.back().contains("precision");
        stream.has_bleu = stream.has_bleu || records.back().contains("bleu2");
    }
    std::string field = metric;
    if (field == "auto") {
        field = stream.has_precision ? "precision" : (stream.has_bleu ? "bleu2" : "mean_reward");
    }
    for (const json& r : records) {
        if (!r.contains("iteration") || !r.contains(field)) continue;
        stream.by_iteration[r.at("iteration").get<long>()] = r.at(field).get<double>();
    }
    return stream;
}

}  // namespace

std::string merge_curves(const std::vector<CurveInput>& inputs, const std::string& metric) {
    if (inputs.empty()) throw DomainError("merge_curves: no inputs");
    std::vector<Stream> streams;
    for (const CurveInput& in : inputs) streams.push_back(read_stream(in, metric));

    if (metric == "auto") {
        // all inputs must resolve to the same kind of run
        bool all_precision = true, all_bleu = true;
        for (const Stream& s : streams) {
            all_precision = all_precision && s.has_precision;
            all_bleu = all_bleu && s.has_bleu;
        }
        bool any_precision = false, any_bleu = false;
        for (const Stream& s : streams) {
            any_precision = any_precision || s.has_precision;
            any_bleu = any_bleu || s.has_bleu;
        }
        if ((any_precision && !all_precision) || (any_bleu && !all_bleu)) {
            throw ConfigError("merge_curves: metrics streams come from different tasks");
        }
    }

    std::set<long> iterations;
    for (const Stream& s : streams) {
        for (const auto& [it, v] : s.by_iteration) iterations.insert(it);
    }

    std::ostringstream os;
    os.precision(17);
    os << "iteration";
    for (const Stream& s : streams) os << "," << s.label;
    os << "\n";
    for (long it : iterations) {
        os << it;
        for (const Stream& s : streams) {
            auto found = s.by_iteration.find(it);
            os << ",";
            if (found != s.by_iteration.end()) os << found->second;
            // absent iterations stay empty: no fabricated zeros
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace seqlab
