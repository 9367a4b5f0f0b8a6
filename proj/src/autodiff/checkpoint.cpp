#include "seqlab/checkpoint.hpp"

#include <fstream>

#include "seqlab/errors.hpp"

namespace seqlab {

using nlohmann::json;

json params_to_json(const ParamStore& params) {
    json tensors = json::object();
    for (const auto& [name, p] : params) {
        tensors[name] = {{"shape", p.value.shape}, {"data", p.value.data}};
    }
    return json{{"format", "seqlab.params"}, {"version", 1}, {"tensors", tensors}};
}

void params_from_json(const json& j, ParamStore& params) {
    if (!j.is_object() || j.value("format", "") != "seqlab.params") {
        throw ParseError("not a seqlab.params object");
    }
    if (j.value("version", 0) != 1) {
        throw ParseError("unsupported seqlab.params version");
    }
    for (const auto& [name, t] : j.at("tensors").items()) {
        Shape shape = t.at("shape").get<Shape>();
        std::vector<double> data = t.at("data").get<std::vector<double>>();
        Tensor tensor = Tensor::from(std::move(shape), std::move(data));
        if (!tensor.all_finite()) {
            throw NumericError("parameter '" + name + "' holds non-finite values");
        }
        if (params.has(name)) {
            Parameter& p = params.get(name);
            if (p.value.shape != tensor.shape) {
                throw ShapeError("parameter '" + name + "': checkpoint shape " +
                                 shape_str(tensor.shape) + " does not match " +
                                 shape_str(p.value.shape));
            }
            p.value = std::move(tensor);
        } else {
            Parameter& p = params.create(name, tensor.shape);
            p.value = std::move(tensor);
        }
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace seqlab
