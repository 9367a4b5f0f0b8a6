#include "seqlab/tensor.hpp"

#include <cmath>
#include <sstream>

#include "seqlab/errors.hpp"

namespace seqlab {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) os << ",";
        os << s[i];
    }
    os << ")";
    return os.str();
}

int shape_numel(const Shape& s) {
    int n = 1;
    for (int d : s) n *= d;
    return n;
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(shape_numel(shape)), fill);
}

Tensor Tensor::scalar(double v) {
    Tensor t;
    t.shape = {1};
    t.data = {v};
    return t;
}

Tensor Tensor::from(Shape s, std::vector<double> values) {
    if (shape_numel(s) != static_cast<int>(values.size())) {
        throw ShapeError("Tensor::from: shape " + shape_str(s) + " does not hold " +
                         std::to_string(values.size()) + " values");
    }
    Tensor t;
    t.shape = std::move(s);
    t.data = std::move(values);
    return t;
}

double Tensor::item() const {
    if (numel() != 1) {
        throw ShapeError("item() requires a single-element tensor, got shape " + shape_str(shape));
    }
    return data[0];
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace seqlab
