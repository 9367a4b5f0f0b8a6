#pragma once

#include <string>
#include <vector>

namespace seqlab {

/// Dense row-major shape, rank 1 or 2 in practice.
using Shape = std::vector<int>;

std::string shape_str(const Shape& s);

/// Dense 64-bit value array. This is the plain data carrier; autodiff
/// bookkeeping lives in Tape nodes.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0);

    static Tensor scalar(double v);
    static Tensor from(Shape s, std::vector<double> values);

    int numel() const { return static_cast<int>(data.size()); }
    bool empty() const { return data.empty(); }
    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }

    double& operator[](int i) { return data[static_cast<size_t>(i)]; }
    double operator[](int i) const { return data[static_cast<size_t>(i)]; }

    /// Value of a single-element tensor.
    double item() const;

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
};

int shape_numel(const Shape& s);

}  // namespace seqlab
