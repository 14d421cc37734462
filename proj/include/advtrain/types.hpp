#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace advtrain {

using Vector = std::vector<double>;

inline bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline Vector scaled(const Vector& v, double c) {
    Vector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
    return r;
}

// y += a * x
inline void axpy(Vector& y, double a, const Vector& x) {
    if (y.size() != x.size()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

// w / ||w||, or the zero vector when w = 0
inline Vector unit_or_zero(const Vector& w) {
    double n = norm(w);
    if (n == 0.0) return Vector(w.size(), 0.0);
    return scaled(w, 1.0 / n);
}

struct LabeledExample {
    Vector x;
    int y;  // +1 or -1

    LabeledExample(Vector x_, int y_) : x(std::move(x_)), y(y_) {
        if (y != 1 && y != -1) throw std::invalid_argument("label must be +1 or -1");
        if (!all_finite(x)) throw std::invalid_argument("example has non-finite feature");
        if (x.empty()) throw std::invalid_argument("example has empty feature vector");
    }
};

// Immutable ordered collection of labeled examples with cached max feature norm.
class Dataset {
  public:
    explicit Dataset(std::vector<LabeledExample> examples) : examples_(std::move(examples)) {
        if (examples_.empty()) throw std::invalid_argument("dataset must be nonempty");
        const std::size_t d = examples_[0].x.size();
        max_norm_ = 0.0;
        for (const auto& e : examples_) {
            if (e.x.size() != d) throw std::invalid_argument("dataset has inconsistent dimensions");
            max_norm_ = std::max(max_norm_, norm(e.x));
        }
        dim_ = d;
    }

    std::size_t n() const { return examples_.size(); }
    std::size_t dim() const { return dim_; }
    double max_norm() const { return max_norm_; }
    const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
    const std::vector<LabeledExample>& examples() const { return examples_; }
    auto begin() const { return examples_.begin(); }
    auto end() const { return examples_.end(); }

  private:
    std::vector<LabeledExample> examples_;
    double max_norm_ = 0.0;
    std::size_t dim_ = 0;
};

struct Model {
    Vector w;
};

enum class LinkFunction { Logistic, ReLU };

}  // namespace advtrain
