#include "advtrain/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "advtrain/format.hpp"
#include "advtrain/rng.hpp"

namespace advtrain {

Dataset synth_two_circles(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    std::vector<LabeledExample> ex;
    ex.reserve(2 * spec.n_per_circle + 2);
    const double two_pi = 2.0 * 3.141592653589793238462643383279502884;
    for (const auto& [cx, y] : {std::pair{2.0, 1}, std::pair{-2.0, -1}}) {
        for (std::size_t i = 0; i < spec.n_per_circle; ++i) {
            const double a = rng.uniform(0.0, two_pi);
            ex.emplace_back(Vector{cx + std::cos(a), std::sin(a)}, y);
        }
    }
    if (spec.include_anchor_points) {
        ex.emplace_back(Vector{1.0, 0.0}, 1);
        ex.emplace_back(Vector{-1.0, 0.0}, -1);
    }
    return Dataset(std::move(ex));
}

Dataset two_point_dataset(double gamma, std::size_t d, const Vector& direction) {
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("two_point_dataset requires 0 < gamma <= 1");
    if (direction.size() != d) throw std::invalid_argument("direction has wrong dimension");
    if (std::abs(norm(direction) - 1.0) > 1e-9)
        throw std::invalid_argument("direction must be a unit vector");
    std::vector<LabeledExample> ex;
    ex.emplace_back(scaled(direction, gamma), 1);
    ex.emplace_back(scaled(direction, -gamma), -1);
    return Dataset(std::move(ex));
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

Dataset load_iris(const IrisSpec& spec) {
    if (spec.positive_class == spec.negative_class)
        throw std::invalid_argument("positive and negative classes must differ");
    std::ifstream in(spec.path);
    if (!in) throw std::runtime_error("cannot open " + spec.path);

    std::vector<LabeledExample> ex;
    std::set<std::string> seen_classes;
    std::size_t pos_count = 0, neg_count = 0;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw std::runtime_error(spec.path + ":" + std::to_string(lineno) +
                                     ": expected 4 features and a class label, got " +
                                     std::to_string(fields.size()) + " fields");
        Vector x(4);
        for (std::size_t j = 0; j < 4; ++j)
            x[j] = parse_double(fields[j], spec.path + ":" + std::to_string(lineno));
        const std::string label = trim(fields[4]);
        seen_classes.insert(label);
        if (label == spec.positive_class) {
            ex.emplace_back(std::move(x), 1);
            ++pos_count;
        } else if (label == spec.negative_class) {
            ex.emplace_back(std::move(x), -1);
            ++neg_count;
        }
    }
    if (pos_count == 0 || neg_count == 0) {
        std::string classes;
        for (const auto& c : seen_classes) classes += (classes.empty() ? "" : ", ") + c;
        throw std::runtime_error("class '" +
                                 (pos_count == 0 ? spec.positive_class : spec.negative_class) +
                                 "' has no examples in " + spec.path +
                                 " (available classes: " + classes + ")");
    }
    return Dataset(std::move(ex));
}

std::pair<Dataset, double> scale_to_unit_ball(const Dataset& S) {
    const double mn = S.max_norm();
    if (!(mn > 0.0)) throw std::invalid_argument("cannot rescale a dataset of all-zero features");
    const double scale = 1.0 / mn;
    std::vector<LabeledExample> ex;
    ex.reserve(S.n());
    for (const auto& e : S) ex.emplace_back(scaled(e.x, scale), e.y);
    return {Dataset(std::move(ex)), scale};
}

void save_dataset_csv(const Dataset& S, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t j = 1; j <= S.dim(); ++j) out << "x" << j << ",";
    out << "y\n";
    for (const auto& e : S) {
        for (double v : e.x) out << fmt_g17(v) << ",";
        out << e.y << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv_line(trim(line));
    if (header.size() < 2 || header.back() != "y")
        throw std::runtime_error(path + ": malformed header");
    const std::size_t d = header.size() - 1;
    std::vector<LabeledExample> ex;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != d + 1)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(d + 1) + " fields");
        Vector x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = parse_double(fields[j], path + ":" + std::to_string(lineno));
        const std::string ys = trim(fields[d]);
        if (ys != "1" && ys != "-1" && ys != "+1")
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": label must be +1/-1");
        ex.emplace_back(std::move(x), ys == "-1" ? -1 : 1);
    }
    return Dataset(std::move(ex));
}

}  // namespace advtrain
