#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "advtrain/types.hpp"

namespace advtrain {

struct SyntheticSpec {
    std::size_t n_per_circle = 50;
    std::uint64_t seed = 0;
    bool include_anchor_points = true;
    // centers (+2,0)/(-2,0) and radius 1 are fixed by construction
};

struct IrisSpec {
    std::string path;
    std::string positive_class;
    std::string negative_class;
};

// Points sampled uniformly (by angle) on the unit circles centered at (2,0)
// labeled +1 and (-2,0) labeled -1, plus the anchor points ((1,0),+1) and
// ((-1,0),-1), which pin the max-margin at exactly 1.
Dataset synth_two_circles(const SyntheticSpec& spec);

// {(gamma*direction, +1), (-gamma*direction, -1)}; max-margin is gamma.
Dataset two_point_dataset(double gamma, std::size_t d, const Vector& direction);

// Comma-separated rows of 4 numeric features and a class label, no header.
// Rows of the positive class get y = +1, the negative class y = -1, all other
// classes are dropped. Malformed rows error with their line number.
Dataset load_iris(const IrisSpec& spec);

// Divide every feature vector by the dataset's max norm; returns the scaled
// dataset and the applied scale 1/max_norm.
std::pair<Dataset, double> scale_to_unit_ball(const Dataset& S);

// Dataset export: header x1,...,xd,y; floats at 17 significant digits.
void save_dataset_csv(const Dataset& S, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

}  // namespace advtrain
