#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advtrain/types.hpp"

namespace advtrain {

struct SphericalCode {
    std::size_t dim = 0;
    double theta = 0.0;
    std::vector<Vector> codewords;  // unit vectors with pairwise inner products < theta
};

struct CodeGenResult {
    SphericalCode code;
    std::size_t attempts = 0;
    bool complete = false;  // reached target_size (otherwise a partial code, reported as such)
};

struct CodeVerdict {
    bool pass = true;
    std::size_t i = 0, j = 0;  // first violating pair (or the single offending index)
    double value = 0.0;
    std::string reason;
};

struct GameParams {
    std::size_t d;  // ambient dimension (codewords live in dimension d-1)
    double gamma;
    double alpha;
    double eps;
};

struct GameState {
    std::vector<LabeledExample> s_prime;
    std::vector<Model> models;
    std::vector<double> margins_on_s;
    bool admissible = false;
    std::size_t rounds = 0;
    std::size_t rounds_requested = 0;
    bool code_complete = false;
};

// theta = eps*(gamma^2 - eps*alpha) / (alpha*(gamma^2 - eps^2)); the largest
// pairwise inner product under which every codeword-induced model still
// separates all previously planted adversarial examples.
double code_threshold(double gamma, double alpha, double eps);

// Greedy rejection sampling: draw uniformly random unit vectors and accept one
// iff its inner product with every accepted codeword is below theta. A
// shortfall within max_attempts yields complete = false, never silent
// truncation.
CodeGenResult generate_spherical_code(std::size_t dim, double theta, std::size_t target_size,
                                      std::uint64_t seed, std::size_t max_attempts);

CodeVerdict verify_code(const SphericalCode& code);

// Unit model [a, sqrt(1-a^2)*v] with a = eps/gamma; its margin on the
// two-point instance {(gamma*e1,+1), (-gamma*e1,-1)} is exactly eps.
Model admissible_model(const GameParams& params, const Vector& v);

// Algorithm: at round t the model w_t comes from the next codeword; it must
// strictly separate S plus every adversarial example planted in earlier
// rounds, and its margin on S must equal eps to 1e-9; the round then plants
// (gamma*e1 - alpha*w_t, +1) and (-gamma*e1 + alpha*w_t, -1).
GameState run_erm_game(const GameParams& params, std::size_t T, std::uint64_t seed);

// (1/2) * exp(c*(d-1)*eps^2/(gamma+eps)^2); c is the caller's explicit choice
// of the universal constant.
double erm_lower_bound_iters(std::size_t d, double gamma, double eps, double c);

}  // namespace advtrain
