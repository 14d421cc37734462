#include "advtrain/erm_game.hpp"

#include <cmath>

#include "advtrain/data_io.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/rng.hpp"

namespace advtrain {

static void validate_params(double gamma, double alpha, double eps) {
    if (!(eps > 0.0 && eps <= alpha && alpha < gamma && gamma <= 1.0))
        throw std::invalid_argument("game parameters must satisfy 0 < eps <= alpha < gamma <= 1");
}

double code_threshold(double gamma, double alpha, double eps) {
    validate_params(gamma, alpha, eps);
    return eps * (gamma * gamma - eps * alpha) / (alpha * (gamma * gamma - eps * eps));
}

CodeGenResult generate_spherical_code(std::size_t dim, double theta, std::size_t target_size,
                                      std::uint64_t seed, std::size_t max_attempts) {
    if (dim < 2) throw std::invalid_argument("code dimension must be at least 2");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    if (target_size < 1) throw std::invalid_argument("target_size must be at least 1");
    Rng rng(seed);
    CodeGenResult res;
    res.code.dim = dim;
    res.code.theta = theta;
    while (res.code.codewords.size() < target_size && res.attempts < max_attempts) {
        ++res.attempts;
        Vector v = rng.unit_vector(dim);
        bool ok = true;
        for (const auto& u : res.code.codewords) {
            if (dot(u, v) >= theta) {
                ok = false;
                break;
            }
        }
        if (ok) res.code.codewords.push_back(std::move(v));
    }
    res.complete = res.code.codewords.size() >= target_size;
    return res;
}

CodeVerdict verify_code(const SphericalCode& code) {
    for (std::size_t i = 0; i < code.codewords.size(); ++i) {
        if (code.codewords[i].size() != code.dim)
            return {false, i, i, static_cast<double>(code.codewords[i].size()),
                    "codeword has wrong dimension"};
        const double n = norm(code.codewords[i]);
        if (std::abs(n - 1.0) > 1e-12) return {false, i, i, n, "codeword is not unit norm"};
    }
    for (std::size_t i = 0; i < code.codewords.size(); ++i)
        for (std::size_t j = i + 1; j < code.codewords.size(); ++j) {
            const double ip = dot(code.codewords[i], code.codewords[j]);
            if (ip >= code.theta) return {false, i, j, ip, "pairwise inner product at threshold"};
        }
    return {};
}

Model admissible_model(const GameParams& params, const Vector& v) {
    validate_params(params.gamma, params.alpha, params.eps);
    if (params.d < 2) throw std::invalid_argument("game dimension must be at least 2");
    if (v.size() != params.d - 1) throw std::invalid_argument("codeword must have dimension d-1");
    if (std::abs(norm(v) - 1.0) > 1e-9) throw std::invalid_argument("codeword must be unit norm");
    const double a = params.eps / params.gamma;
    const double b = std::sqrt(1.0 - a * a);
    Model m;
    m.w.reserve(params.d);
    m.w.push_back(a);
    for (double vi : v) m.w.push_back(b * vi);
    return m;
}

GameState run_erm_game(const GameParams& params, std::size_t T, std::uint64_t seed) {
    validate_params(params.gamma, params.alpha, params.eps);
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    const double theta = code_threshold(params.gamma, params.alpha, params.eps);
    const std::size_t max_attempts = std::max<std::size_t>(1000000, 200 * T);
    const CodeGenResult gen =
        generate_spherical_code(params.d - 1, theta, T, seed, max_attempts);

    Vector e1(params.d, 0.0);
    e1[0] = 1.0;
    const Dataset S = two_point_dataset(params.gamma, params.d, e1);

    GameState st;
    st.rounds_requested = T;
    st.code_complete = gen.complete;
    st.admissible = true;
    for (const auto& v : gen.code.codewords) {
        Model w = admissible_model(params, v);

        // strict separation of S and every previously planted example
        for (const auto& e : S)
            if (!(e.y * dot(w.w, e.x) > 0.0)) st.admissible = false;
        for (const auto& e : st.s_prime)
            if (!(e.y * dot(w.w, e.x) > 0.0)) st.admissible = false;

        const double m = margin(w, S).margin;
        if (std::abs(m - params.eps) > 1e-9) st.admissible = false;
        st.margins_on_s.push_back(m);

        Vector xp = scaled(e1, params.gamma);
        axpy(xp, -params.alpha, w.w);
        Vector xm = scaled(e1, -params.gamma);
        axpy(xm, params.alpha, w.w);
        st.s_prime.emplace_back(std::move(xp), 1);
        st.s_prime.emplace_back(std::move(xm), -1);

        st.models.push_back(std::move(w));
        ++st.rounds;
    }
    return st;
}

double erm_lower_bound_iters(std::size_t d, double gamma, double eps, double c) {
    if (d < 2 || !(gamma > 0.0) || !(eps > 0.0) || !(c > 0.0))
        throw std::invalid_argument("erm_lower_bound_iters requires positive inputs and d >= 2");
    const double r = eps / (gamma + eps);
    return 0.5 * std::exp(c * static_cast<double>(d - 1) * r * r);
}

}  // namespace advtrain
