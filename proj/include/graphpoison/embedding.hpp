#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphpoison/common.hpp"
#include "graphpoison/proximity.hpp"

namespace graphpoison {

struct AlsOptions {
    double ridge = 1e-6;
    int max_sweeps = 200;
    double rel_tol = 1e-8;
};

/// Node factor X and context factor Y of the masked factorization, plus the
/// per-row inverse Gram matrices of Y needed by the implicit gradient.
struct Embedding {
    Matrix X, Y;
    std::vector<Matrix> gram_inv;       // (sum_{j in omega_i} Y_j Y_j^T + ridge I)^-1
    double ridge = 0.0;
    std::vector<double> objective_trace;  // masked objective after every half-sweep
    std::vector<int> empty_rows;          // rows with empty omega_i, forced to zero
    int sweeps = 0;
    bool converged = false;
};

namespace detail {

inline double masked_objective(const ProximityModel& m, const Matrix& X, const Matrix& Y) {
    double obj = 0.0;
    const int n = static_cast<int>(m.Z.rows());
    for (int i = 0; i < n; ++i)
        for (int j : m.omega_rows[i]) {
            double r = m.Z(i, j) - X.row(i).dot(Y.row(j));
            obj += r * r;
        }
    return obj;
}

// Exact ridge least-squares update of the rows of `out` given the fixed
// factor `fixed`, restricted to the observed cells of each row.
inline void half_sweep(const ProximityModel& m, const std::vector<std::vector<int>>& support,
                       const Matrix& fixed, bool transpose_Z, double ridge, Matrix& out,
                       std::vector<Matrix>* gram_inv = nullptr) {
    const int n = static_cast<int>(out.rows());
    const int d = static_cast<int>(out.cols());
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
        const auto& idx = support[i];
        if (idx.empty()) {
            out.row(i).setZero();
            if (gram_inv)
                (*gram_inv)[i] = Matrix::Identity(d, d) / (ridge > 0 ? ridge : 1.0);
            continue;
        }
        Matrix gram = ridge * Matrix::Identity(d, d);
        Vector rhs = Vector::Zero(d);
        for (int j : idx) {
            gram.noalias() += fixed.row(j).transpose() * fixed.row(j);
            rhs.noalias() += (transpose_Z ? m.Z(j, i) : m.Z(i, j)) * fixed.row(j).transpose();
        }
        Eigen::LDLT<Matrix> ldlt(gram);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("singular Gram matrix in ALS; use ridge > 0");
        out.row(i) = ldlt.solve(rhs).transpose();
        if (gram_inv) (*gram_inv)[i] = ldlt.solve(Matrix::Identity(d, d));
    }
}

}  // namespace detail

/// Alternating least squares on the observed cells of Z. Stops when the
/// masked objective decreases by less than rel_tol relative per sweep. A
/// final X refresh against the final Y makes the per-row stationarity
/// condition exact and caches the Gram inverses the attack gradient needs.
inline Embedding factorize(const ProximityModel& model, std::uint64_t seed,
                           const AlsOptions& opts = {}, const Embedding* warm_start = nullptr) {
    const int n = static_cast<int>(model.Z.rows());
    const int d = model.spec.dim;
    bool any = false;
    for (const auto& row : model.omega_rows) any = any || !row.empty();
    if (!any) throw ConfigError("omega is empty: nothing to factorize");

    Embedding e;
    e.ridge = opts.ridge;
    if (warm_start && warm_start->X.rows() == n && warm_start->X.cols() == d) {
        e.X = warm_start->X;
        e.Y = warm_start->Y;
    } else {
        std::mt19937_64 rng(seed);
        const double lim = 1.0 / std::sqrt(static_cast<double>(d));
        std::uniform_real_distribution<double> unif(-lim, lim);
        e.X = Matrix::NullaryExpr(n, d, [&]() { return unif(rng); });
        e.Y = Matrix::NullaryExpr(n, d, [&]() { return unif(rng); });
    }
    e.gram_inv.assign(n, Matrix());

    double prev = detail::masked_objective(model, e.X, e.Y);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        detail::half_sweep(model, model.omega_rows, e.Y, false, opts.ridge, e.X);
        e.objective_trace.push_back(detail::masked_objective(model, e.X, e.Y));
        detail::half_sweep(model, model.omega_cols, e.X, true, opts.ridge, e.Y);
        double cur = detail::masked_objective(model, e.X, e.Y);
        e.objective_trace.push_back(cur);
        e.sweeps = sweep + 1;
        if (prev - cur < opts.rel_tol * std::max(prev, 1e-300)) {
            e.converged = true;
            break;
        }
        prev = cur;
    }

    detail::half_sweep(model, model.omega_rows, e.Y, false, opts.ridge, e.X, &e.gram_inv);
    e.objective_trace.push_back(detail::masked_objective(model, e.X, e.Y));
    for (int i = 0; i < n; ++i)
        if (model.omega_rows[i].empty()) e.empty_rows.push_back(i);
    return e;
}

/// Max row-wise residual of the per-row stationarity condition, scaled by
/// max(1, ||Z row||).
inline double kkt_residual(const ProximityModel& model, const Embedding& e) {
    double worst = 0.0;
    const int n = static_cast<int>(model.Z.rows());
    for (int i = 0; i < n; ++i) {
        if (model.omega_rows[i].empty()) continue;
        Vector resid = -e.ridge * e.X.row(i).transpose();
        double znorm2 = 0.0;
        for (int j : model.omega_rows[i]) {
            double r = model.Z(i, j) - e.X.row(i).dot(e.Y.row(j));
            resid.noalias() += r * e.Y.row(j).transpose();
            znorm2 += model.Z(i, j) * model.Z(i, j);
        }
        worst = std::max(worst, resid.norm() / std::max(1.0, std::sqrt(znorm2)));
    }
    return worst;
}

inline Vector cosine_scores(const Embedding& e, const std::vector<NodePair>& pairs) {
    Vector out(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        double ni = e.X.row(i).norm(), nj = e.X.row(j).norm();
        out[static_cast<Eigen::Index>(k)] =
            (ni > 0 && nj > 0) ? e.X.row(i).dot(e.X.row(j)) / (ni * nj) : 0.0;
    }
    return out;
}

inline Vector inner_product_scores(const Embedding& e, const std::vector<NodePair>& pairs) {
    Vector out(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = e.X.row(pairs[k].first).dot(e.X.row(pairs[k].second));
    return out;
}

// Container format: one JSON header line, then row-major float64 for X and Y.
inline void save_embedding(const Embedding& e, Method method, std::uint64_t seed,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write embedding: " + path);
    nlohmann::json header{{"n", e.X.rows()}, {"d", e.X.cols()}, {"method", to_string(method)}, {"seed", seed}};
    out << header.dump() << "\n";
    auto dump = [&](const Matrix& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            out.write(reinterpret_cast<const char*>(m.row(i).eval().data()),
                      static_cast<std::streamsize>(sizeof(double) * m.cols()));
    };
    dump(e.X);
    dump(e.Y);
}

inline Embedding load_embedding(const std::string& path, Method* method = nullptr,
                                std::uint64_t* seed = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read embedding: " + path);
    std::string line;
    std::getline(in, line);
    nlohmann::json header = nlohmann::json::parse(line);
    const Eigen::Index n = header.at("n").get<Eigen::Index>();
    const Eigen::Index d = header.at("d").get<Eigen::Index>();
    if (method) *method = method_from_string(header.at("method").get<std::string>());
    if (seed) *seed = header.at("seed").get<std::uint64_t>();
    Embedding e;
    auto slurp = [&](Matrix& m) {
        m.resize(n, d);
        std::vector<double> row(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < n; ++i) {
            in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(sizeof(double) * d));
            if (!in) throw ParseError(path + ": truncated embedding payload");
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
        }
    };
    slurp(e.X);
    slurp(e.Y);
    return e;
}

}  // namespace graphpoison
