#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "graphpoison/common.hpp"
#include "graphpoison/graph.hpp"

namespace graphpoison {

enum class Method { deepwalk, line2 };

inline const char* to_string(Method m) { return m == Method::deepwalk ? "deepwalk" : "line2"; }

inline Method method_from_string(const std::string& s) {
    if (s == "deepwalk") return Method::deepwalk;
    if (s == "line2" || s == "line") return Method::line2;
    throw ConfigError("unknown method '" + s + "' (expected deepwalk or line2)");
}

struct ProximitySpec {
    Method method = Method::deepwalk;
    int window = 5;      // context window size T (deepwalk only)
    double neg = 1.0;    // negative-sample count b
    int dim = 32;        // embedding dimension d

    void validate(int n) const {
        if (window < 1) throw ConfigError("window must be >= 1");
        if (neg < 1.0) throw ConfigError("negative-sample count must be >= 1");
        if (dim < 1 || dim >= n) throw ConfigError("dim must satisfy 1 <= d < n");
    }
};

/// The shifted-log proximity matrix Z and its observed-cell support.
/// Cells where the shifted log is non-positive (or the raw matrix is zero)
/// are truncated to 0 and excluded from omega, so the factorization sees a
/// sparse positive matrix.
struct ProximityModel {
    Matrix Z;
    BoolArray omega;
    std::vector<std::vector<int>> omega_rows;  // omega_i: observed columns per row
    std::vector<std::vector<int>> omega_cols;  // observed rows per column
    ProximitySpec spec;
    double vol = 0.0;
    Vector degrees;
};

/// Z for a weighted adjacency W. `degrees`/`vol` default to those of W but
/// can be pinned to externally fixed values, matching the convention that
/// they are constants under differentiation.
inline ProximityModel build_Z(const Matrix& W, const ProximitySpec& spec,
                              const Vector* fixed_degrees = nullptr,
                              const double* fixed_vol = nullptr) {
    const int n = static_cast<int>(W.rows());
    spec.validate(n);

    Vector deg = fixed_degrees ? *fixed_degrees : Vector(W.rowwise().sum());
    double vol = fixed_vol ? *fixed_vol : W.sum();
    for (int i = 0; i < n; ++i)
        if (!(deg[i] > 0.0))
            throw NumericError("node " + std::to_string(i) + " is isolated (degree 0)");

    Matrix M;
    if (spec.method == Method::line2) {
        M = vol * (deg.cwiseInverse().asDiagonal() * W * deg.cwiseInverse().asDiagonal());
    } else {
        Matrix P = deg.cwiseInverse().asDiagonal() * W;
        Matrix S = Matrix::Zero(n, n);
        Matrix Pr = Matrix::Identity(n, n);
        for (int r = 1; r <= spec.window; ++r) {
            Pr = Pr * P;
            S += Pr;
        }
        S /= static_cast<double>(spec.window);
        M = vol * (S * deg.cwiseInverse().asDiagonal());
    }

    ProximityModel model;
    model.spec = spec;
    model.vol = vol;
    model.degrees = std::move(deg);
    model.Z = Matrix::Zero(n, n);
    model.omega = BoolArray::Constant(n, n, false);
    model.omega_rows.assign(n, {});
    model.omega_cols.assign(n, {});
    const double log_b = std::log(spec.neg);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!(M(i, j) > 0.0)) continue;
            double z = std::log(M(i, j)) - log_b;
            if (z <= 0.0) continue;
            model.Z(i, j) = z;
            model.omega(i, j) = true;
            model.omega_rows[i].push_back(j);
            model.omega_cols[j].push_back(i);
        }
    return model;
}

inline ProximityModel build_Z(const Graph& g, const ProximitySpec& spec) {
    if (g.min_degree() < 1) throw NumericError("graph has an isolated node");
    return build_Z(g.adjacency(), spec);
}

}  // namespace graphpoison
