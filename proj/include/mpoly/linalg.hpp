#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "mpoly/errors.hpp"

namespace mpoly {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_norm_exponent(double p) { return p >= 1.0; }

// 1/p + 1/p' = 1, with 1 and infinity swapped.
inline double dual_exponent(double p) {
    if (p == 1.0) return kInf;
    if (p == kInf) return 1.0;
    return p / (p - 1.0);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double pnorm(const std::vector<double>& v, double p) {
    if (!is_norm_exponent(p)) throw Error("pnorm: exponent must lie in [1, inf]");
    if (p == kInf) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

// Maximizer of <g, x> over the unit p-ball; the attained value is the dual
// norm of g.  Ties: p = 1 picks the lowest index of maximal |g_j|; p = inf
// maps zero entries to +1.  g = 0 yields e_1.
inline std::vector<double> dual_argmax(const std::vector<double>& g, double p) {
    std::vector<double> x(g.size(), 0.0);
    if (x.empty()) return x;
    bool all_zero = true;
    for (double v : g)
        if (v != 0.0) { all_zero = false; break; }
    if (all_zero) {
        x[0] = 1.0;
        return x;
    }
    if (p == 1.0) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < g.size(); ++j)
            if (std::abs(g[j]) > std::abs(g[best])) best = j;
        x[best] = g[best] >= 0.0 ? 1.0 : -1.0;
        return x;
    }
    if (p == kInf) {
        for (std::size_t j = 0; j < g.size(); ++j) x[j] = g[j] >= 0.0 ? 1.0 : -1.0;
        return x;
    }
    double q = dual_exponent(p);
    double gq = pnorm(g, q);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] == 0.0) continue;
        double mag = std::pow(std::abs(g[j]) / gq, q - 1.0);
        x[j] = g[j] >= 0.0 ? mag : -mag;
    }
    return x;
}

// Scales v to unit p-norm in place; false when v = 0.
inline bool normalize(std::vector<double>& v, double p) {
    double n = pnorm(v, p);
    if (n == 0.0) return false;
    for (double& x : v) x /= n;
    return true;
}

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols) throw DimensionMismatch("Matrix::apply: length mismatch");
        std::vector<double> y(rows, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols; ++c) s += at(r, c) * x[c];
            y[r] = s;
        }
        return y;
    }

    std::vector<double> apply_transposed(const std::vector<double>& x) const {
        if (x.size() != rows) throw DimensionMismatch("Matrix::apply_transposed: length mismatch");
        std::vector<double> y(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) y[c] += at(r, c) * x[r];
        return y;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double sym_eig_max(Matrix s) {
    std::size_t n = s.rows;
    if (n == 0) return 0.0;
    if (n == 1) return s.at(0, 0);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += std::abs(s.at(i, i));
            for (std::size_t j = i + 1; j < n; ++j) off += std::abs(s.at(i, j));
        }
        if (off <= 1e-15 * (diag + off) || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = s.at(p, q);
                if (apq == 0.0) continue;
                double theta = (s.at(q, q) - s.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double skp = s.at(k, p), skq = s.at(k, q);
                    s.at(k, p) = c * skp - sn * skq;
                    s.at(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double spk = s.at(p, k), sqk = s.at(q, k);
                    s.at(p, k) = c * spk - sn * sqk;
                    s.at(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    double m = s.at(0, 0);
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, s.at(i, i));
    return m;
}

// Largest singular value, via the Gram matrix on the smaller side.
inline double sigma_max(const Matrix& m) {
    if (m.rows == 0 || m.cols == 0) return 0.0;
    std::size_t n = std::min(m.rows, m.cols);
    Matrix g(n, n);
    if (m.rows <= m.cols) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < m.cols; ++k) s += m.at(i, k) * m.at(j, k);
                g.at(i, j) = s;
            }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < m.rows; ++k) s += m.at(k, i) * m.at(k, j);
                g.at(i, j) = s;
            }
    }
    return std::sqrt(std::max(0.0, sym_eig_max(std::move(g))));
}

// Pairwise (binary counter) accumulator.  Summation order depends only on
// the order of add() calls, never on chunking, and the tree shape keeps
// rounding error logarithmic in the number of terms.
class PairwiseSum {
  public:
    void add(double x) {
        std::uint64_t c = count_++;
        std::size_t level = 0;
        while (c & 1) {
            x += levels_[level];
            levels_[level] = 0.0;
            ++level;
            c >>= 1;
        }
        if (level >= levels_.size()) levels_.resize(level + 1, 0.0);
        levels_[level] = x;
    }

    double total() const {
        double s = 0.0;
        for (double v : levels_) s += v;
        return s;
    }

  private:
    std::vector<double> levels_;
    std::uint64_t count_ = 0;
};

}  // namespace mpoly
