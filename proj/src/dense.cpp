#include "avgcell/dense.hpp"

#include "avgcell/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace avgcell {

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double DenseMatrix::inf_norm() const {
    double best = 0.0;
    for (int r = 0; r < rows_; ++r) {
        auto rr = row(r);
        best = std::max(best, std::accumulate(rr.begin(), rr.end(), 0.0, [](double acc, double v) {
                            return acc + std::abs(v);
                        }));
    }
    return best;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> out(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        auto rr = row(r);
        out[r] = std::inner_product(rr.begin(), rr.end(), x.begin(), 0.0);
    }
    return out;
}

double inf_norm(std::span<const double> v) {
    double best = 0.0;
    for (double e : v) {
        best = std::max(best, std::abs(e));
    }
    return best;
}

LuFactorization LuFactorization::factor(DenseMatrix a) {
    const int n = a.rows();
    if (n != a.cols()) {
        throw Error("LU factorization needs a square matrix");
    }
    std::vector<double> scale(n);
    for (int r = 0; r < n; ++r) {
        scale[r] = inf_norm(a.row(r));
    }

    LuFactorization f;
    f.perm_.resize(n);
    std::iota(f.perm_.begin(), f.perm_.end(), 0);

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a(k, k));
        for (int r = k + 1; r < n; ++r) {
            if (std::abs(a(r, k)) > best) {
                best = std::abs(a(r, k));
                p = r;
            }
        }
        if (!(best > kPivotTolerance * scale[p]) || best == 0.0) {
            throw SingularSystem("singular MNA matrix at column " + std::to_string(k));
        }
        if (p != k) {
            for (int c = 0; c < n; ++c) {
                std::swap(a(k, c), a(p, c));
            }
            std::swap(scale[k], scale[p]);
            std::swap(f.perm_[k], f.perm_[p]);
        }
        const double pivot = a(k, k);
        for (int r = k + 1; r < n; ++r) {
            const double m = a(r, k) / pivot;
            if (m == 0.0) {
                continue;
            }
            a(r, k) = m;
            for (int c = k + 1; c < n; ++c) {
                a(r, c) -= m * a(k, c);
            }
        }
    }
    f.lu_ = std::move(a);
    return f;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
    const int n = lu_.rows();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = b[perm_[i]];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            x[i] -= lu_(i, j) * x[j];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) {
            x[i] -= lu_(i, j) * x[j];
        }
        x[i] /= lu_(i, i);
    }
    return x;
}

}  // namespace avgcell
