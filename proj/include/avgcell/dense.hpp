#pragma once

#include <span>
#include <vector>

namespace avgcell {

/// Row-major dense matrix. System orders here are a handful of rows, so
/// nothing fancier is warranted.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }

    double& operator()(int r, int c) { return data_[r * cols_ + c]; }
    double operator()(int r, int c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> row(int r) const {
        return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }

    void fill(double v);
    [[nodiscard]] double inf_norm() const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    [[nodiscard]] bool operator==(const DenseMatrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting. factor() throws SingularSystem
/// when the best available pivot is below 1e-13 of its row's infinity norm.
class LuFactorization {
public:
    static constexpr double kPivotTolerance = 1e-13;

    [[nodiscard]] static LuFactorization factor(DenseMatrix a);

    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
    [[nodiscard]] int order() const noexcept { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<int> perm_;
};

[[nodiscard]] double inf_norm(std::span<const double> v);

}  // namespace avgcell
