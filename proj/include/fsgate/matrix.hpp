#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fsgate {

// Dense column-major matrix of doubles. Columns are features, rows are
// recordings; the kernels walk one column at a time.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept
    {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }
    double operator()(std::size_t r, std::size_t c) const noexcept
    {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }

    std::span<double> col(std::size_t c) noexcept
    {
        return {data_.data() + c * rows_, rows_};
    }
    std::span<const double> col(std::size_t c) const noexcept
    {
        return {data_.data() + c * rows_, rows_};
    }

    Matrix select_columns(std::span<const std::size_t> columns) const
    {
        Matrix out(rows_, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            assert(columns[j] < cols_);
            auto src = col(columns[j]);
            auto dst = out.col(j);
            std::copy(src.begin(), src.end(), dst.begin());
        }
        return out;
    }

    Matrix select_rows(std::span<const std::size_t> rows) const
    {
        Matrix out(rows.size(), cols_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t i = 0; i < rows.size(); ++i)
                out(i, c) = (*this)(rows[i], c);
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace fsgate
