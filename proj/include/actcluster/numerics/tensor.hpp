#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace actc {

using Index = Eigen::Index;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense row-major tensor of doubles. The last axis is contiguous.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<Index> shape);
    Tensor(std::vector<Index> shape, Eigen::VectorXd data);
    Tensor(std::vector<Index> shape, std::initializer_list<double> values);

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const std::vector<Index>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    Index dim(std::size_t axis) const;
    Index size() const { return data_.size(); }

    Eigen::VectorXd& data() { return data_; }
    const Eigen::VectorXd& data() const { return data_; }

    double& operator[](Index i) { return data_[i]; }
    double operator[](Index i) const { return data_[i]; }

    double& at(Index i, Index j) { return data_[i * shape_[1] + j]; }
    double at(Index i, Index j) const { return data_[i * shape_[1] + j]; }
    double& at(Index i, Index j, Index k) { return data_[(i * shape_[1] + j) * shape_[2] + k]; }
    double at(Index i, Index j, Index k) const { return data_[(i * shape_[1] + j) * shape_[2] + k]; }

    /// View of the data as a row-major (rows x cols) matrix; rows*cols must equal size().
    Eigen::Map<RowMatrixXd> matrix(Index rows, Index cols);
    Eigen::Map<const RowMatrixXd> matrix(Index rows, Index cols) const;

    /// Same data, new shape with equal element count.
    Tensor reshaped(std::vector<Index> shape) const;

    bool all_finite() const { return data_.allFinite(); }

private:
    std::vector<Index> shape_;
    Eigen::VectorXd data_;
};

Index shape_product(const std::vector<Index>& shape);
std::string shape_string(const std::vector<Index>& shape);

}  // namespace actc
