#include "actcluster/numerics/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace actc {

Index shape_product(const std::vector<Index>& shape)
{
    Index n = 1;
    for (Index d : shape) {
        if (d < 0) throw std::invalid_argument("negative dimension in shape " + shape_string(shape));
        n *= d;
    }
    return n;
}

std::string shape_string(const std::vector<Index>& shape)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(std::vector<Index> shape)
    : shape_(std::move(shape)), data_(Eigen::VectorXd::Zero(shape_product(shape_)))
{
}

Tensor::Tensor(std::vector<Index> shape, Eigen::VectorXd data)
    : shape_(std::move(shape)), data_(std::move(data))
{
    if (shape_product(shape_) != data_.size()) {
        throw std::invalid_argument("tensor shape " + shape_string(shape_) + " holds "
                                    + std::to_string(shape_product(shape_)) + " elements but data has "
                                    + std::to_string(data_.size()));
    }
}

Tensor::Tensor(std::vector<Index> shape, std::initializer_list<double> values)
    : Tensor(std::move(shape), Eigen::Map<const Eigen::VectorXd>(values.begin(), static_cast<Index>(values.size())))
{
}

Index Tensor::dim(std::size_t axis) const
{
    if (axis >= shape_.size()) {
        throw std::out_of_range("axis " + std::to_string(axis) + " out of range for tensor of rank "
                                + std::to_string(shape_.size()));
    }
    return shape_[axis];
}

Eigen::Map<RowMatrixXd> Tensor::matrix(Index rows, Index cols)
{
    if (rows * cols != data_.size()) throw std::invalid_argument("matrix view does not cover tensor data");
    return {data_.data(), rows, cols};
}

Eigen::Map<const RowMatrixXd> Tensor::matrix(Index rows, Index cols) const
{
    if (rows * cols != data_.size()) throw std::invalid_argument("matrix view does not cover tensor data");
    return {data_.data(), rows, cols};
}

Tensor Tensor::reshaped(std::vector<Index> shape) const
{
    return Tensor(std::move(shape), data_);
}

}  // namespace actc
