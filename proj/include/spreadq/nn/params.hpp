#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spreadq::nn {

using Flat = Eigen::VectorXd;
using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;

struct ParamBlock {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index offset = 0;

    Eigen::Index size() const { return rows * cols; }
    bool operator==(const ParamBlock&) const = default;
};

// Named matrices packed into one flat vector (column-major per block).
class ParamLayout {
public:
    std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols);

    const std::vector<ParamBlock>& blocks() const { return blocks_; }
    const ParamBlock& block(std::size_t id) const { return blocks_[id]; }
    Eigen::Index total() const { return total_; }
    std::optional<std::size_t> find(const std::string& name) const;
    // Block containing flat index `i`.
    const ParamBlock& block_of(Eigen::Index i) const;

    bool operator==(const ParamLayout&) const = default;

private:
    std::vector<ParamBlock> blocks_;
    Eigen::Index total_ = 0;
};

inline MatMap view(Flat& v, const ParamBlock& b) { return MatMap(v.data() + b.offset, b.rows, b.cols); }
inline ConstMatMap view(const Flat& v, const ParamBlock& b) { return ConstMatMap(v.data() + b.offset, b.rows, b.cols); }

}  // namespace spreadq::nn
