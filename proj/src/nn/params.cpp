#include "spreadq/nn/params.hpp"

#include "spreadq/error.hpp"

namespace spreadq::nn {

std::size_t ParamLayout::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    if (rows <= 0 || cols <= 0) fail(ErrorCode::ShapeMismatch, "block " + name + " has empty shape");
    if (find(name)) fail(ErrorCode::InvalidArgument, "duplicate parameter block " + name);
    blocks_.push_back({std::move(name), rows, cols, total_});
    total_ += rows * cols;
    return blocks_.size() - 1;
}

std::optional<std::size_t> ParamLayout::find(const std::string& name) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].name == name) return i;
    }
    return std::nullopt;
}

const ParamBlock& ParamLayout::block_of(Eigen::Index i) const {
    for (const auto& b : blocks_) {
        if (i >= b.offset && i < b.offset + b.size()) return b;
    }
    fail(ErrorCode::IndexOutOfRange, "flat index outside layout");
}

}  // namespace spreadq::nn
