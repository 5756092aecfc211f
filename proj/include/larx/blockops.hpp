#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace larx {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Ordered block lengths along one axis.
class BlockStructure {
public:
    BlockStructure() = default;
    explicit BlockStructure(std::vector<Index> sizes);

    static BlockStructure singletons(Index count);
    static BlockStructure uniform(Index count, Index size);

    Index count() const noexcept { return static_cast<Index>(sizes_.size()); }
    Index size(Index i) const { return sizes_.at(static_cast<std::size_t>(i)); }
    Index offset(Index i) const { return offsets_.at(static_cast<std::size_t>(i)); }
    Index total() const noexcept { return total_; }
    const std::vector<Index>& sizes() const noexcept { return sizes_; }

    bool compatible(const BlockStructure& other) const noexcept { return count() == other.count(); }
    bool operator==(const BlockStructure& other) const noexcept { return sizes_ == other.sizes_; }

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
    Index total_ = 0;
};

class BlockVec {
public:
    BlockVec() = default;
    BlockVec(VectorXd data, BlockStructure structure);

    const VectorXd& data() const noexcept { return data_; }
    VectorXd& data() noexcept { return data_; }
    const BlockStructure& structure() const noexcept { return structure_; }
    Index blocks() const noexcept { return structure_.count(); }

    auto block(Index i) { return data_.segment(structure_.offset(i), structure_.size(i)); }
    auto block(Index i) const { return data_.segment(structure_.offset(i), structure_.size(i)); }

private:
    VectorXd data_;
    BlockStructure structure_;
};

enum class Axis { rows, cols };

class BlockMat {
public:
    BlockMat() = default;
    BlockMat(MatrixXd data, BlockStructure structure, Axis axis);

    const MatrixXd& data() const noexcept { return data_; }
    const BlockStructure& structure() const noexcept { return structure_; }
    Axis axis() const noexcept { return axis_; }
    Index blocks() const noexcept { return structure_.count(); }

    MatrixXd block(Index i) const;

private:
    MatrixXd data_;
    BlockStructure structure_;
    Axis axis_ = Axis::rows;
};

// Block-diagonal placement of an arbitrary matrix sequence.
MatrixXd direct_sum(std::span<const MatrixXd> blocks);

// a^⊕: column block vector laid out as a block-diagonal matrix with one column per block.
MatrixXd direct_sum(const BlockVec& a);

// Row-blocked Khatri-Rao product; row block i of the result is A_i ⊗ B_i.
BlockMat khatri_rao(const BlockMat& a, const BlockMat& b);

BlockVec khatri_rao_vec(const BlockVec& a, const BlockVec& b);

// Identity matrix carrying the block structure of its rows.
BlockMat block_identity(const BlockStructure& s);

struct KhatriRaoFactors {
    MatrixXd left;   // a ⊙ I_b
    MatrixXd right;  // I_a ⊙ b
};

KhatriRaoFactors factor_khatri_rao(const BlockVec& a, const BlockVec& b);

bool bds_transpose_commutes(std::span<const MatrixXd> blocks);

// Per-block inner products a_j'b_j, returned with singleton blocks.
BlockVec blockwise_inner(const BlockVec& a, const BlockVec& b);

// Vertical stack of the row blocks of the direct sum, each left-multiplied by m[i].
MatrixXd left_multiply_row_blocks(const MatrixXd& stacked, const BlockStructure& rows,
                                  std::span<const MatrixXd> m);

// Horizontal stack of the column blocks, each right-multiplied by m[i].
MatrixXd right_multiply_col_blocks(const MatrixXd& stacked, const BlockStructure& cols,
                                   std::span<const MatrixXd> m);

BlockVec ones(const BlockStructure& s);

} // namespace larx
