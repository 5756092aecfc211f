#include "larx/blockops.hpp"

#include "larx/error.hpp"
#include "larx/linalg.hpp"

#include <numeric>
#include <string>

namespace larx {

BlockStructure::BlockStructure(std::vector<Index> sizes) : sizes_(std::move(sizes))
{
    offsets_.reserve(sizes_.size());
    for (Index s : sizes_) {
        if (s < 1)
            throw Error(Errc::structural, "block size must be at least 1, got " + std::to_string(s));
        offsets_.push_back(total_);
        total_ += s;
    }
}

BlockStructure BlockStructure::singletons(Index count)
{
    return BlockStructure(std::vector<Index>(static_cast<std::size_t>(count), 1));
}

BlockStructure BlockStructure::uniform(Index count, Index size)
{
    return BlockStructure(std::vector<Index>(static_cast<std::size_t>(count), size));
}

BlockVec::BlockVec(VectorXd data, BlockStructure structure)
    : data_(std::move(data)), structure_(std::move(structure))
{
    if (structure_.total() != data_.size())
        throw Error(Errc::structural, "block vector length " + std::to_string(data_.size()) +
                                          " does not match block total " +
                                          std::to_string(structure_.total()));
}

BlockMat::BlockMat(MatrixXd data, BlockStructure structure, Axis axis)
    : data_(std::move(data)), structure_(std::move(structure)), axis_(axis)
{
    const Index extent = axis_ == Axis::rows ? data_.rows() : data_.cols();
    if (structure_.total() != extent)
        throw Error(Errc::structural, "block matrix extent " + std::to_string(extent) +
                                          " does not match block total " +
                                          std::to_string(structure_.total()));
}

MatrixXd BlockMat::block(Index i) const
{
    if (axis_ == Axis::rows)
        return data_.middleRows(structure_.offset(i), structure_.size(i));
    return data_.middleCols(structure_.offset(i), structure_.size(i));
}

MatrixXd direct_sum(std::span<const MatrixXd> blocks)
{
    if (blocks.empty())
        throw Error(Errc::structural, "direct sum of an empty sequence");
    Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    MatrixXd out = MatrixXd::Zero(rows, cols);
    Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

MatrixXd direct_sum(const BlockVec& a)
{
    const auto& s = a.structure();
    MatrixXd out = MatrixXd::Zero(s.total(), s.count());
    for (Index j = 0; j < s.count(); ++j)
        out.col(j).segment(s.offset(j), s.size(j)) = a.block(j);
    return out;
}

namespace {

void require_compatible(const BlockStructure& a, const BlockStructure& b, const char* what)
{
    if (!a.compatible(b))
        throw Error(Errc::structural, std::string(what) + ": block counts differ (" +
                                          std::to_string(a.count()) + " vs " +
                                          std::to_string(b.count()) + ")");
}

} // namespace

BlockMat khatri_rao(const BlockMat& a, const BlockMat& b)
{
    if (a.axis() != Axis::rows || b.axis() != Axis::rows)
        throw Error(Errc::structural, "khatri_rao expects row-blocked operands");
    require_compatible(a.structure(), b.structure(), "khatri_rao");
    const Index k = a.blocks();
    std::vector<Index> sizes;
    sizes.reserve(static_cast<std::size_t>(k));
    Index rows = 0;
    for (Index i = 0; i < k; ++i) {
        sizes.push_back(a.structure().size(i) * b.structure().size(i));
        rows += sizes.back();
    }
    MatrixXd out(rows, a.data().cols() * b.data().cols());
    Index r = 0;
    for (Index i = 0; i < k; ++i) {
        const MatrixXd blk = kron(a.block(i), b.block(i));
        out.middleRows(r, blk.rows()) = blk;
        r += blk.rows();
    }
    return BlockMat(std::move(out), BlockStructure(std::move(sizes)), Axis::rows);
}

BlockVec khatri_rao_vec(const BlockVec& a, const BlockVec& b)
{
    require_compatible(a.structure(), b.structure(), "khatri_rao_vec");
    const BlockMat prod = khatri_rao(BlockMat(a.data(), a.structure(), Axis::rows),
                                     BlockMat(b.data(), b.structure(), Axis::rows));
    return BlockVec(prod.data().col(0), prod.structure());
}

BlockMat block_identity(const BlockStructure& s)
{
    return BlockMat(MatrixXd::Identity(s.total(), s.total()), s, Axis::rows);
}

KhatriRaoFactors factor_khatri_rao(const BlockVec& a, const BlockVec& b)
{
    require_compatible(a.structure(), b.structure(), "factor_khatri_rao");
    const BlockMat am(a.data(), a.structure(), Axis::rows);
    const BlockMat bm(b.data(), b.structure(), Axis::rows);
    return {khatri_rao(am, block_identity(b.structure())).data(),
            khatri_rao(block_identity(a.structure()), bm).data()};
}

bool bds_transpose_commutes(std::span<const MatrixXd> blocks)
{
    if (blocks.empty())
        return true;
    std::vector<MatrixXd> transposed;
    transposed.reserve(blocks.size());
    for (const auto& b : blocks)
        transposed.emplace_back(b.transpose());
    const MatrixXd lhs = direct_sum(blocks).transpose();
    const MatrixXd rhs = direct_sum(transposed);
    return lhs.rows() == rhs.rows() && lhs.cols() == rhs.cols() && (lhs.array() == rhs.array()).all();
}

BlockVec blockwise_inner(const BlockVec& a, const BlockVec& b)
{
    if (!(a.structure() == b.structure()))
        throw Error(Errc::structural, "blockwise_inner: block structures differ");
    VectorXd out(a.blocks());
    for (Index j = 0; j < a.blocks(); ++j)
        out(j) = a.block(j).dot(b.block(j));
    return BlockVec(std::move(out), BlockStructure::singletons(a.blocks()));
}

MatrixXd left_multiply_row_blocks(const MatrixXd& stacked, const BlockStructure& rows,
                                  std::span<const MatrixXd> m)
{
    if (rows.total() != stacked.rows() || static_cast<Index>(m.size()) != rows.count())
        throw Error(Errc::structural, "left_multiply_row_blocks: structure mismatch");
    Index out_rows = 0;
    for (Index i = 0; i < rows.count(); ++i) {
        if (m[static_cast<std::size_t>(i)].cols() != rows.size(i))
            throw Error(Errc::dimension_mismatch, "left_multiply_row_blocks: multiplier shape");
        out_rows += m[static_cast<std::size_t>(i)].rows();
    }
    MatrixXd out(out_rows, stacked.cols());
    Index r = 0;
    for (Index i = 0; i < rows.count(); ++i) {
        const auto& mi = m[static_cast<std::size_t>(i)];
        out.middleRows(r, mi.rows()) = mi * stacked.middleRows(rows.offset(i), rows.size(i));
        r += mi.rows();
    }
    return out;
}

MatrixXd right_multiply_col_blocks(const MatrixXd& stacked, const BlockStructure& cols,
                                   std::span<const MatrixXd> m)
{
    if (cols.total() != stacked.cols() || static_cast<Index>(m.size()) != cols.count())
        throw Error(Errc::structural, "right_multiply_col_blocks: structure mismatch");
    Index out_cols = 0;
    for (Index i = 0; i < cols.count(); ++i) {
        if (m[static_cast<std::size_t>(i)].rows() != cols.size(i))
            throw Error(Errc::dimension_mismatch, "right_multiply_col_blocks: multiplier shape");
        out_cols += m[static_cast<std::size_t>(i)].cols();
    }
    MatrixXd out(stacked.rows(), out_cols);
    Index c = 0;
    for (Index i = 0; i < cols.count(); ++i) {
        const auto& mi = m[static_cast<std::size_t>(i)];
        out.middleCols(c, mi.cols()) = stacked.middleCols(cols.offset(i), cols.size(i)) * mi;
        c += mi.cols();
    }
    return out;
}

BlockVec ones(const BlockStructure& s)
{
    return BlockVec(VectorXd::Ones(s.total()), s);
}

} // namespace larx
