#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lploc/lattice.hpp"

namespace lploc {

/// Matrix on a box stored by diagonals: for each offset k the sequence
/// i -> A(i, i+k), indexed by the box enumeration of i.  Entries whose
/// column i+k leaves the box are identically zero.
class BandMatrix {
public:
    explicit BandMatrix(Box box) : box_(std::move(box)) {}

    static BandMatrix identity(Box box) {
        BandMatrix m(std::move(box));
        m.set_diagonal(LatticePoint::zero(m.box_.dim()),
                       std::vector<double>(m.box_.site_count(), 1.0));
        return m;
    }

    const Box& box() const { return box_; }

    void set_diagonal(const LatticePoint& offset, std::vector<double> values) {
        if (offset.dim() != box_.dim())
            throw std::invalid_argument("BandMatrix: offset dimension mismatch");
        if (values.size() != box_.site_count())
            throw std::invalid_argument("BandMatrix: diagonal length mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!box_.contains(box_.site_at(i) + offset)) values[i] = 0.0;
        diagonals_[offset] = std::move(values);
    }

    void add_at(const LatticePoint& row, const LatticePoint& col, double value) {
        const LatticePoint offset = col - row;
        auto it = diagonals_.find(offset);
        if (it == diagonals_.end())
            it = diagonals_.emplace(offset, std::vector<double>(box_.site_count(), 0.0)).first;
        if (box_.contains(row) && box_.contains(col))
            it->second[box_.index_of(row)] += value;
    }

    double at(const LatticePoint& row, const LatticePoint& col) const {
        if (!box_.contains(row) || !box_.contains(col)) return 0.0;
        const auto it = diagonals_.find(col - row);
        if (it == diagonals_.end()) return 0.0;
        return it->second[box_.index_of(row)];
    }

    const std::map<LatticePoint, std::vector<double>>& diagonals() const { return diagonals_; }

    // Dense row-major copy, box enumeration order.
    std::vector<double> to_dense() const {
        const std::size_t n = box_.site_count();
        std::vector<double> dense(n * n, 0.0);
        for (const auto& [offset, values] : diagonals_)
            for (std::size_t i = 0; i < n; ++i) {
                if (values[i] == 0.0) continue;
                const LatticePoint col = box_.site_at(i) + offset;
                if (box_.contains(col)) dense[i * n + box_.index_of(col)] += values[i];
            }
        return dense;
    }

private:
    Box box_;
    std::map<LatticePoint, std::vector<double>> diagonals_;
};

// Diagonal calculus for the product: Z_k(n) = sum_l A_l(n) B_{k-l}(n+l),
// truncated to the box.  Entrywise equal to the dense product of the two
// truncations.
inline BandMatrix diagonal_product(const BandMatrix& a, const BandMatrix& b) {
    if (!(a.box() == b.box()))
        throw std::invalid_argument("diagonal_product: box mismatch");
    const Box& box = a.box();
    const std::size_t n = box.site_count();
    std::map<LatticePoint, std::vector<double>> acc;
    for (const auto& [l, a_diag] : a.diagonals()) {
        for (const auto& [j, b_diag] : b.diagonals()) {
            const LatticePoint k = l + j;
            auto it = acc.find(k);
            if (it == acc.end()) it = acc.emplace(k, std::vector<double>(n, 0.0)).first;
            auto& z = it->second;
            for (std::size_t i = 0; i < n; ++i) {
                if (a_diag[i] == 0.0) continue;
                const LatticePoint mid = box.site_at(i) + l;
                if (!box.contains(mid)) continue;
                z[i] += a_diag[i] * b_diag[box.index_of(mid)];
            }
        }
    }
    BandMatrix out(box);
    for (auto& [k, z] : acc) out.set_diagonal(k, std::move(z));
    return out;
}

// sup over stored offsets k of (sup_i |A_k(i)|) e^{s |k|_inf}.
inline double banach_norm(const BandMatrix& a, double s) {
    if (s < 0) throw std::invalid_argument("banach_norm: weight must be non-negative");
    double best = 0.0;
    for (const auto& [offset, values] : a.diagonals()) {
        double m = 0.0;
        for (const double v : values) m = std::max(m, std::abs(v));
        best = std::max(best, m * std::exp(s * static_cast<double>(sup_norm(offset))));
    }
    return best;
}

inline bool is_hermitian(const BandMatrix& a, double tol = 0.0) {
    const Box& box = a.box();
    for (const auto& [offset, values] : a.diagonals())
        for (std::size_t i = 0; i < values.size(); ++i) {
            const LatticePoint row = box.site_at(i);
            const LatticePoint col = row + offset;
            if (!box.contains(col)) continue;
            if (std::abs(values[i] - a.at(col, row)) > tol) return false;
        }
    return true;
}

}  // namespace lploc
