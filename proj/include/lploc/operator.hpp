#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lploc/band_matrix.hpp"
#include "lploc/lattice.hpp"

namespace lploc {

enum class Boundary { dirichlet, periodic };

inline std::string to_string(Boundary b) {
    return b == Boundary::dirichlet ? "dirichlet" : "periodic";
}

/// Finite-volume Schroedinger operator eps * (l1-adjacency) + diag(V) on a
/// box.  Symmetric by construction; on a periodic box smaller than twice
/// the hop range coincident bonds merge additively.
struct FiniteOperator {
    Box box;
    Boundary boundary;
    double epsilon;
    std::vector<double> potential;  // box enumeration order
};

inline FiniteOperator assemble(std::vector<double> potential, Box box, double epsilon,
                               Boundary boundary) {
    if (epsilon < 0) throw std::invalid_argument("assemble: coupling must be >= 0");
    if (potential.size() != box.site_count())
        throw std::invalid_argument("assemble: potential length does not match box");
    return FiniteOperator{std::move(box), boundary, epsilon, std::move(potential)};
}

namespace detail {

inline LatticePoint wrap_into(const Box& box, const LatticePoint& p) {
    std::vector<Coord> c(p.coords());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const Coord side = box.side(i);
        Coord x = (c[i] - box.lo()[i]) % side;
        if (x < 0) x += side;
        c[i] = box.lo()[i] + x;
    }
    return LatticePoint(std::move(c));
}

template <typename Emit>
inline void for_each_entry(const FiniteOperator& h, Emit&& emit) {
    const std::size_t n = h.box.site_count();
    for (std::size_t i = 0; i < n; ++i) {
        const LatticePoint site = h.box.site_at(i);
        emit(i, i, h.potential[i]);
        if (h.epsilon == 0.0) continue;
        for (const LatticePoint& nb : neighbors(site)) {
            if (h.boundary == Boundary::dirichlet) {
                if (h.box.contains(nb)) emit(i, h.box.index_of(nb), h.epsilon);
            } else {
                emit(i, h.box.index_of(wrap_into(h.box, nb)), h.epsilon);
            }
        }
    }
}

}  // namespace detail

// Dense row-major matrix of the operator.
inline std::vector<double> dense_matrix(const FiniteOperator& h) {
    const std::size_t n = h.box.site_count();
    std::vector<double> m(n * n, 0.0);
    detail::for_each_entry(h, [&](std::size_t i, std::size_t j, double v) { m[i * n + j] += v; });
    return m;
}

// The same operator viewed by diagonals.  Periodic wrap entries appear at
// their true box offsets.
inline BandMatrix band_view(const FiniteOperator& h) {
    BandMatrix m(h.box);
    detail::for_each_entry(h, [&](std::size_t i, std::size_t j, double v) {
        m.add_at(h.box.site_at(i), h.box.site_at(j), v);
    });
    return m;
}

}  // namespace lploc
