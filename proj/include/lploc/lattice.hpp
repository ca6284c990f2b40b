#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lploc {

using Coord = std::int64_t;

/// A point of the integer lattice Z^d.  Immutable after construction.
class LatticePoint {
public:
    LatticePoint() = default;

    explicit LatticePoint(std::vector<Coord> coords) : coords_(std::move(coords)) {
        if (coords_.empty())
            throw std::invalid_argument("LatticePoint: dimension must be >= 1");
    }

    LatticePoint(std::initializer_list<Coord> coords)
        : LatticePoint(std::vector<Coord>(coords)) {}

    static LatticePoint zero(std::size_t dim) {
        return LatticePoint(std::vector<Coord>(dim, 0));
    }

    // j-th unit vector, 0-based.
    static LatticePoint unit(std::size_t dim, std::size_t j) {
        std::vector<Coord> c(dim, 0);
        c.at(j) = 1;
        return LatticePoint(std::move(c));
    }

    std::size_t dim() const { return coords_.size(); }
    Coord operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<Coord>& coords() const { return coords_; }

    bool operator==(const LatticePoint& o) const = default;

    // Lexicographic; also the canonical basis order of box_sites.
    bool operator<(const LatticePoint& o) const {
        return coords_ < o.coords_;
    }

    LatticePoint operator+(const LatticePoint& o) const {
        check_dim(o);
        std::vector<Coord> c(coords_);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
        return LatticePoint(std::move(c));
    }

    LatticePoint operator-(const LatticePoint& o) const {
        check_dim(o);
        std::vector<Coord> c(coords_);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
        return LatticePoint(std::move(c));
    }

    LatticePoint operator-() const {
        std::vector<Coord> c(coords_);
        for (auto& x : c) x = -x;
        return LatticePoint(std::move(c));
    }

private:
    void check_dim(const LatticePoint& o) const {
        if (o.dim() != dim())
            throw std::invalid_argument("LatticePoint: dimension mismatch");
    }

    std::vector<Coord> coords_;
};

inline std::int64_t sup_norm(const LatticePoint& p) {
    std::int64_t m = 0;
    for (std::size_t i = 0; i < p.dim(); ++i)
        m = std::max<std::int64_t>(m, p[i] < 0 ? -p[i] : p[i]);
    return m;
}

inline std::int64_t l1_norm(const LatticePoint& p) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < p.dim(); ++i)
        s += p[i] < 0 ? -p[i] : p[i];
    return s;
}

// The 2d points at l1 distance 1, axis by axis, minus direction first.
inline std::vector<LatticePoint> neighbors(const LatticePoint& p) {
    std::vector<LatticePoint> out;
    out.reserve(2 * p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) {
        std::vector<Coord> c(p.coords());
        c[i] -= 1;
        out.emplace_back(c);
        c[i] += 2;
        out.emplace_back(std::move(c));
    }
    return out;
}

inline std::string to_string(const LatticePoint& p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.dim(); ++i) {
        if (i) os << ',';
        os << p[i];
    }
    os << ')';
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const LatticePoint& p) {
    return os << to_string(p);
}

/// Axis-aligned box [lo_1,hi_1] x ... x [lo_d,hi_d], corners inclusive.
/// Sites are enumerated lexicographically (first coordinate most
/// significant); that order defines all matrix indexing downstream.
class Box {
public:
    Box(LatticePoint lo, LatticePoint hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.dim() != hi_.dim())
            throw std::invalid_argument("Box: corner dimension mismatch");
        for (std::size_t i = 0; i < lo_.dim(); ++i)
            if (lo_[i] > hi_[i])
                throw std::invalid_argument("Box: lo > hi in coordinate " + std::to_string(i));
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < lo_.dim(); ++i) {
            const std::uint64_t side = static_cast<std::uint64_t>(hi_[i] - lo_[i]) + 1u;
            if (count > (std::uint64_t{1} << 62) / side)
                throw std::overflow_error("Box: site count exceeds machine range");
            count *= side;
        }
        site_count_ = count;
    }

    std::size_t dim() const { return lo_.dim(); }
    const LatticePoint& lo() const { return lo_; }
    const LatticePoint& hi() const { return hi_; }
    Coord side(std::size_t i) const { return hi_[i] - lo_[i] + 1; }
    std::uint64_t site_count() const { return site_count_; }

    bool operator==(const Box& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

    bool contains(const LatticePoint& p) const {
        if (p.dim() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
        return true;
    }

    // Position of p in the lexicographic enumeration.
    std::size_t index_of(const LatticePoint& p) const {
        if (!contains(p))
            throw std::out_of_range("Box::index_of: site outside box " + to_string(p));
        std::size_t idx = 0;
        for (std::size_t i = 0; i < dim(); ++i)
            idx = idx * static_cast<std::size_t>(side(i)) + static_cast<std::size_t>(p[i] - lo_[i]);
        return idx;
    }

    LatticePoint site_at(std::size_t idx) const {
        if (idx >= site_count_)
            throw std::out_of_range("Box::site_at: index out of range");
        std::vector<Coord> c(dim());
        for (std::size_t i = dim(); i-- > 0;) {
            const auto s = static_cast<std::size_t>(side(i));
            c[i] = lo_[i] + static_cast<Coord>(idx % s);
            idx /= s;
        }
        return LatticePoint(std::move(c));
    }

private:
    LatticePoint lo_, hi_;
    std::uint64_t site_count_ = 0;
};

inline std::vector<LatticePoint> box_sites(const Box& b) {
    std::vector<LatticePoint> out;
    out.reserve(b.site_count());
    for (std::size_t i = 0; i < b.site_count(); ++i)
        out.push_back(b.site_at(i));
    return out;
}

}  // namespace lploc
