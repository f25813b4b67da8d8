#ifndef NARROWGAP_GRID_HPP
#define NARROWGAP_GRID_HPP

#include <array>
#include <vector>

#include "narrowgap/common.hpp"
#include "narrowgap/geometry.hpp"

namespace narrowgap {

/// Structured grid on the thin domain in mapped coordinates (x', t).
///
/// Tangential coordinates are uniform on [-r_solve, r_solve]^{n-1}; the
/// vertical coordinate t in [0, 1] maps to
///   x_n = (1 - t)(-eps/2 + h2(x')) + t(eps/2 + h1(x')),
/// so t = 0 lies on the bottom graph and t = 1 on the top one. Nodes are
/// numbered column by column with t fastest.
class MappedGrid {
public:
    /// nx, nt >= 9 and odd. Throws DomainError on a non-positive gap width.
    MappedGrid(NarrowRegion region, int nx, int nt);

    const NarrowRegion& region() const { return region_; }
    int n() const { return region_.n(); }
    int tangential_dim() const { return region_.n() - 1; }
    int nx() const { return nx_; }
    int nt() const { return nt_; }
    double h() const { return h_; }
    double ht() const { return ht_; }

    int columns() const { return columns_; }
    int nodes() const { return columns_ * nt_; }
    int node(int column, int k) const { return column * nt_ + k; }
    int column_of(int node) const { return node / nt_; }
    int level_of(int node) const { return node % nt_; }

    /// Per-axis lattice indices of a column.
    std::array<int, 2> column_indices(int column) const;
    int column_at(const std::array<int, 2>& idx) const;
    /// Neighbouring column along tangential axis `axis` (offset +-1).
    int neighbor(int column, int axis, int offset) const;
    bool lateral(int column) const;

    const Vec& column_point(int column) const { return points_[column]; }
    double t(int k) const { return k == nt_ - 1 ? 1.0 : k * ht_; }
    double delta(int column) const { return delta_[column]; }
    /// Gradients of delta and h2 at the column.
    const Vec& ddelta(int column) const { return ddelta_[column]; }
    const Vec& dh2(int column) const { return dh2_[column]; }
    /// d t / d x_a (tangential a) at node (column, k): -(dh2 + t ddelta) / delta.
    Vec metric(int column, int k) const;
    Vec physical(int column, int k) const;
    Vec physical_node(int node) const { return physical(column_of(node), level_of(node)); }
    /// Index of the column at x' = 0'.
    int center_column() const;

private:
    NarrowRegion region_;
    int nx_, nt_, columns_;
    double h_, ht_;
    std::vector<Vec> points_;
    std::vector<double> delta_;
    std::vector<double> h2_;
    std::vector<Vec> ddelta_;
    std::vector<Vec> dh2_;
};

MappedGrid build_grid(const NarrowRegion& region, int nx, int nt);

} // namespace narrowgap

#endif
