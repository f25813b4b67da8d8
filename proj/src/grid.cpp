#include "narrowgap/grid.hpp"

namespace narrowgap {

MappedGrid::MappedGrid(NarrowRegion region, int nx, int nt) : region_(std::move(region)), nx_(nx), nt_(nt)
{
    if (nx < 9 || nt < 9 || nx % 2 == 0 || nt % 2 == 0)
        throw DomainError("grid: nx and nt must be odd and at least 9");
    const int d = tangential_dim();
    const double r = region_.r_solve();
    columns_ = d == 1 ? nx : nx * nx;
    h_ = 2.0 * r / (nx - 1);
    ht_ = 1.0 / (nt - 1);
    points_.resize(columns_);
    delta_.resize(columns_);
    h2_.resize(columns_);
    ddelta_.resize(columns_);
    dh2_.resize(columns_);
    const GapProfile& prof = region_.profile();
    for (int c = 0; c < columns_; ++c) {
        const auto idx = column_indices(c);
        Vec p{};
        for (int a = 0; a < d; ++a) p[a] = -r + idx[a] * h_;
        points_[c] = p;
        const Jet j1 = prof.h1.jet(p, 1);
        const Jet j2 = prof.h2.jet(p, 1);
        delta_[c] = region_.epsilon() + j1.value - j2.value;
        if (!(delta_[c] > 0.0)) throw DomainError("grid: non-positive gap width at a grid column");
        h2_[c] = j2.value;
        for (int a = 0; a < d; ++a) {
            ddelta_[c][a] = j1.grad[a] - j2.grad[a];
            dh2_[c][a] = j2.grad[a];
        }
    }
}

std::array<int, 2> MappedGrid::column_indices(int column) const
{
    if (tangential_dim() == 1) return {column, 0};
    return {column % nx_, column / nx_};
}

int MappedGrid::column_at(const std::array<int, 2>& idx) const
{
    return tangential_dim() == 1 ? idx[0] : idx[0] + nx_ * idx[1];
}

int MappedGrid::neighbor(int column, int axis, int offset) const
{
    auto idx = column_indices(column);
    idx[axis] += offset;
    if (idx[axis] < 0 || idx[axis] >= nx_) return -1;
    return column_at(idx);
}

bool MappedGrid::lateral(int column) const
{
    const auto idx = column_indices(column);
    for (int a = 0; a < tangential_dim(); ++a)
        if (idx[a] == 0 || idx[a] == nx_ - 1) return true;
    return false;
}

Vec MappedGrid::metric(int column, int k) const
{
    Vec m{};
    const double tk = t(k);
    for (int a = 0; a < tangential_dim(); ++a) m[a] = -(dh2_[column][a] + tk * ddelta_[column][a]) / delta_[column];
    return m;
}

Vec MappedGrid::physical(int column, int k) const
{
    Vec x = points_[column];
    x[n() - 1] = -0.5 * region_.epsilon() + h2_[column] + t(k) * delta_[column];
    return x;
}

int MappedGrid::center_column() const
{
    const int mid = (nx_ - 1) / 2;
    return column_at({mid, tangential_dim() == 2 ? mid : 0});
}

MappedGrid build_grid(const NarrowRegion& region, int nx, int nt)
{
    return MappedGrid(region, nx, nt);
}

} // namespace narrowgap
