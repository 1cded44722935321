// dem.hpp - regular-grid elevation cloud with exact node lookup,
// nearest-node projection and candidate-center enumeration.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crosslocate/point.hpp"

namespace crosslocate {

/// Immutable regular elevation grid. Cell (i, j) sits at
/// origin + (j*resolution, i*resolution); row index i grows northward,
/// so the row-major cell index is i*ncols + j with i = 0 the south row.
class DemCloud {
 public:
    DemCloud(double origin_x, double origin_y, double resolution,
             int nrows, int ncols,
             std::vector<double> heights,
             std::vector<std::uint8_t> nodata_mask);

    double origin_x() const { return origin_x_; }
    double origin_y() const { return origin_y_; }
    double resolution() const { return resolution_; }
    int nrows() const { return nrows_; }
    int ncols() const { return ncols_; }

    double x_of(int j) const { return origin_x_ + j * resolution_; }
    double y_of(int i) const { return origin_y_ + i * resolution_; }

    bool is_nodata(int i, int j) const { return nodata_mask_[cell(i, j)] != 0; }
    double height(int i, int j) const { return heights_[cell(i, j)]; }
    std::size_t cell(int i, int j) const {
        return static_cast<std::size_t>(i) * ncols_ + j;
    }

    long valid_count() const { return valid_count_; }

    /// Exact height at a grid node, matched within 1e-6 m per axis.
    /// Throws infeasible_error off-node or on a masked cell.
    double val_z(double x, double y) const;

    /// Non-nodata node closest to (x, y) in the Euclidean sense; ties go
    /// to the smallest row-major cell index. Throws if all cells are masked.
    Point3 nearest_xy(double x, double y) const;

    /// All non-nodata nodes q with |q.z - guess.z| <= d1 and
    /// max(|q.x - guess.x|, |q.y - guess.y|) <= r, in row-major order.
    /// Requires r > 0 and d1 > 0; may be empty. The search layer owns the
    /// r > resolution rule.
    std::vector<Point3> candidate_centers(const Point3& guess, double r, double d1) const;

 private:
    double origin_x_;
    double origin_y_;
    double resolution_;
    int nrows_;
    int ncols_;
    std::vector<double> heights_;
    std::vector<std::uint8_t> nodata_mask_;
    long valid_count_ = 0;
};

/// ESRI ASCII Grid reader (header keys case-insensitive, north row first).
DemCloud load_ascii_grid(const std::filesystem::path& path);

/// Writer matching load_ascii_grid; finite heights survive bit-for-bit.
void save_ascii_grid(const DemCloud& cloud, const std::filesystem::path& path);

/// x,y,z CSV reader. Points must form a regular grid within 1e-6 m;
/// absent cells become nodata.
DemCloud load_xyz_csv(const std::filesystem::path& path);

} // namespace crosslocate
