// dem.cpp - grid storage, queries and the ASC / XYZ readers.
#include "crosslocate/dem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "crosslocate/errors.hpp"

namespace crosslocate {

namespace {

constexpr double kNodeTol = 1e-6;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool parse_double(const std::string& tok, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

DemCloud::DemCloud(double origin_x, double origin_y, double resolution,
                   int nrows, int ncols,
                   std::vector<double> heights,
                   std::vector<std::uint8_t> nodata_mask)
    : origin_x_(origin_x), origin_y_(origin_y), resolution_(resolution),
      nrows_(nrows), ncols_(ncols),
      heights_(std::move(heights)), nodata_mask_(std::move(nodata_mask)) {
    if (resolution_ <= 0.0)
        throw std::invalid_argument("DemCloud: resolution must be > 0");
    if (nrows_ <= 0 || ncols_ <= 0)
        throw std::invalid_argument("DemCloud: grid dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(nrows_) * ncols_;
    if (heights_.size() != n || nodata_mask_.size() != n)
        throw std::invalid_argument("DemCloud: array sizes do not match dimensions");
    for (std::size_t k = 0; k < n; ++k) {
        if (!nodata_mask_[k]) {
            if (!std::isfinite(heights_[k]))
                throw std::invalid_argument("DemCloud: non-finite height in valid cell");
            ++valid_count_;
        }
    }
}

double DemCloud::val_z(double x, double y) const {
    const long j = std::lround((x - origin_x_) / resolution_);
    const long i = std::lround((y - origin_y_) / resolution_);
    if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_)
        throw infeasible_error("val_z: query outside grid");
    if (std::fabs(x_of(static_cast<int>(j)) - x) > kNodeTol ||
        std::fabs(y_of(static_cast<int>(i)) - y) > kNodeTol)
        throw infeasible_error("val_z: query is not a grid node");
    if (is_nodata(static_cast<int>(i), static_cast<int>(j)))
        throw infeasible_error("val_z: nodata cell");
    return height(static_cast<int>(i), static_cast<int>(j));
}

Point3 DemCloud::nearest_xy(double x, double y) const {
    if (valid_count_ == 0)
        throw infeasible_error("nearest_xy: cloud has no valid cells");
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("nearest_xy: non-finite query");

    const auto clampi = [](long v, long lo, long hi) {
        return std::max(lo, std::min(hi, v));
    };
    const int j0 = static_cast<int>(clampi(std::lround((x - origin_x_) / resolution_), 0, ncols_ - 1));
    const int i0 = static_cast<int>(clampi(std::lround((y - origin_y_) / resolution_), 0, nrows_ - 1));

    double best_d2 = std::numeric_limits<double>::infinity();
    int best_i = -1, best_j = -1;
    const auto consider = [&](int i, int j) {
        if (is_nodata(i, j)) return;
        const double dx = x_of(j) - x;
        const double dy = y_of(i) - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2 ||
            (d2 == best_d2 && cell(i, j) < cell(best_i, best_j))) {
            best_d2 = d2;
            best_i = i;
            best_j = j;
        }
    };

    // Expanding Chebyshev rings around the geometrically closest cell. Ring k
    // cells lie on the boundary of the square of half-width k*res centered at
    // (cx, cy), so |dist(query, ring)| >= | ||q-c||_inf - k*res |.
    const double cx = x_of(j0);
    const double cy = y_of(i0);
    const double q_inf = std::max(std::fabs(x - cx), std::fabs(y - cy));
    const int k_max = std::max(nrows_, ncols_);

    consider(i0, j0);
    for (int k = 1; k <= k_max; ++k) {
        if (best_j >= 0) {
            const double lb = std::fabs(k * resolution_ - q_inf);
            if (lb * lb > best_d2) break;
        }
        const int ilo = i0 - k, ihi = i0 + k;
        const int jlo = j0 - k, jhi = j0 + k;
        for (int j = std::max(0, jlo); j <= std::min(ncols_ - 1, jhi); ++j) {
            if (ilo >= 0) consider(ilo, j);
            if (ihi < nrows_) consider(ihi, j);
        }
        for (int i = std::max(0, ilo + 1); i <= std::min(nrows_ - 1, ihi - 1); ++i) {
            if (jlo >= 0) consider(i, jlo);
            if (jhi < ncols_) consider(i, jhi);
        }
    }
    return Point3{x_of(best_j), y_of(best_i), height(best_i, best_j)};
}

std::vector<Point3> DemCloud::candidate_centers(const Point3& guess, double r, double d1) const {
    // The r > resolution requirement belongs to the search configuration;
    // the enumeration itself is total for any positive box.
    if (!(r > 0.0))
        throw std::invalid_argument("candidate_centers: requires r > 0");
    if (!(d1 > 0.0))
        throw std::invalid_argument("candidate_centers: requires d1 > 0");

    const auto clampi = [](long v, long lo, long hi) {
        return std::max(lo, std::min(hi, v));
    };
    // Conservative index window, then the exact inequality on node coordinates.
    const int ilo = static_cast<int>(clampi(static_cast<long>(std::floor((guess.y - r - origin_y_) / resolution_)) - 1, 0, nrows_ - 1));
    const int ihi = static_cast<int>(clampi(static_cast<long>(std::ceil((guess.y + r - origin_y_) / resolution_)) + 1, 0, nrows_ - 1));
    const int jlo = static_cast<int>(clampi(static_cast<long>(std::floor((guess.x - r - origin_x_) / resolution_)) - 1, 0, ncols_ - 1));
    const int jhi = static_cast<int>(clampi(static_cast<long>(std::ceil((guess.x + r - origin_x_) / resolution_)) + 1, 0, ncols_ - 1));

    std::vector<Point3> out;
    for (int i = ilo; i <= ihi; ++i) {
        for (int j = jlo; j <= jhi; ++j) {
            if (is_nodata(i, j)) continue;
            const double qx = x_of(j);
            const double qy = y_of(i);
            const double qz = height(i, j);
            if (std::fabs(qz - guess.z) > d1) continue;
            if (std::max(std::fabs(qx - guess.x), std::fabs(qy - guess.y)) > r) continue;
            out.push_back(Point3{qx, qy, qz});
        }
    }
    return out;
}

DemCloud load_ascii_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        lines.push_back(std::move(line));

    std::map<std::string, double> header;
    bool have_nodata = false;
    double nodata_value = 0.0;
    std::size_t first_data = lines.size();

    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::istringstream ls(lines[li]);
        std::string key;
        if (!(ls >> key)) continue;
        if (!std::isalpha(static_cast<unsigned char>(key[0]))) {
            first_data = li;
            break;
        }
        const std::string line_ref = path.string() + ":" + std::to_string(li + 1);
        std::string val_tok;
        double val = 0.0;
        if (!(ls >> val_tok) || !parse_double(val_tok, val))
            throw format_error(line_ref + ": malformed header line '" + lines[li] + "'");
        const std::string k = lower(key);
        if (k == "nodata_value") {
            have_nodata = true;
            nodata_value = val;
        } else if (k == "ncols" || k == "nrows" || k == "xllcorner" ||
                   k == "yllcorner" || k == "cellsize") {
            header[k] = val;
        } else {
            throw format_error(line_ref + ": unknown header key '" + key + "'");
        }
    }
    for (const char* req : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
        if (!header.count(req))
            throw format_error(path.string() + ": missing header key '" + std::string(req) + "'");
    }

    const int ncols = static_cast<int>(header["ncols"]);
    const int nrows = static_cast<int>(header["nrows"]);
    const double cellsize = header["cellsize"];
    if (ncols <= 0 || nrows <= 0 || header["ncols"] != ncols || header["nrows"] != nrows)
        throw format_error(path.string() + ": ncols/nrows must be positive integers");
    if (cellsize <= 0.0)
        throw format_error(path.string() + ": cellsize must be > 0");

    const std::size_t n = static_cast<std::size_t>(nrows) * ncols;
    std::vector<double> heights(n, 0.0);
    std::vector<std::uint8_t> mask(n, 0);

    int rows_read = 0;
    for (std::size_t li = first_data; li < lines.size(); ++li) {
        const std::string line_ref = path.string() + ":" + std::to_string(li + 1);
        std::istringstream ls(lines[li]);
        std::string tok;
        int col = 0;
        while (ls >> tok) {
            if (rows_read >= nrows)
                throw format_error(line_ref + ": more data rows than nrows=" +
                                   std::to_string(nrows));
            if (col >= ncols)
                throw format_error(line_ref + ": row has more than ncols=" +
                                   std::to_string(ncols) + " values");
            double v = 0.0;
            if (!parse_double(tok, v))
                throw format_error(line_ref + ": non-numeric value '" + tok + "'");
            // File rows run north to south; storage row 0 is the south row.
            const int i = nrows - 1 - rows_read;
            const std::size_t idx = static_cast<std::size_t>(i) * ncols + col;
            if (have_nodata && v == nodata_value) {
                mask[idx] = 1;
            } else {
                heights[idx] = v;
            }
            ++col;
        }
        if (col == 0) continue;
        if (col != ncols)
            throw format_error(line_ref + ": row has " + std::to_string(col) +
                               " values, expected " + std::to_string(ncols));
        ++rows_read;
    }
    if (rows_read != nrows)
        throw format_error(path.string() + ": found " + std::to_string(rows_read) +
                           " data rows, expected " + std::to_string(nrows));

    // llcorner is the outer corner of the south-west cell; node = corner + cell/2.
    const double origin_x = header["xllcorner"] + 0.5 * cellsize;
    const double origin_y = header["yllcorner"] + 0.5 * cellsize;
    return DemCloud(origin_x, origin_y, cellsize, nrows, ncols,
                    std::move(heights), std::move(mask));
}

void save_ascii_grid(const DemCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot write '" + path.string() + "'");
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const double nodata = -9999.0;
    out << "ncols " << cloud.ncols() << "\n";
    out << "nrows " << cloud.nrows() << "\n";
    out << "xllcorner " << num(cloud.origin_x() - 0.5 * cloud.resolution()) << "\n";
    out << "yllcorner " << num(cloud.origin_y() - 0.5 * cloud.resolution()) << "\n";
    out << "cellsize " << num(cloud.resolution()) << "\n";
    out << "nodata_value " << num(nodata) << "\n";
    for (int i = cloud.nrows() - 1; i >= 0; --i) {
        for (int j = 0; j < cloud.ncols(); ++j) {
            if (j) out << ' ';
            out << (cloud.is_nodata(i, j) ? num(nodata) : num(cloud.height(i, j)));
        }
        out << '\n';
    }
    if (!out)
        throw format_error("write failed for '" + path.string() + "'");
}

DemCloud load_xyz_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open '" + path.string() + "'");

    std::vector<Point3> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        std::string a, b, c;
        if (!(ls >> a)) continue;
        if (!(ls >> b >> c))
            throw format_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected three columns x,y,z");
        Point3 p;
        if (!parse_double(a, p.x) || !parse_double(b, p.y) || !parse_double(c, p.z)) {
            if (line_no == 1) continue; // optional header row
            throw format_error(path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric value");
        }
        std::string extra;
        if (ls >> extra)
            throw format_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected exactly three columns");
        pts.push_back(p);
    }
    if (pts.size() < 2)
        throw format_error(path.string() + ": need at least two points to infer a grid");

    std::set<double> xs, ys;
    for (const auto& p : pts) {
        xs.insert(p.x);
        ys.insert(p.y);
    }
    double spacing = std::numeric_limits<double>::infinity();
    const auto min_gap = [&spacing](const std::set<double>& s) {
        double prev = 0.0;
        bool first = true;
        for (double v : s) {
            if (!first) spacing = std::min(spacing, v - prev);
            prev = v;
            first = false;
        }
    };
    min_gap(xs);
    min_gap(ys);
    if (!std::isfinite(spacing) || spacing <= 0.0)
        throw format_error(path.string() + ": cannot infer grid spacing");

    const double x0 = *xs.begin(), y0 = *ys.begin();
    const auto to_index = [&](double v, double v0) -> long {
        const double u = (v - v0) / spacing;
        const long k = std::lround(u);
        if (std::fabs(v0 + k * spacing - v) > kNodeTol)
            throw format_error(path.string() + ": irregular spacing at coordinate " +
                               std::to_string(v));
        return k;
    };

    long max_i = 0, max_j = 0;
    std::vector<std::pair<std::pair<long, long>, double>> idx;
    idx.reserve(pts.size());
    for (const auto& p : pts) {
        const long j = to_index(p.x, x0);
        const long i = to_index(p.y, y0);
        max_i = std::max(max_i, i);
        max_j = std::max(max_j, j);
        idx.push_back({{i, j}, p.z});
    }
    const int nrows = static_cast<int>(max_i + 1);
    const int ncols = static_cast<int>(max_j + 1);
    const std::size_t n = static_cast<std::size_t>(nrows) * ncols;
    std::vector<double> heights(n, 0.0);
    std::vector<std::uint8_t> mask(n, 1); // absent cells stay nodata
    for (const auto& [ij, z] : idx) {
        const std::size_t k = static_cast<std::size_t>(ij.first) * ncols + ij.second;
        if (!mask[k])
            throw format_error(path.string() + ": duplicate point at grid cell (" +
                               std::to_string(ij.first) + "," + std::to_string(ij.second) + ")");
        mask[k] = 0;
        heights[k] = z;
    }
    return DemCloud(x0, y0, spacing, nrows, ncols, std::move(heights), std::move(mask));
}

} // namespace crosslocate
