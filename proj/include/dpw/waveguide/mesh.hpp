#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dpw/linalg/csr.hpp"
#include "dpw/waveguide/geometry.hpp"

namespace dpw::waveguide {

using linalg::Index;

struct Grading {
    double ratio = 1.15;       // largest growth factor between neighbouring cells
    double min_frac = 0.125;   // smallest cell as a fraction of d r
    double far_cell = 0.0;     // cell size away from the window; 0 means eps / 8
    double far_cell_z = 0.0;   // same along z; 0 means far_cell
    std::vector<double> z_lines;  // extra required z lines (potential breakpoints)
    int refine = 0;            // uniform bisections applied after grading
};

/// Which copy a node is at z = 0.
enum class Side : int { lower = -1, shared = 0, upper = 1 };

/// Tensor-product quadrilateral mesh. Nodes are numbered line by line in z
/// (x fastest); when the mesh carries a slit line at z = 0 the upper copies
/// of the duplicated nodes follow that line. Elements are numbered the same
/// way, with corners counter-clockwise from (z_j, x_i).
struct Mesh2d {
    std::vector<double> x;  // sorted x lines
    std::vector<double> z;  // sorted z lines
    std::optional<std::size_t> slit_line;  // index of z = 0 when duplicated
    double window_half = 0.0;  // nodes with |x| <= window_half are shared at z = 0

    std::vector<double> node_x, node_z;
    std::vector<Side> node_side;
    std::vector<Index> upper_id;  // per x line: id of the upper copy at z = 0
    std::vector<std::array<Index, 4>> elements;

    Index node_count() const { return static_cast<Index>(node_x.size()); }
    std::size_t nx() const { return x.size(); }
    std::size_t nz() const { return z.size(); }
    /// Node on line j, column i; at the slit line `upper` selects the copy.
    Index node(std::size_t j, std::size_t i, bool upper = false) const;
    /// Number of nodes duplicated along the slit.
    std::size_t duplicated() const;
    double min_cell() const;
    double max_aspect_ratio() const;
};

/// Mesh on given lines. With `slit` set, z must contain 0 and every node on
/// it with |x| > window_half (all of them when window_half == 0) is doubled.
Mesh2d tensor_mesh(std::vector<double> x, std::vector<double> z, bool slit, double window_half);

/// Graded mesh of the geometry: cells grow from at most h_min = min_frac d r
/// at the window endpoints and z = 0 towards the far size, by at most `ratio`
/// per cell (a window closer than about two cells to the wall can break the
/// ratio in that margin). Required lines: L_minus, 0, L_plus, +-d r, x = 0 and
/// grading.z_lines. Far cells shrink as needed so the aspect ratio stays
/// <= 50. BudgetError above 1e7 cells.
Mesh2d build_mesh(const WaveguideGeometry& geom, const Grading& grading = {});

/// Graded lines on [a, b]: required points are kept exactly; cell sizes
/// follow min(h_max, h0 + c dist(t, anchors)) with c below ln(ratio) and the
/// first cell at an anchor at most h_min, adjusted per segment so the cell
/// counts are whole.
std::vector<double> graded_lines(double a, double b, std::vector<double> required, const std::vector<double>& anchors,
                                 double h_min, double h_max, double ratio);

/// Plain-text dump with sections "nodes" (id x z side), "elements"
/// (id n0 n1 n2 n3) and "duplicates" (lower upper), numbers printed %.17g.
void write_mesh(std::ostream& os, const Mesh2d& mesh);

}  // namespace dpw::waveguide
