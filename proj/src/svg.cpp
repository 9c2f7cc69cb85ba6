#include "morseid/svg.hpp"

#include <cmath>
#include <sstream>

namespace morseid {

namespace {

std::string hsl_color(int index, int total, double lightness) {
    // Deterministic palette: evenly spaced hues, fixed saturation.
    const double hue = total > 0 ? 360.0 * index / total : 0.0;
    std::ostringstream out;
    out << "hsl(" << static_cast<int>(hue) << ",70%," << static_cast<int>(lightness * 100)
        << "%)";
    return out.str();
}

}  // namespace

std::string render_morse_svg(const CubicalGrid& grid, const MorseGraph& mg,
                             const std::vector<std::vector<std::int32_t>>& roa) {
    if (grid.dim() != 2) throw ConfigError("svg rendering is only defined for 2-D grids");
    const double pix = 720.0;
    const Vector w = grid.domain.widths();
    const double sx = pix / w[0], sy = pix / w[1];
    const Vector cw = grid.cell_widths();

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pix + 200 << "\" height=\""
        << pix << "\" viewBox=\"0 0 " << pix + 200 << " " << pix << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << pix << "\" height=\"" << pix
        << "\" fill=\"white\" stroke=\"black\"/>\n";

    auto emit_cell = [&](std::int64_t idx, const std::string& fill, double opacity) {
        const CellIndex cell = grid.from_linear(idx);
        const Box r = cell_realization(grid, cell);
        const double x = (r.lower[0] - grid.domain.lower[0]) * sx;
        const double y = pix - (r.upper[1] - grid.domain.lower[1]) * sy;  // flip y
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw[0] * sx + 0.5
            << "\" height=\"" << cw[1] * sy + 0.5 << "\" fill=\"" << fill << "\" fill-opacity=\""
            << opacity << "\"/>\n";
    };

    // RoAs first (light), then the Morse sets on top (saturated).
    for (int p = 0; p < mg.size(); ++p) {
        if (p >= static_cast<int>(roa.size())) break;
        const std::string fill = hsl_color(p, mg.size(), 0.82);
        for (const std::int32_t idx : roa[p]) emit_cell(idx, fill, 0.55);
    }
    for (int p = 0; p < mg.size(); ++p) {
        const std::string fill = hsl_color(p, mg.size(), 0.45);
        for (const std::int32_t idx : mg.node_cells[p]) emit_cell(idx, fill, 1.0);
    }

    // Hasse inset: ranks by longest chain below, arrows point down the order.
    std::vector<int> depth(mg.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [up, lo] : mg.hasse_edges)
            if (depth[up] < depth[lo] + 1) {
                depth[up] = depth[lo] + 1;
                changed = true;
            }
    }
    const double x0 = pix + 100, y0 = pix - 60;
    std::vector<std::pair<double, double>> pos(mg.size());
    std::vector<int> rank_count;
    for (int p = 0; p < mg.size(); ++p) {
        if (depth[p] >= static_cast<int>(rank_count.size())) rank_count.resize(depth[p] + 1, 0);
        pos[p] = {x0 + 44.0 * (rank_count[depth[p]]++) - 60.0, y0 - 64.0 * depth[p]};
    }
    for (const auto& [up, lo] : mg.hasse_edges)
        svg << "<line x1=\"" << pos[up].first << "\" y1=\"" << pos[up].second + 14 << "\" x2=\""
            << pos[lo].first << "\" y2=\"" << pos[lo].second - 14
            << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    for (int p = 0; p < mg.size(); ++p) {
        svg << "<circle cx=\"" << pos[p].first << "\" cy=\"" << pos[p].second
            << "\" r=\"14\" fill=\"" << hsl_color(p, mg.size(), 0.55)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << pos[p].first << "\" y=\"" << pos[p].second + 4
            << "\" text-anchor=\"middle\" font-size=\"12\">" << p << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace morseid
