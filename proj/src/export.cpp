#include "hbs/export.hpp"

#include "hbs/error.hpp"
#include "hbs/greville_topology.hpp"
#include "hbs/harmonics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hbs
{

namespace
{

std::string fmt(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", v);
    return buffer;
}

std::ofstream open_file(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        fail(Errc::IoError, "cannot write " + path);
    return out;
}

constexpr double kSvgSize = 640.0;
constexpr double kSvgMargin = 20.0;

double svg_x(double x)
{
    return kSvgMargin + x * kSvgSize;
}

double svg_y(double y)
{
    return kSvgMargin + (1.0 - y) * kSvgSize;
}

void svg_header(std::ofstream& out, double width, double height)
{
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
}

void export_mesh_svg(const DomainHierarchy& h, const std::string& path)
{
    if (h.n() != 2)
        fail(Errc::UnsupportedDimension, "svg export requires n = 2");
    auto out = open_file(path);
    svg_header(out, kSvgSize + 2 * kSvgMargin, kSvgSize + 2 * kSvgMargin);

    static const char* fills[] = {"#9ed6f2", "#f6c78f", "#d6a9e8", "#a9e8b6"};
    for (int l = 1; l <= h.max_level(); ++l)
    {
        const SubdomainRef omega = h.omega(l);
        const LevelSpaces& spaces = h.level(l);
        for (const std::int64_t id : omega.cells.ids())
        {
            const std::vector<int> cell = omega.cells.unflatten(id);
            const Interval ix = spaces.direction(0).cell(cell[0]);
            const Interval iy = spaces.direction(1).cell(cell[1]);
            out << "  <rect x=\"" << fmt(svg_x(to_double(ix.lo))) << "\" y=\"" << fmt(svg_y(to_double(iy.hi)))
                << "\" width=\"" << fmt((to_double(ix.hi) - to_double(ix.lo)) * kSvgSize) << "\" height=\""
                << fmt((to_double(iy.hi) - to_double(iy.lo)) * kSvgSize) << "\" fill=\""
                << fills[(l - 1) % 4] << "\" stroke=\"none\"/>\n";
        }
    }
    for (int l = 0; l <= h.max_level(); ++l)
    {
        const LevelSpaces& spaces = h.level(l);
        const char* stroke = l == 0 ? "#404040" : "#909090";
        const SubdomainRef omega = h.omega(l);
        if (l == 0)
        {
            for (const Rational& u : spaces.direction(0).unique_knots())
                out << "  <line x1=\"" << fmt(svg_x(to_double(u))) << "\" y1=\"" << fmt(svg_y(0))
                    << "\" x2=\"" << fmt(svg_x(to_double(u))) << "\" y2=\"" << fmt(svg_y(1))
                    << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
            for (const Rational& u : spaces.direction(1).unique_knots())
                out << "  <line x1=\"" << fmt(svg_x(0)) << "\" y1=\"" << fmt(svg_y(to_double(u)))
                    << "\" x2=\"" << fmt(svg_x(1)) << "\" y2=\"" << fmt(svg_y(to_double(u)))
                    << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
        }
        else
        {
            // grid restricted to the refined region
            for (const std::int64_t id : omega.cells.ids())
            {
                const std::vector<int> cell = omega.cells.unflatten(id);
                const Interval ix = spaces.direction(0).cell(cell[0]);
                const Interval iy = spaces.direction(1).cell(cell[1]);
                out << "  <rect x=\"" << fmt(svg_x(to_double(ix.lo))) << "\" y=\""
                    << fmt(svg_y(to_double(iy.hi))) << "\" width=\""
                    << fmt((to_double(ix.hi) - to_double(ix.lo)) * kSvgSize) << "\" height=\""
                    << fmt((to_double(iy.hi) - to_double(iy.lo)) * kSvgSize)
                    << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"0.7\"/>\n";
            }
        }
    }
    out << "</svg>\n";
}

void export_mesh_csv(const DomainHierarchy& h, const std::string& path)
{
    auto out = open_file(path);
    out << "level";
    for (int k = 0; k < h.n(); ++k)
        out << ",lo" << k + 1 << ",hi" << k + 1;
    out << "\n";
    for (int l = 0; l <= h.max_level(); ++l)
    {
        const SubdomainRef omega = h.omega(l);
        const LevelSpaces& spaces = h.level(l);
        for (const std::int64_t id : omega.cells.ids())
        {
            const std::vector<int> cell = omega.cells.unflatten(id);
            out << l;
            for (int k = 0; k < h.n(); ++k)
            {
                const Interval iv = spaces.direction(k).cell(cell[k]);
                out << "," << to_string(iv.lo) << "," << to_string(iv.hi);
            }
            out << "\n";
        }
    }
}

void draw_greville_layer(std::ofstream& out, const DomainHierarchy& h, int space_level,
                         const SubdomainRef& y, double x_offset)
{
    const CuboidalComplex complex = greville_subcomplex(h, space_level, y);
    const LevelSpaces& spaces = h.level(space_level);
    auto px = [&](double x) { return x_offset + kSvgMargin + x * kSvgSize; };

    out << "  <rect x=\"" << fmt(px(0)) << "\" y=\"" << fmt(svg_y(1)) << "\" width=\"" << fmt(kSvgSize)
        << "\" height=\"" << fmt(kSvgSize) << "\" fill=\"none\" stroke=\"#c0c0c0\"/>\n";

    // faces (2-form entities), then edges, then vertices
    for (int order = 2; order >= 0; --order)
    {
        for (const auto& dual_dim_cells : {complex.cells(h.n() - order)})
        {
            for (const auto& cell : dual_dim_cells)
            {
                const Box entity = spaces.tp_greville_entity(cell.component, cell.index);
                const auto& ex = entity.intervals[0];
                const auto& ey = entity.intervals[1];
                if (order == 2)
                    out << "  <rect x=\"" << fmt(px(to_double(ex.lo))) << "\" y=\""
                        << fmt(svg_y(to_double(ey.hi))) << "\" width=\""
                        << fmt((to_double(ex.hi) - to_double(ex.lo)) * kSvgSize) << "\" height=\""
                        << fmt((to_double(ey.hi) - to_double(ey.lo)) * kSvgSize)
                        << "\" fill=\"#f4b6b6\" stroke=\"none\"/>\n";
                else if (order == 1)
                    out << "  <line x1=\"" << fmt(px(to_double(ex.lo))) << "\" y1=\""
                        << fmt(svg_y(to_double(ey.lo))) << "\" x2=\"" << fmt(px(to_double(ex.hi)))
                        << "\" y2=\"" << fmt(svg_y(to_double(ey.hi)))
                        << "\" stroke=\"#5078c8\" stroke-width=\"2\"/>\n";
                else
                    out << "  <circle cx=\"" << fmt(px(to_double(ex.lo))) << "\" cy=\""
                        << fmt(svg_y(to_double(ey.lo))) << "\" r=\"4\" fill=\"#202020\"/>\n";
            }
        }
    }
}

void export_greville_svg(const DomainHierarchy& h, const std::string& path)
{
    if (h.n() != 2)
        fail(Errc::UnsupportedDimension, "svg export requires n = 2");
    if (h.max_level() < 1)
        fail(Errc::ValidationError, "greville export requires at least two levels");
    auto out = open_file(path);
    svg_header(out, 2 * (kSvgSize + 2 * kSvgMargin), kSvgSize + 2 * kSvgMargin);
    const SubdomainRef omega1 = h.omega(1);
    draw_greville_layer(out, h, 0, omega1, 0.0);
    draw_greville_layer(out, h, 1, omega1, kSvgSize + 2 * kSvgMargin);
    out << "</svg>\n";
}

void export_greville_csv(const DomainHierarchy& h, const std::string& path)
{
    if (h.max_level() < 1)
        fail(Errc::ValidationError, "greville export requires at least two levels");
    auto out = open_file(path);
    out << "layer,component,index,entity\n";
    const SubdomainRef omega1 = h.omega(1);
    for (int s = 0; s <= 1; ++s)
    {
        const CuboidalComplex complex = greville_subcomplex(h, s, omega1);
        const LevelSpaces& spaces = h.level(s);
        for (int d = 0; d <= h.n(); ++d)
        {
            for (const auto& cell : complex.cells(d))
            {
                out << s << ",\"";
                for (int k = 0; k < h.n(); ++k)
                    out << cell.component.bits[k];
                out << "\",\"";
                for (int k = 0; k < h.n(); ++k)
                    out << (k ? " " : "") << cell.index[k];
                out << "\",\"";
                const Box entity = spaces.tp_greville_entity(cell.component, cell.index);
                for (int k = 0; k < h.n(); ++k)
                {
                    if (k)
                        out << " x ";
                    if (entity.intervals[k].degenerate())
                        out << to_string(entity.intervals[k].lo);
                    else
                        out << "(" << to_string(entity.intervals[k].lo) << ","
                            << to_string(entity.intervals[k].hi) << ")";
                }
                out << "\"\n";
            }
        }
    }
}

std::string with_suffix(const std::string& path, const std::string& suffix)
{
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos)
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void export_harmonic_fields(const Scenario& scenario, const ExportRequest& request)
{
    const DomainHierarchy h = scenario.build();
    const int n = h.n();
    if (request.format == "svg" && n != 2)
        fail(Errc::UnsupportedDimension, "svg export requires n = 2");
    if (request.format == "vtk" && n != 2 && n != 3)
        fail(Errc::UnsupportedDimension, "vtk export requires n = 2 or 3");
    const HierarchicalBasis basis = kraft_select_all(h);
    const CohomologyReport report = cohomology_dims(h, basis, scenario.rank_options());
    const LevelSpaces& fine = h.level(h.max_level());
    const int res = request.resolution;

    for (int j = 0; j <= n; ++j)
    {
        if (report.dims[j] == 0)
            continue;
        const HarmonicSet set =
            harmonic_representatives(h, basis, j, scenario.options.tolerance, report.dims[j]);
        for (std::size_t r = 0; r < set.representatives.size(); ++r)
        {
            const auto fields = sample_field(fine, set.representatives[r], j, res);
            const auto components = component_list(n, j);
            const std::string path =
                with_suffix(request.path, "_j" + std::to_string(j) + "_r" + std::to_string(r));

            if (request.format == "csv")
            {
                auto out = open_file(path);
                for (int k = 0; k < n; ++k)
                    out << (k ? "," : "") << "x" << k + 1;
                for (const auto& c : components)
                {
                    out << ",c";
                    for (int k = 0; k < n; ++k)
                        out << c.bits[k];
                }
                out << "\n";
                std::vector<int> g(n, 0);
                for (;;)
                {
                    std::int64_t flat = 0;
                    for (int k = 0; k < n; ++k)
                        flat = flat * res + g[k];
                    for (int k = 0; k < n; ++k)
                        out << (k ? "," : "") << fmt(static_cast<double>(g[k]) / (res - 1));
                    for (std::size_t c = 0; c < components.size(); ++c)
                        out << "," << fmt(fields[c][flat]);
                    out << "\n";
                    int k = n - 1;
                    while (k >= 0)
                    {
                        if (++g[k] < res)
                            break;
                        g[k] = 0;
                        --k;
                    }
                    if (k < 0)
                        break;
                }
            }
            else if (request.format == "vtk")
            {
                auto out = open_file(path);
                out << "# vtk DataFile Version 3.0\n";
                out << "hbs harmonic " << j << "-form representative " << r << "\n";
                out << "ASCII\nDATASET STRUCTURED_POINTS\n";
                out << "DIMENSIONS " << res << " " << res << " " << (n == 3 ? res : 1) << "\n";
                out << "ORIGIN 0 0 0\n";
                const double spacing = 1.0 / (res - 1);
                out << "SPACING " << fmt(spacing) << " " << fmt(spacing) << " "
                    << fmt(n == 3 ? spacing : 1.0) << "\n";
                std::int64_t points = 1;
                for (int k = 0; k < n; ++k)
                    points *= res;
                out << "POINT_DATA " << points << "\n";
                for (std::size_t c = 0; c < components.size(); ++c)
                {
                    out << "SCALARS c";
                    for (int k = 0; k < n; ++k)
                        out << components[c].bits[k];
                    out << " double 1\nLOOKUP_TABLE default\n";
                    // VTK order: z slowest, x fastest; fields are direction-1
                    // slowest.
                    if (n == 2)
                    {
                        for (int gy = 0; gy < res; ++gy)
                            for (int gx = 0; gx < res; ++gx)
                                out << fmt(fields[c][static_cast<std::int64_t>(gx) * res + gy]) << "\n";
                    }
                    else
                    {
                        for (int gz = 0; gz < res; ++gz)
                            for (int gy = 0; gy < res; ++gy)
                                for (int gx = 0; gx < res; ++gx)
                                    out << fmt(fields[c][(static_cast<std::int64_t>(gx) * res + gy) * res
                                                         + gz])
                                        << "\n";
                    }
                }
            }
            else // svg heat map of the pointwise magnitude
            {
                auto out = open_file(path);
                svg_header(out, kSvgSize + 2 * kSvgMargin, kSvgSize + 2 * kSvgMargin);
                double max_mag = 0;
                std::vector<double> magnitude(static_cast<std::size_t>(res) * res, 0.0);
                for (int gx = 0; gx < res; ++gx)
                    for (int gy = 0; gy < res; ++gy)
                    {
                        double m2 = 0;
                        for (std::size_t c = 0; c < components.size(); ++c)
                        {
                            const double v = fields[c][static_cast<std::int64_t>(gx) * res + gy];
                            m2 += v * v;
                        }
                        magnitude[static_cast<std::size_t>(gx) * res + gy] = std::sqrt(m2);
                        max_mag = std::max(max_mag, magnitude[static_cast<std::size_t>(gx) * res + gy]);
                    }
                const double cell = kSvgSize / res;
                for (int gx = 0; gx < res; ++gx)
                    for (int gy = 0; gy < res; ++gy)
                    {
                        const double t =
                            max_mag > 0 ? magnitude[static_cast<std::size_t>(gx) * res + gy] / max_mag : 0;
                        const int red = 255;
                        const int other = static_cast<int>(255 * (1.0 - t));
                        out << "  <rect x=\"" << fmt(kSvgMargin + gx * cell) << "\" y=\""
                            << fmt(kSvgMargin + (res - 1 - gy) * cell) << "\" width=\"" << fmt(cell)
                            << "\" height=\"" << fmt(cell) << "\" fill=\"rgb(" << red << "," << other
                            << "," << other << ")\"/>\n";
                    }
                out << "</svg>\n";
            }
        }
    }
}

} // namespace

void run_export(const Scenario& scenario, const ExportRequest& request)
{
    if (request.what == "mesh")
    {
        const DomainHierarchy h = scenario.build();
        if (request.format == "svg")
            export_mesh_svg(h, request.path);
        else if (request.format == "csv")
            export_mesh_csv(h, request.path);
        else
            fail(Errc::ValidationError, "mesh export supports svg and csv");
    }
    else if (request.what == "greville")
    {
        const DomainHierarchy h = scenario.build();
        if (request.format == "svg")
            export_greville_svg(h, request.path);
        else if (request.format == "csv")
            export_greville_csv(h, request.path);
        else
            fail(Errc::ValidationError, "greville export supports svg and csv");
    }
    else if (request.what == "harmonic")
    {
        if (request.format != "svg" && request.format != "vtk" && request.format != "csv")
            fail(Errc::ValidationError, "harmonic export supports svg, vtk and csv");
        export_harmonic_fields(scenario, request);
    }
    else
        fail(Errc::ValidationError, "unknown export target " + request.what);
}

} // namespace hbs
