#include "repunlearn/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "repunlearn/json_io.hpp"

namespace repunlearn {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                          "#59a14f", "#edc948", "#b07aa1", "#9c755f",
                          "#bab0ac", "#ff9da7"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string star_path(double cx, double cy, double r) {
    std::ostringstream ss;
    for (int i = 0; i < 10; ++i) {
        const double angle = -std::numbers::pi / 2.0 + i * std::numbers::pi / 5.0;
        const double rad = (i % 2 == 0) ? r : 0.45 * r;
        ss << (i == 0 ? "M" : "L") << fmt(cx + rad * std::cos(angle)) << " "
           << fmt(cy + rad * std::sin(angle));
    }
    ss << "Z";
    return ss.str();
}

}  // namespace

std::string representation_scatter_svg(const Pipeline& p, const LabeledDataset& data,
                                       const std::set<std::size_t>& forget_classes) {
    if (data.size() == 0) throw std::invalid_argument("plot: empty dataset");
    if (p.net == nullptr) throw std::invalid_argument("plot: missing net");
    if (p.net->representation_dim() != 2) {
        throw std::invalid_argument("plot: representation dimension must be 2");
    }
    const Matrix z = pipeline_representations(p, data.features);

    double xmin = z(0, 0), xmax = z(0, 0), ymin = z(0, 1), ymax = z(0, 1);
    for (std::size_t i = 0; i < z.rows; ++i) {
        xmin = std::min(xmin, z(i, 0));
        xmax = std::max(xmax, z(i, 0));
        ymin = std::min(ymin, z(i, 1));
        ymax = std::max(ymax, z(i, 1));
    }
    const double pad_x = 0.05 * std::max(xmax - xmin, 1e-9);
    const double pad_y = 0.05 * std::max(ymax - ymin, 1e-9);
    xmin -= pad_x; xmax += pad_x;
    ymin -= pad_y; ymax += pad_y;

    const double width = 640.0;
    const double height = 640.0;
    const double legend_w = 120.0;
    auto sx = [&](double x) { return (x - xmin) / (xmax - xmin) * (width - legend_w - 20.0) + 10.0; };
    auto sy = [&](double y) { return height - ((y - ymin) / (ymax - ymin) * (height - 20.0) + 10.0); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    const std::size_t C = data.num_classes();
    for (std::size_t i = 0; i < z.rows; ++i) {
        const std::size_t y = data.labels[i];
        const char* color = kPalette[y % 10];
        const double px = sx(z(i, 0));
        const double py = sy(z(i, 1));
        if (forget_classes.count(y) > 0) {
            svg << "<path d=\"" << star_path(px, py, 5.0) << "\" fill=\"" << color
                << "\" fill-opacity=\"0.8\"/>\n";
        } else {
            svg << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
                << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
        }
    }

    for (std::size_t c = 0; c < C; ++c) {
        const double ly = 24.0 + 22.0 * static_cast<double>(c);
        const double lx = width - legend_w;
        const char* color = kPalette[c % 10];
        if (forget_classes.count(c) > 0) {
            svg << "<path d=\"" << star_path(lx, ly, 6.0) << "\" fill=\"" << color << "\"/>\n";
        } else {
            svg << "<circle cx=\"" << fmt(lx) << "\" cy=\"" << fmt(ly) << "\" r=\"4\" fill=\""
                << color << "\"/>\n";
        }
        svg << "<text x=\"" << fmt(lx + 12.0) << "\" y=\"" << fmt(ly + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"13\">class " << c
            << (forget_classes.count(c) > 0 ? " (forget)" : "") << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_representation_svg(const Pipeline& p, const LabeledDataset& data,
                              const std::set<std::size_t>& forget_classes,
                              const std::string& path) {
    write_text_file(path, representation_scatter_svg(p, data, forget_classes));
}

}  // namespace repunlearn
