#include "mrsim/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mrsim {

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {
    if (!(width > 0) || !(height > 0)) throw std::invalid_argument("svg: size must be positive");
}

std::string SvgWriter::fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3f", value);
    return buffer;
}

void SvgWriter::line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_width) {
    body_ << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
          << "\" y2=\"" << fmt(b.y) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"/>\n";
}

void SvgWriter::polyline(std::span<const Vec2> points, const std::string& stroke,
                         double stroke_width) {
    if (points.empty()) return;
    body_ << "<polyline points=\"";
    for (size_t i = 0; i < points.size(); ++i) {
        if (i) body_ << ' ';
        body_ << fmt(points[i].x) << ',' << fmt(points[i].y);
    }
    body_ << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(stroke_width)
          << "\"/>\n";
}

void SvgWriter::circle(Vec2 center, double radius, const std::string& fill) {
    body_ << "<circle cx=\"" << fmt(center.x) << "\" cy=\"" << fmt(center.y) << "\" r=\""
          << fmt(radius) << "\" fill=\"" << fill << "\"/>\n";
}

void SvgWriter::rect(Vec2 corner, double width, double height, const std::string& stroke,
                     const std::string& fill) {
    body_ << "<rect x=\"" << fmt(corner.x) << "\" y=\"" << fmt(corner.y) << "\" width=\""
          << fmt(width) << "\" height=\"" << fmt(height) << "\" stroke=\"" << stroke
          << "\" fill=\"" << fill << "\"/>\n";
}

void SvgWriter::arrow(Vec2 from, Vec2 to, const std::string& stroke, double stroke_width) {
    line(from, to, stroke, stroke_width);
    Vec2 shaft = to - from;
    double length = shaft.norm();
    if (length < 1e-9) return;
    Vec2 dir = shaft / length;
    Vec2 ortho{-dir.y, dir.x};
    double head = std::min(0.35 * length, 4.0);
    line(to, to - dir * head + ortho * (0.5 * head), stroke, stroke_width);
    line(to, to - dir * head - ortho * (0.5 * head), stroke, stroke_width);
}

void SvgWriter::text(Vec2 at, const std::string& content, double size, const std::string& fill) {
    std::string escaped;
    for (char c : content) {
        switch (c) {
            case '&': escaped += "&amp;"; break;
            case '<': escaped += "&lt;"; break;
            case '>': escaped += "&gt;"; break;
            default: escaped += c;
        }
    }
    body_ << "<text x=\"" << fmt(at.x) << "\" y=\"" << fmt(at.y) << "\" font-size=\""
          << fmt(size) << "\" font-family=\"monospace\" fill=\"" << fill << "\">" << escaped
          << "</text>\n";
}

std::string SvgWriter::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(width_) +
                      " " + fmt(height_) + "\">\n";
    out += body_.str();
    out += "</svg>\n";
    return out;
}

void SvgWriter::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << str();
}

}  // namespace mrsim
