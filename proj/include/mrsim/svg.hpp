#pragma once

#include <span>
#include <sstream>
#include <string>

#include "mrsim/vec2.hpp"

namespace mrsim {

// Minimal deterministic SVG assembler. Coordinates are raw SVG user units
// (y grows downward); callers do their own world-to-page mapping. All
// numbers print with fixed precision so identical drawings yield identical
// bytes.
class SvgWriter {
public:
    SvgWriter(double width, double height);

    void line(Vec2 a, Vec2 b, const std::string& stroke, double stroke_width);
    void polyline(std::span<const Vec2> points, const std::string& stroke, double stroke_width);
    void circle(Vec2 center, double radius, const std::string& fill);
    void rect(Vec2 corner, double width, double height, const std::string& stroke,
              const std::string& fill);
    /// Shaft plus a two-segment head sized to the shaft length.
    void arrow(Vec2 from, Vec2 to, const std::string& stroke, double stroke_width);
    void text(Vec2 at, const std::string& content, double size, const std::string& fill);

    /// The complete document.
    std::string str() const;
    void save(const std::string& path) const;

    static std::string fmt(double value);

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

}  // namespace mrsim
