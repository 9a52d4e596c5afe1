#include "colluscan/svg.hpp"

#include "colluscan/io_util.hpp"

namespace colluscan {

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

std::string SvgWriter::coord(double value) {
    return format_fixed(value, 2);
}

std::string SvgWriter::escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c; break;
        }
    }
    return out;
}

void SvgWriter::style(const std::string& css) {
    css_ += css;
}

void SvgWriter::line(double x1, double y1, double x2, double y2, const std::string& cls) {
    body_ += "  <line class=\"" + cls + "\" x1=\"" + coord(x1) + "\" y1=\"" + coord(y1) +
             "\" x2=\"" + coord(x2) + "\" y2=\"" + coord(y2) + "\"/>\n";
}

void SvgWriter::rect(double x, double y, double w, double h, const std::string& cls) {
    body_ += "  <rect class=\"" + cls + "\" x=\"" + coord(x) + "\" y=\"" + coord(y) +
             "\" width=\"" + coord(w) + "\" height=\"" + coord(h) + "\"/>\n";
}

void SvgWriter::circle(double cx, double cy, double r, const std::string& cls) {
    body_ += "  <circle class=\"" + cls + "\" cx=\"" + coord(cx) + "\" cy=\"" + coord(cy) +
             "\" r=\"" + coord(r) + "\"/>\n";
}

void SvgWriter::path(const std::string& d, const std::string& cls) {
    body_ += "  <path class=\"" + cls + "\" d=\"" + d + "\"/>\n";
}

void SvgWriter::text(double x, double y, const std::string& content, const std::string& cls,
                     const std::string& anchor, const std::string& transform) {
    body_ += "  <text class=\"" + cls + "\" x=\"" + coord(x) + "\" y=\"" + coord(y) +
             "\" text-anchor=\"" + anchor + "\"";
    if (!transform.empty()) {
        body_ += " transform=\"" + transform + "\"";
    }
    body_ += ">" + escape(content) + "</text>\n";
}

std::string SvgWriter::finish() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width_) +
                      "\" height=\"" + coord(height_) + "\" viewBox=\"0 0 " + coord(width_) +
                      " " + coord(height_) + "\">\n";
    if (!css_.empty()) {
        out += "  <style>" + css_ + "</style>\n";
    }
    out += body_;
    out += "</svg>\n";
    return out;
}

} // namespace colluscan
