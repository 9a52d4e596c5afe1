#pragma once

#include <string>

namespace colluscan {

// Minimal deterministic SVG builder: fixed 2-decimal coordinates, styling via
// one <style> block, no external resources.
class SvgWriter {
public:
    SvgWriter(double width, double height);

    void style(const std::string& css);
    void line(double x1, double y1, double x2, double y2, const std::string& cls);
    void rect(double x, double y, double w, double h, const std::string& cls);
    void circle(double cx, double cy, double r, const std::string& cls);
    void path(const std::string& d, const std::string& cls);
    void text(double x, double y, const std::string& content, const std::string& cls,
              const std::string& anchor = "start", const std::string& transform = "");

    std::string finish() const;

    static std::string escape(const std::string& text);
    static std::string coord(double value);

private:
    double width_;
    double height_;
    std::string css_;
    std::string body_;
};

} // namespace colluscan
