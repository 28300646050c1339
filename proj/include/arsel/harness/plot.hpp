#pragma once

// Minimal raster line plot written as PNG. Cosmetic only: no text, one colour
// per series, light grey reference curve optional.

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace arsel::harness {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

class Canvas {
public:
    Canvas(int width, int height) : w_(width), h_(height), px_(static_cast<std::size_t>(width * height) * 3, 255) {}

    void set(int x, int y, std::array<std::uint8_t, 3> c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        auto* p = &px_[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x)) * 3];
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }

    void line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c, int thick = 1) {
        const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        for (;;) {
            for (int a = -thick / 2; a <= thick / 2; ++a)
                for (int b = -thick / 2; b <= thick / 2; ++b) set(x0 + a, y0 + b, c);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) err += dy, x0 += sx;
            if (e2 <= dx) err += dx, y0 += sy;
        }
    }

    void write_png(const std::string& file) const {
        FILE* fp = std::fopen(file.c_str(), "wb");
        if (!fp) throw std::runtime_error("cannot write " + file);
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info || setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            std::fclose(fp);
            throw std::runtime_error("libpng failed writing " + file);
        }
        png_init_io(png, fp);
        png_set_IHDR(png, info, static_cast<png_uint_32>(w_), static_cast<png_uint_32>(h_), 8, PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < h_; ++y)
            png_write_row(png, const_cast<png_bytep>(&px_[static_cast<std::size_t>(y * w_) * 3]));
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
    }

    int width() const noexcept { return w_; }
    int height() const noexcept { return h_; }

private:
    int w_, h_;
    std::vector<std::uint8_t> px_;
};

inline void line_plot(const std::string& file, const std::vector<Series>& series, const Series* reference = nullptr) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 8> palette{{{31, 119, 180},
                                                                         {255, 127, 14},
                                                                         {44, 160, 44},
                                                                         {214, 39, 40},
                                                                         {148, 103, 189},
                                                                         {140, 86, 75},
                                                                         {227, 119, 194},
                                                                         {23, 190, 207}}};
    Canvas cv(800, 500);
    const int left = 50, right = 20, top = 20, bottom = 40;
    double xmin = INFINITY, xmax = -INFINITY, ymax = 0.0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
    auto px = [&](double x) { return left + static_cast<int>((x - xmin) / (xmax - xmin) * (cv.width() - left - right)); };
    auto py = [&](double y) { return cv.height() - bottom - static_cast<int>(y / ymax * (cv.height() - top - bottom)); };

    const std::array<std::uint8_t, 3> axis{0, 0, 0}, grid{225, 225, 225};
    for (int g = 1; g <= 4; ++g) {
        const double y = ymax * g / 5.0;
        cv.line(left, py(y), cv.width() - right, py(y), grid);
    }
    cv.line(left, py(0), cv.width() - right, py(0), axis);
    cv.line(left, py(0), left, top, axis);
    if (reference) {
        for (std::size_t i = 1; i < reference->x.size(); ++i)
            if (reference->y[i] <= ymax)
                cv.line(px(reference->x[i - 1]), py(reference->y[i - 1]), px(reference->x[i]), py(reference->y[i]),
                        {180, 180, 180});
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto colour = palette[s % palette.size()];
        const auto& ser = series[s];
        for (std::size_t i = 1; i < ser.x.size(); ++i)
            cv.line(px(ser.x[i - 1]), py(ser.y[i - 1]), px(ser.x[i]), py(ser.y[i]), colour, 3);
    }
    cv.write_png(file);
}

}  // namespace arsel::harness
