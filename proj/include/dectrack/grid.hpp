#pragma once

#include "dectrack/errors.hpp"

namespace dectrack {

// Rectangular grid of cells. Cells are indexed row-major in [0, width*height).
struct GridShape {
    int width = 1;
    int height = 1;

    GridShape() = default;
    GridShape(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) {
            throw ConfigInvalid("GridShape requires width >= 1 and height >= 1");
        }
    }

    int cell_count() const { return width * height; }

    int index(int row, int col) const { return row * width + col; }
    int row_of(int cell) const { return cell / width; }
    int col_of(int cell) const { return cell % width; }

    bool contains(int cell) const { return cell >= 0 && cell < cell_count(); }
    bool contains(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }

    bool operator==(const GridShape&) const = default;
};

inline int manhattan_distance(const GridShape& shape, int a, int b) {
    int dr = shape.row_of(a) - shape.row_of(b);
    int dc = shape.col_of(a) - shape.col_of(b);
    return (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc);
}

} // namespace dectrack
