#include "feop/basis.hpp"

#include <stdexcept>

namespace feop {

namespace {
constexpr double kInsideTol = 1e-12;
}

BasisValues reference_basis(ElemOrder order, int dim, std::array<double, 2> local) {
    BasisValues out;
    if (dim == 1) {
        const double t = local[0];
        if (t < -kInsideTol || t > 1.0 + kInsideTol) {
            throw std::invalid_argument("reference_basis: point outside unit interval");
        }
        if (order == ElemOrder::P1) {
            out.count = 2;
            out.values = {1.0 - t, t};
            out.gradients[0] = {-1.0, 0.0};
            out.gradients[1] = {1.0, 0.0};
        } else {
            out.count = 3;
            out.values = {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
            out.gradients[0] = {4.0 * t - 3.0, 0.0};
            out.gradients[1] = {4.0 * t - 1.0, 0.0};
            out.gradients[2] = {4.0 - 8.0 * t, 0.0};
        }
        return out;
    }
    if (dim != 2) throw std::invalid_argument("reference_basis: dim must be 1 or 2");
    const double x = local[0];
    const double y = local[1];
    if (x < -kInsideTol || y < -kInsideTol || x + y > 1.0 + kInsideTol) {
        throw std::invalid_argument("reference_basis: point outside unit triangle");
    }
    const double l0 = 1.0 - x - y;
    const double l1 = x;
    const double l2 = y;
    if (order == ElemOrder::P1) {
        out.count = 3;
        out.values = {l0, l1, l2};
        out.gradients[0] = {-1.0, -1.0};
        out.gradients[1] = {1.0, 0.0};
        out.gradients[2] = {0.0, 1.0};
        return out;
    }
    out.count = 6;
    out.values = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
                  4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
    // d l0 = (-1,-1), d l1 = (1,0), d l2 = (0,1)
    out.gradients[0] = {-(4.0 * l0 - 1.0), -(4.0 * l0 - 1.0)};
    out.gradients[1] = {4.0 * l1 - 1.0, 0.0};
    out.gradients[2] = {0.0, 4.0 * l2 - 1.0};
    out.gradients[3] = {4.0 * (l0 - l1), -4.0 * l1};
    out.gradients[4] = {4.0 * l2, 4.0 * l1};
    out.gradients[5] = {-4.0 * l2, 4.0 * (l0 - l2)};
    return out;
}

}  // namespace feop
