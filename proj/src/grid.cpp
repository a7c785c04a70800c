#include "semicert/grid.hpp"

#include <algorithm>
#include <cmath>

namespace semicert {

BoxDomain::BoxDomain(std::vector<double> lengths, std::vector<int> cells)
    : lengths_(std::move(lengths)), cells_(std::move(cells)) {
    if (lengths_.empty() || lengths_.size() > 3)
        throw std::invalid_argument("BoxDomain: dim must be 1, 2 or 3");
    if (cells_.size() != lengths_.size())
        throw std::invalid_argument("BoxDomain: lengths and cells must have the same dimension");
    for (double L : lengths_)
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("BoxDomain: lengths must be positive and finite");
    for (int n : cells_)
        if (n < 2) throw std::invalid_argument("BoxDomain: need at least 2 cells per axis");
}

std::size_t BoxDomain::interior_count() const {
    std::size_t n = 1;
    for (int axis = 0; axis < dim(); ++axis) n *= static_cast<std::size_t>(interior(axis));
    return n;
}

double BoxDomain::cell_volume() const {
    double v = 1.0;
    for (int axis = 0; axis < dim(); ++axis) v *= spacing(axis);
    return v;
}

double BoxDomain::max_spacing() const {
    double h = 0.0;
    for (int axis = 0; axis < dim(); ++axis) h = std::max(h, spacing(axis));
    return h;
}

std::array<int, 3> BoxDomain::node_multi_index(std::size_t index) const {
    if (index >= interior_count())
        throw std::out_of_range("node index " + std::to_string(index) + " out of range");
    std::array<int, 3> mi{0, 0, 0};
    for (int axis = 0; axis < dim(); ++axis) {
        const auto m = static_cast<std::size_t>(interior(axis));
        mi[axis] = static_cast<int>(index % m);
        index /= m;
    }
    return mi;
}

std::array<double, 3> BoxDomain::node_coordinates(std::size_t index) const {
    const auto mi = node_multi_index(index);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int axis = 0; axis < dim(); ++axis) x[axis] = (mi[axis] + 1) * spacing(axis);
    return x;
}

GridField::GridField(BoxDomain domain, double fill)
    : domain_(std::move(domain)), values_(domain_.interior_count(), fill) {}

GridField::GridField(BoxDomain domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_.interior_count())
        throw std::invalid_argument("GridField: value array length does not match interior node count");
}

double sup_norm(const GridField& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

double l2_norm(const GridField& u) {
    double s = 0.0;
    for (double v : u.values()) s += v * v;
    return std::sqrt(s * u.domain().cell_volume());
}

GridField positive_part(const GridField& u, double shift) {
    GridField out(u.domain());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::max(u[i] - shift, 0.0);
    return out;
}

GridField negate(const GridField& u) {
    GridField out(u.domain());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = -u[i];
    return out;
}

void require_same_domain(const GridField& a, const GridField& b, const std::string& where) {
    if (!(a.domain() == b.domain()))
        throw std::invalid_argument(where + ": fields live on different domains");
}

}  // namespace semicert
