#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace semicert {

/// Axis-aligned box (0,L_1)x...x(0,L_d), d in {1,2,3}, uniform cells per axis.
/// Grid functions live on interior nodes only; the boundary is implicitly zero.
class BoxDomain {
public:
    BoxDomain(std::vector<double> lengths, std::vector<int> cells);

    int dim() const { return static_cast<int>(lengths_.size()); }
    double length(int axis) const { return lengths_.at(axis); }
    int cells(int axis) const { return cells_.at(axis); }
    double spacing(int axis) const { return lengths_.at(axis) / cells_.at(axis); }
    int interior(int axis) const { return cells_.at(axis) - 1; }

    std::size_t interior_count() const;
    double cell_volume() const;   // product of spacings
    double max_spacing() const;

    /// Physical coordinates of interior node `index` (lexicographic, axis 0 fastest).
    std::array<double, 3> node_coordinates(std::size_t index) const;

    /// Multi-index of interior node `index`.
    std::array<int, 3> node_multi_index(std::size_t index) const;

    bool operator==(const BoxDomain&) const = default;

private:
    std::vector<double> lengths_;
    std::vector<int> cells_;
};

/// Grid function over the interior nodes of a BoxDomain, zero on the boundary.
class GridField {
public:
    explicit GridField(BoxDomain domain, double fill = 0.0);
    GridField(BoxDomain domain, std::vector<double> values);

    const BoxDomain& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    BoxDomain domain_;
    std::vector<double> values_;
};

double sup_norm(const GridField& u);
double l2_norm(const GridField& u);

/// Componentwise max(u - shift, 0); builds the test functions (u-a)_+ and (-u-a)_+.
GridField positive_part(const GridField& u, double shift);
GridField negate(const GridField& u);

void require_same_domain(const GridField& a, const GridField& b, const std::string& where);

}  // namespace semicert
