#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fieldconc/geometry.hpp"

namespace fc::scatter {

using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using cplx = std::complex<double>;

// Virtual generator support; carries no material.
struct Ball {
    Vec2 center{0.0, 0.0};
    double radius = 0.0;
};

struct MediumScene {
    geometry::Shape inclusion = geometry::Disk{};
    cplx sigma_in = 1.0;
    cplx tau_in = 1.0;
    double k = 1.0;
    std::vector<Ball> generators;
    // > 0 replaces the sharp interface by a smooth transition of half-width smoothing_width.
    double smoothing_width = 0.0;

    void validate() const;
    [[nodiscard]] cplx contrast() const;  // sqrt(tau_in / sigma_in)
};

struct GridPolicy {
    double points_per_wavelength = 15.0;
    std::optional<double> spacing;  // overrides points_per_wavelength when set
    double margin = -1.0;           // < 0: one background wavelength
    int pml_cells = 12;
    double pml_reflection = 1e-6;
    int subsamples = 8;             // per cell edge, for interface averaging
    double max_unknowns = 4.0e6;
    double direct_limit = 1.5e6;    // sparse LU up to this many unknowns, iterative above
    std::optional<geometry::BoundingBox> region;  // explicit physical box (PML added outside)

    void validate() const;
};

// Node grid x_i = x0 + i h, y_j = y0 + j h; the outer pml cells form the absorbing layer.
struct GridFrame {
    double x0 = 0.0, y0 = 0.0, h = 1.0;
    int nx = 0, ny = 0, pml = 0;

    [[nodiscard]] Vec2 point(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    [[nodiscard]] bool in_pml(int i, int j) const
    {
        return i < pml || j < pml || i >= nx - pml || j >= ny - pml;
    }
    [[nodiscard]] int index(int i, int j) const { return i + nx * j; }
};

struct MaterialGrid {
    GridFrame frame;
    double k = 1.0;
    double pml_strength = 0.0;  // peak damping of the quadratic profile
    Eigen::MatrixXcd tau;       // nodes, nx by ny
    Eigen::MatrixXcd sigma_x;   // faces (i+1/2, j), nx-1 by ny
    Eigen::MatrixXcd sigma_y;   // faces (i, j+1/2), nx by ny-1

    [[nodiscard]] double contrast_area() const;  // area-weighted inclusion fraction
};

[[nodiscard]] MaterialGrid discretize(const MediumScene& scene, const GridPolicy& policy);

enum class Component { incident, scattered, total };

struct FieldGrid {
    GridFrame frame;
    Component component = Component::total;
    Eigen::MatrixXcd u;
};

struct VectorFieldGrid {
    GridFrame frame;
    Eigen::MatrixXcd ux, uy;

    [[nodiscard]] Eigen::MatrixXd magnitude() const;
};

// Incident field: pointwise value and gradient, optionally a fast tensor-grid sampler.
struct IncidentField {
    std::function<cplx(const Vec2&)> value;
    std::function<CVec2(const Vec2&)> grad;
    std::function<Eigen::MatrixXcd(const GridFrame&)> on_grid;

    [[nodiscard]] Eigen::MatrixXcd sample(const GridFrame& frame) const;
};

[[nodiscard]] IncidentField plane_wave(double k, const Vec2& direction, cplx amplitude = 1.0);

struct SolveResult {
    MaterialGrid materials;
    FieldGrid incident, scattered, total;
    double residual = 0.0;  // ||A u - b|| / ||b||
    bool used_direct = true;
};

[[nodiscard]] SolveResult solve_scattered(const MediumScene& scene, const IncidentField& incident,
                                          const GridPolicy& policy);
[[nodiscard]] SolveResult solve_scattered(const MediumScene& scene, const IncidentField& incident,
                                          const MaterialGrid& materials, double direct_limit = 1.5e6);

// Central differences inside, second-order one-sided differences on the edges.
[[nodiscard]] VectorFieldGrid gradient_field(const FieldGrid& grid);

// Separable series solution for a disk inclusion under plane-wave incidence.
class DiskReference {
public:
    DiskReference(const MediumScene& scene, const Vec2& direction);

    [[nodiscard]] cplx total(const Vec2& x) const;
    [[nodiscard]] cplx scattered(const Vec2& x) const;
    [[nodiscard]] CVec2 total_grad(const Vec2& x) const;
    // Angular Fourier coefficients u_m(r) and d/dr u_m(r) of the total field, m = -M..M.
    void modal(double r, std::vector<cplx>& um, std::vector<cplx>& dum) const;
    // Im of the boundary integral of conj(u) du/dr over the circle |x - c| = rho.
    [[nodiscard]] double net_flux(double rho) const;
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] const std::vector<cplx>& scattered_coefficients() const { return b_; }

private:
    struct RadialTable {
        double r_start = 0.0, dr = 0.0;
        std::vector<cplx> u, du;
    };

    [[nodiscard]] double sigma_at(double r) const;
    [[nodiscard]] cplx sigma_c(double r) const;
    [[nodiscard]] cplx tau_c(double r) const;
    void modal_inside(int m, double r, cplx& u, cplx& du) const;

    MediumScene scene_;
    Vec2 center_;
    double radius_ = 1.0;
    Vec2 direction_;
    cplx kn_;
    int order_ = 0;
    std::vector<cplx> a_, b_, c_;  // incident, scattered, interior coefficients (index m + order_)
    std::vector<RadialTable> tables_;
};

// Smooth step used for the smoothed-contrast variant: 1 inside (d <= -w), 0 outside (d >= w).
[[nodiscard]] double smooth_fraction(double signed_distance, double width);

struct FieldExportMeta {
    double k = 0.0;
    double pml_reflection = 0.0;
    double residual = 0.0;
    std::string extra_json = "{}";
};

// CSV x,y,re_u,im_u,abs_grad for non-PML nodes, JSON metadata next to it.
void write_field_csv(const std::string& csv_path, const FieldGrid& field, const VectorFieldGrid& grad,
                     const FieldExportMeta& meta);

}  // namespace fc::scatter
