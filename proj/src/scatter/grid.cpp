#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/scatter.hpp"

namespace fc::scatter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool inside(const MediumScene& scene, double x, double y) { return geometry::contains(scene.inclusion, Vec2(x, y)); }

// Fraction of a sub x sub lattice of the cell centred at (x, y) lying in the inclusion.
double cell_fraction(const MediumScene& scene, double x, double y, double h, int sub)
{
    int hits = 0;
    for (int a = 0; a < sub; ++a) {
        double dx = ((a + 0.5) / sub - 0.5) * h;
        for (int b = 0; b < sub; ++b) {
            double dy = ((b + 0.5) / sub - 0.5) * h;
            hits += inside(scene, x + dx, y + dy) ? 1 : 0;
        }
    }
    return static_cast<double>(hits) / (sub * sub);
}

// Fraction of the segment from p to p + h e lying in the inclusion.
double segment_fraction(const MediumScene& scene, const Vec2& p, const Vec2& e, double h, int sub)
{
    int hits = 0;
    for (int a = 0; a < sub; ++a) {
        Vec2 q = p + ((a + 0.5) / sub) * h * e;
        hits += inside(scene, q.x(), q.y()) ? 1 : 0;
    }
    return static_cast<double>(hits) / sub;
}

cplx harmonic_blend(cplx inner, double f) { return 1.0 / (f / inner + (1.0 - f)); }

}  // namespace

void MediumScene::validate() const
{
    geometry::validate(inclusion);
    if (!(k > 0)) throw DomainError("wavenumber must be positive");
    if (!(sigma_in.real() > 0)) throw DomainError("Re sigma must be positive inside the inclusion");
    if (sigma_in.imag() > 0) throw DomainError("Im sigma must be non-positive");
    if (tau_in.imag() < 0) throw DomainError("Im tau must be non-negative");
    if (smoothing_width < 0) throw DomainError("smoothing width must be non-negative");
    for (size_t i = 0; i < generators.size(); ++i) {
        const Ball& b = generators[i];
        if (!(b.radius > 0)) throw GeometryError("generator radius must be positive");
        if (geometry::contains(inclusion, b.center)) throw GeometryError("generator centre inside the inclusion");
        for (const auto& bp : geometry::boundary_samples(inclusion, 4096)) {
            if ((bp.point - b.center).norm() <= b.radius) throw GeometryError("generator ball meets the inclusion");
        }
        for (size_t j = i + 1; j < generators.size(); ++j) {
            if ((generators[j].center - b.center).norm() <= b.radius + generators[j].radius)
                throw GeometryError("generator balls overlap");
        }
    }
}

cplx MediumScene::contrast() const { return std::sqrt(tau_in / sigma_in); }

void GridPolicy::validate() const
{
    if (spacing && !(*spacing > 0)) throw DomainError("grid spacing must be positive");
    if (!spacing && !(points_per_wavelength >= 10.0))
        throw DomainError("resolution policy needs at least 10 points per wavelength");
    if (pml_cells < 1) throw DomainError("absorbing layer needs at least one cell");
    if (!(pml_reflection > 0 && pml_reflection < 1)) throw DomainError("PML reflection must lie in (0,1)");
    if (subsamples < 1) throw DomainError("subsample count must be positive");
}

double smooth_fraction(double d, double w)
{
    if (d <= -w) return 1.0;
    if (d >= w) return 0.0;
    double t = (w - d) / (2.0 * w);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double MaterialGrid::contrast_area() const
{
    // fraction recovered from tau assuming a single inclusion value
    cplx inner = 1.0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
        if (std::abs(tau(i) - 1.0) > best) {
            best = std::abs(tau(i) - 1.0);
            inner = tau(i);
        }
    }
    if (best == 0.0) return 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < tau.size(); ++i) total += std::real((tau(i) - 1.0) / (inner - 1.0));
    return total * frame.h * frame.h;
}

MaterialGrid discretize(const MediumScene& scene, const GridPolicy& policy)
{
    scene.validate();
    policy.validate();
    const double k = scene.k;
    double nmax = std::max(1.0, std::abs(scene.contrast()));
    double lambda_min = kTwoPi / (k * nmax);
    double h = policy.spacing ? *policy.spacing : lambda_min / policy.points_per_wavelength;
    if (lambda_min / h < 10.0 - 1e-9) {
        throw DomainError("grid spacing resolves the shortest wavelength with only " +
                          std::to_string(lambda_min / h) + " points");
    }

    geometry::BoundingBox box;
    if (policy.region) {
        box = *policy.region;
    } else {
        box = geometry::bounding_box(scene.inclusion);
        for (const Ball& b : scene.generators) {
            Vec2 r(b.radius, b.radius);
            box.expand({b.center - r, b.center + r});
        }
        double margin = policy.margin < 0 ? kTwoPi / k : policy.margin;
        box.lo -= Vec2(margin, margin);
        box.hi += Vec2(margin, margin);
    }

    MaterialGrid mg;
    GridFrame& f = mg.frame;
    f.h = h;
    f.pml = policy.pml_cells;
    int nx_phys = static_cast<int>(std::ceil((box.hi.x() - box.lo.x()) / h)) + 1;
    int ny_phys = static_cast<int>(std::ceil((box.hi.y() - box.lo.y()) / h)) + 1;
    f.nx = nx_phys + 2 * f.pml;
    f.ny = ny_phys + 2 * f.pml;
    f.x0 = box.lo.x() - f.pml * h;
    f.y0 = box.lo.y() - f.pml * h;
    double unknowns = static_cast<double>(f.nx) * f.ny;
    if (unknowns > policy.max_unknowns) {
        throw ResourceError("grid needs " + std::to_string(static_cast<long long>(unknowns)) +
                            " unknowns, above the budget of " +
                            std::to_string(static_cast<long long>(policy.max_unknowns)));
    }
    if (f.nx < 16 || f.ny < 16) throw GeometryError("grid must have at least 16 nodes per direction");
    mg.k = k;
    mg.pml_strength = -3.0 * std::log(policy.pml_reflection) / (2.0 * f.pml * h);

    mg.tau = Eigen::MatrixXcd::Ones(f.nx, f.ny);
    mg.sigma_x = Eigen::MatrixXcd::Ones(f.nx - 1, f.ny);
    mg.sigma_y = Eigen::MatrixXcd::Ones(f.nx, f.ny - 1);
    const cplx s_in = scene.sigma_in, t_in = scene.tau_in;
    const int sub = policy.subsamples;

    if (scene.smoothing_width > 0) {
        const double w = scene.smoothing_width;
        auto chi = [&](double x, double y) {
            return smooth_fraction(geometry::signed_distance(scene.inclusion, Vec2(x, y)), w);
        };
        geometry::BoundingBox ib = geometry::bounding_box(scene.inclusion);
        auto near = [&](double x, double y) {
            return x > ib.lo.x() - w - h && x < ib.hi.x() + w + h && y > ib.lo.y() - w - h && y < ib.hi.y() + w + h;
        };
        for (int j = 0; j < f.ny; ++j) {
            for (int i = 0; i < f.nx; ++i) {
                Vec2 p = f.point(i, j);
                if (!near(p.x(), p.y())) continue;
                mg.tau(i, j) = 1.0 + (t_in - 1.0) * chi(p.x(), p.y());
                if (i + 1 < f.nx) mg.sigma_x(i, j) = 1.0 + (s_in - 1.0) * chi(p.x() + 0.5 * h, p.y());
                if (j + 1 < f.ny) mg.sigma_y(i, j) = 1.0 + (s_in - 1.0) * chi(p.x(), p.y() + 0.5 * h);
            }
        }
        return mg;
    }

    // node classification, refined by sub-cell sampling near the interface
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> in(f.nx, f.ny);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            Vec2 p = f.point(i, j);
            in(i, j) = inside(scene, p.x(), p.y());
        }
    auto mixed = [&](int i, int j) {
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                int a = i + di, b = j + dj;
                if (a < 0 || b < 0 || a >= f.nx || b >= f.ny) continue;
                if (in(a, b) != in(i, j)) return true;
            }
        return false;
    };
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            Vec2 p = f.point(i, j);
            bool border = mixed(i, j);
            double frac = border ? cell_fraction(scene, p.x(), p.y(), h, sub) : (in(i, j) ? 1.0 : 0.0);
            mg.tau(i, j) = 1.0 + (t_in - 1.0) * frac;
            if (i + 1 < f.nx) {
                double fx = (border || mixed(i + 1, j)) ? segment_fraction(scene, p, Vec2(1, 0), h, sub)
                                                        : (in(i, j) ? 1.0 : 0.0);
                mg.sigma_x(i, j) = harmonic_blend(s_in, fx);
            }
            if (j + 1 < f.ny) {
                double fy = (border || mixed(i, j + 1)) ? segment_fraction(scene, p, Vec2(0, 1), h, sub)
                                                        : (in(i, j) ? 1.0 : 0.0);
                mg.sigma_y(i, j) = harmonic_blend(s_in, fy);
            }
        }
    }
    return mg;
}

Eigen::MatrixXcd IncidentField::sample(const GridFrame& frame) const
{
    if (on_grid) return on_grid(frame);
    Eigen::MatrixXcd u(frame.nx, frame.ny);
    for (int j = 0; j < frame.ny; ++j)
        for (int i = 0; i < frame.nx; ++i) u(i, j) = value(frame.point(i, j));
    return u;
}

IncidentField plane_wave(double k, const Vec2& direction, cplx amplitude)
{
    Vec2 d = direction.normalized();
    IncidentField f;
    f.value = [=](const Vec2& x) { return amplitude * std::polar(1.0, k * x.dot(d)); };
    f.grad = [=](const Vec2& x) {
        cplx v = amplitude * std::polar(1.0, k * x.dot(d)) * cplx(0.0, k);
        return CVec2(v * d.x(), v * d.y());
    };
    f.on_grid = [=](const GridFrame& fr) {
        Eigen::VectorXcd ex(fr.nx), ey(fr.ny);
        for (int i = 0; i < fr.nx; ++i) ex[i] = std::polar(1.0, k * (fr.x0 + i * fr.h) * d.x());
        for (int j = 0; j < fr.ny; ++j) ey[j] = std::polar(1.0, k * (fr.y0 + j * fr.h) * d.y());
        Eigen::MatrixXcd u = amplitude * ex * ey.transpose();
        return u;
    };
    return f;
}

Eigen::MatrixXd VectorFieldGrid::magnitude() const
{
    return (ux.cwiseAbs2() + uy.cwiseAbs2()).cwiseSqrt();
}

VectorFieldGrid gradient_field(const FieldGrid& grid)
{
    const GridFrame& f = grid.frame;
    const Eigen::MatrixXcd& u = grid.u;
    if (f.nx < 3 || f.ny < 3) throw DomainError("gradient needs at least 3 nodes per direction");
    VectorFieldGrid g;
    g.frame = f;
    g.ux.resize(f.nx, f.ny);
    g.uy.resize(f.nx, f.ny);
    const double inv2h = 1.0 / (2.0 * f.h);
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            if (i == 0)
                g.ux(i, j) = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) * inv2h;
            else if (i == f.nx - 1)
                g.ux(i, j) = (3.0 * u(i, j) - 4.0 * u(i - 1, j) + u(i - 2, j)) * inv2h;
            else
                g.ux(i, j) = (u(i + 1, j) - u(i - 1, j)) * inv2h;
            if (j == 0)
                g.uy(i, j) = (-3.0 * u(i, 0) + 4.0 * u(i, 1) - u(i, 2)) * inv2h;
            else if (j == f.ny - 1)
                g.uy(i, j) = (3.0 * u(i, j) - 4.0 * u(i, j - 1) + u(i, j - 2)) * inv2h;
            else
                g.uy(i, j) = (u(i, j + 1) - u(i, j - 1)) * inv2h;
        }
    }
    return g;
}

void write_field_csv(const std::string& csv_path, const FieldGrid& field, const VectorFieldGrid& grad,
                     const FieldExportMeta& meta)
{
    const GridFrame& f = field.frame;
    std::ofstream os(csv_path);
    if (!os) throw Error("cannot write field file " + csv_path);
    os.precision(10);
    os << "x,y,re_u,im_u,abs_grad\n";
    Eigen::MatrixXd mag = grad.magnitude();
    for (int j = f.pml; j < f.ny - f.pml; ++j) {
        for (int i = f.pml; i < f.nx - f.pml; ++i) {
            Vec2 p = f.point(i, j);
            os << p.x() << ',' << p.y() << ',' << field.u(i, j).real() << ',' << field.u(i, j).imag() << ','
               << mag(i, j) << '\n';
        }
    }
    nlohmann::json js;
    js["k"] = meta.k;
    js["h"] = f.h;
    js["nx"] = f.nx - 2 * f.pml;
    js["ny"] = f.ny - 2 * f.pml;
    js["x_min"] = f.x0 + f.pml * f.h;
    js["y_min"] = f.y0 + f.pml * f.h;
    js["x_max"] = f.x0 + (f.nx - 1 - f.pml) * f.h;
    js["y_max"] = f.y0 + (f.ny - 1 - f.pml) * f.h;
    js["pml_cells"] = f.pml;
    js["pml_reflection"] = meta.pml_reflection;
    js["solver_residual"] = meta.residual;
    const char* comp = field.component == Component::incident    ? "incident"
                       : field.component == Component::scattered ? "scattered"
                                                                 : "total";
    js["component"] = comp;
    js["extra"] = nlohmann::json::parse(meta.extra_json);
    std::ofstream jo(std::filesystem::path(csv_path).replace_extension(".json"));
    if (!jo) throw Error("cannot write field metadata for " + csv_path);
    jo << js.dump(2) << '\n';
}

}  // namespace fc::scatter
