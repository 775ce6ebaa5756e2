#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fieldconc/errors.hpp"
#include "fieldconc/scatter.hpp"

namespace fc::scatter {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Trip = Eigen::Triplet<cplx>;

// Lumped mass: centre weight, the rest shared by the four neighbours.
constexpr double kMassCentre = 0.75;
constexpr double kMassSide = 0.0625;

struct Stretch {
    std::vector<cplx> node_x, node_y, face_x, face_y;
};

Stretch make_stretch(const MaterialGrid& mg)
{
    const GridFrame& f = mg.frame;
    const double L = f.pml * f.h;
    auto profile = [&](double pos, double lo, double hi) {
        double d = std::max({0.0, lo - pos, pos - hi});
        return cplx(1.0, mg.pml_strength * (d / L) * (d / L) / mg.k);
    };
    double xlo = f.x0 + f.pml * f.h, xhi = f.x0 + (f.nx - 1 - f.pml) * f.h;
    double ylo = f.y0 + f.pml * f.h, yhi = f.y0 + (f.ny - 1 - f.pml) * f.h;
    Stretch s;
    for (int i = 0; i < f.nx; ++i) s.node_x.push_back(profile(f.x0 + i * f.h, xlo, xhi));
    for (int j = 0; j < f.ny; ++j) s.node_y.push_back(profile(f.y0 + j * f.h, ylo, yhi));
    for (int i = 0; i + 1 < f.nx; ++i) s.face_x.push_back(profile(f.x0 + (i + 0.5) * f.h, xlo, xhi));
    for (int j = 0; j + 1 < f.ny; ++j) s.face_y.push_back(profile(f.y0 + (j + 0.5) * f.h, ylo, yhi));
    return s;
}

// Stretched-coordinate operator multiplied through by s_x s_y; nodes outside the grid are zero.
// The operator is linear in (sigma, tau), so passing sigma - 1 and tau - 1 yields A - A0.
SpMat assemble(const MaterialGrid& mg, const Stretch& s, const Eigen::MatrixXcd& sx, const Eigen::MatrixXcd& sy,
               const Eigen::MatrixXcd& tau)
{
    const GridFrame& f = mg.frame;
    const double inv_h2 = 1.0 / (f.h * f.h);
    const double k2 = mg.k * mg.k;
    auto mass = [&](int i, int j) { return k2 * tau(i, j) * s.node_x[i] * s.node_y[j]; };
    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(f.nx) * f.ny * 9);
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            const int row = f.index(i, j);
            cplx diag = kMassCentre * mass(i, j);
            auto link = [&](int a, int b, cplx c) {
                diag -= c;
                if (a < 0 || b < 0 || a >= f.nx || b >= f.ny) return;
                trips.emplace_back(row, f.index(a, b), c + kMassSide * mass(a, b));
            };
            link(i - 1, j, i > 0 ? sx(i - 1, j) * s.node_y[j] / s.face_x[i - 1] * inv_h2 : 0.0);
            link(i + 1, j, i + 1 < f.nx ? sx(i, j) * s.node_y[j] / s.face_x[i] * inv_h2 : 0.0);
            link(i, j - 1, j > 0 ? sy(i, j - 1) * s.node_x[i] / s.face_y[j - 1] * inv_h2 : 0.0);
            link(i, j + 1, j + 1 < f.ny ? sy(i, j) * s.node_x[i] / s.face_y[j] * inv_h2 : 0.0);
            trips.emplace_back(row, row, diag);
        }
    }
    SpMat A(f.nx * f.ny, f.nx * f.ny);
    A.setFromTriplets(trips.begin(), trips.end());
    A.prune(cplx(0.0));
    return A;
}

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& m)
{
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unflatten(const Eigen::VectorXcd& v, int nx, int ny)
{
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), nx, ny);
}

}  // namespace

SolveResult solve_scattered(const MediumScene& scene, const IncidentField& incident, const GridPolicy& policy)
{
    MaterialGrid mg = discretize(scene, policy);
    return solve_scattered(scene, incident, mg, policy.direct_limit);
}

SolveResult solve_scattered(const MediumScene& scene, const IncidentField& incident, const MaterialGrid& materials,
                            double direct_limit)
{
    const GridFrame& f = materials.frame;
    if (materials.tau.rows() != f.nx || materials.tau.cols() != f.ny) throw DomainError("material grid mismatch");
    if (!incident.value && !incident.on_grid) throw DomainError("incident field is empty");

    Stretch st = make_stretch(materials);
    SpMat A = assemble(materials, st, materials.sigma_x, materials.sigma_y, materials.tau);
    Eigen::MatrixXcd dsx = materials.sigma_x.array() - 1.0;
    Eigen::MatrixXcd dsy = materials.sigma_y.array() - 1.0;
    Eigen::MatrixXcd dtau = materials.tau.array() - 1.0;
    SpMat dA = assemble(materials, st, dsx, dsy, dtau);

    SolveResult res;
    res.materials = materials;
    res.incident = {f, Component::incident, incident.sample(f)};
    Eigen::VectorXcd ui = flatten(res.incident.u);
    Eigen::VectorXcd b = -(dA * ui);
    const double bnorm = b.norm();

    Eigen::VectorXcd us;
    if (bnorm == 0.0) {
        us = Eigen::VectorXcd::Zero(b.size());
        res.residual = 0.0;
    } else if (static_cast<double>(A.rows()) <= direct_limit) {
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU factorization failed: " + lu.lastErrorMessage());
        us = lu.solve(b);
        for (int it = 0; it < 2; ++it) {
            Eigen::VectorXcd r = b - A * us;
            if (r.norm() <= 1e-12 * bnorm) break;
            us += lu.solve(r);
        }
        res.used_direct = true;
    } else {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<cplx>> it;
        it.preconditioner().setDroptol(1e-4);
        it.preconditioner().setFillfactor(20);
        it.setTolerance(1e-10);
        it.setMaxIterations(5000);
        it.compute(A);
        us = it.solve(b);
        res.used_direct = false;
    }
    if (bnorm > 0) res.residual = (A * us - b).norm() / bnorm;
    if (!us.allFinite() || res.residual > 1e-6) {
        throw ConvergenceError("Helmholtz solve did not converge, relative residual " + std::to_string(res.residual));
    }
    res.scattered = {f, Component::scattered, unflatten(us, f.nx, f.ny)};
    res.total = {f, Component::total, res.incident.u + res.scattered.u};
    return res;
}

}  // namespace fc::scatter
