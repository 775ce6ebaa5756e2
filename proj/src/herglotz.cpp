#include "fieldconc/herglotz.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fieldconc/errors.hpp"

namespace fc::herglotz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx I(0.0, 1.0);

std::filesystem::path sidecar_path(const std::string& csv_path)
{
    return std::filesystem::path(csv_path).replace_extension(".json");
}

}  // namespace

DirectionQuadrature DirectionQuadrature::uniform(int count)
{
    if (count < 1) throw DomainError("direction count must be positive");
    DirectionQuadrature q;
    q.angles.resize(count);
    q.weights.assign(count, kTwoPi / count);
    for (int j = 0; j < count; ++j) q.angles[j] = kTwoPi * j / count;
    return q;
}

void DirectionQuadrature::validate() const
{
    if (angles.empty() || angles.size() != weights.size()) throw DomainError("malformed direction quadrature");
    for (double w : weights) {
        if (!(w > 0)) throw DomainError("quadrature weights must be positive");
    }
}

void HerglotzKernel::validate() const
{
    quad.validate();
    if (g.size() != quad.size()) throw DomainError("kernel length does not match the quadrature");
    if (!(k > 0)) throw DomainError("wavenumber must be positive");
    if (!g.allFinite()) throw DomainError("kernel values must be finite");
}

double HerglotzKernel::l2_norm() const
{
    double s = 0.0;
    for (int j = 0; j < quad.size(); ++j) s += quad.weights[j] * std::norm(g[j]);
    return std::sqrt(s);
}

cplx herglotz_eval(const HerglotzKernel& kernel, const Vec2& x)
{
    cplx sum = 0.0;
    for (int j = 0; j < kernel.quad.size(); ++j) {
        double phase = kernel.k * x.dot(kernel.quad.node(j));
        sum += kernel.quad.weights[j] * std::polar(1.0, phase) * kernel.g[j];
    }
    return sum;
}

CVec2 herglotz_grad(const HerglotzKernel& kernel, const Vec2& x)
{
    CVec2 sum = CVec2::Zero();
    for (int j = 0; j < kernel.quad.size(); ++j) {
        Vec2 d = kernel.quad.node(j);
        cplx term = kernel.quad.weights[j] * std::polar(1.0, kernel.k * x.dot(d)) * kernel.g[j] * I * kernel.k;
        sum += term * d.cast<cplx>();
    }
    return sum;
}

GridSamples herglotz_on_grid(const HerglotzKernel& kernel, double x0, double y0, double h, int nx, int ny)
{
    const int nd = kernel.quad.size();
    Eigen::MatrixXcd ex(nx, nd), ey(ny, nd);
    Eigen::VectorXcd c(nd), cx(nd), cy(nd);
    for (int j = 0; j < nd; ++j) {
        Vec2 d = kernel.quad.node(j);
        for (int i = 0; i < nx; ++i) ex(i, j) = std::polar(1.0, kernel.k * (x0 + i * h) * d.x());
        for (int i = 0; i < ny; ++i) ey(i, j) = std::polar(1.0, kernel.k * (y0 + i * h) * d.y());
        c[j] = kernel.quad.weights[j] * kernel.g[j];
        cx[j] = c[j] * I * kernel.k * d.x();
        cy[j] = c[j] * I * kernel.k * d.y();
    }
    GridSamples out;
    Eigen::MatrixXcd eyt = ey.transpose();
    out.value = ex * c.asDiagonal() * eyt;
    out.dx = ex * cx.asDiagonal() * eyt;
    out.dy = ex * cy.asDiagonal() * eyt;
    return out;
}

Eigen::VectorXcd CollocationSet::targets() const
{
    Eigen::VectorXcd f(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) f[i] = rows[i].scale * rows[i].target;
    return f;
}

int CollocationSet::count(CurveTag tag, bool derivative) const
{
    int n = 0;
    for (const auto& r : rows) n += (r.tag == tag && r.normal.has_value() == derivative) ? 1 : 0;
    return n;
}

Eigen::MatrixXcd build_operator(const CollocationSet& colloc, const DirectionQuadrature& quad, double k)
{
    quad.validate();
    if (colloc.rows.empty()) throw DomainError("empty collocation set");
    const int nr = static_cast<int>(colloc.rows.size());
    const int nd = quad.size();
    Eigen::MatrixXcd H(nr, nd);
    for (int i = 0; i < nr; ++i) {
        const CollocationRow& row = colloc.rows[i];
        for (int j = 0; j < nd; ++j) {
            Vec2 d = quad.node(j);
            cplx e = quad.weights[j] * std::polar(1.0, k * row.point.dot(d));
            if (row.normal) e *= I * k * d.dot(*row.normal);
            H(i, j) = row.scale * e;
        }
    }
    return H;
}

TikhonovResult tikhonov_solve(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f, double alpha)
{
    if (!(alpha > 0)) throw DomainError("Tikhonov parameter must be positive");
    if (H.rows() != f.size()) throw DomainError("operator and target dimensions differ");
    const Eigen::Index m = H.rows(), n = H.cols();
    Eigen::MatrixXcd A(m + n, n);
    A.topRows(m) = H;
    A.bottomRows(n) = std::sqrt(alpha) * Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(m + n);
    b.head(m) = f;
    TikhonovResult res;
    res.g = A.householderQr().solve(b);
    res.residual_norm = (H * res.g - f).norm();
    res.solution_norm = res.g.norm();
    return res;
}

CollocationSet build_target(const teig::CompositeEigenfunction& cf, const TargetOptions& opts)
{
    cf.validate();
    if (opts.points_per_curve < 8) throw GeometryError("collocation needs at least 8 points per curve");
    if (cf.modes.empty()) throw DomainError("composite has no generator modes");
    const double k = cf.modes.front().k;
    CollocationSet set;
    int curve = 0;
    auto add_curve = [&](const std::vector<geometry::BoundaryPoint>& pts, CurveTag tag, auto&& target_fn) {
        for (const auto& bp : pts) {
            teig::Vec3 p(bp.point.x(), bp.point.y(), 0.0);
            auto [val, dn] = target_fn(p, bp.normal);
            set.rows.push_back({bp.point, std::nullopt, val, 1.0, tag, curve});
            if (opts.derivative_rows) set.rows.push_back({bp.point, bp.normal, dn, 1.0 / k, tag, curve});
        }
        ++curve;
    };
    if (cf.inclusion) {
        add_curve(geometry::boundary_samples(*cf.inclusion, opts.points_per_curve), CurveTag::inclusion,
                  [](const teig::Vec3&, const Vec2&) { return std::pair<cplx, cplx>(0.0, 0.0); });
    }
    for (const teig::RadialMode& mode : cf.modes) {
        geometry::Disk disk{Vec2(mode.center.x(), mode.center.y()), mode.r0};
        add_curve(geometry::boundary_samples(disk, opts.points_per_curve), CurveTag::ball,
                  [&](const teig::Vec3& p, const Vec2& nrm) {
                      cplx v = teig::composite_eval(cf, p);
                      teig::CVec3 g = teig::composite_grad(cf, p);
                      cplx dn = g.x() * nrm.x() + g.y() * nrm.y();
                      return std::pair<cplx, cplx>(v, dn);
                  });
    }
    return set;
}

FitReport fit_report(const CollocationSet& colloc, const Eigen::MatrixXcd& H, const Eigen::VectorXcd& g)
{
    FitReport rep;
    Eigen::VectorXcd f = colloc.targets();
    Eigen::VectorXcd hg = H * g;
    rep.residual_norm = (hg - f).norm();
    rep.solution_norm = g.norm();
    double ball_res = 0.0, ball_ref = 0.0, inc_sq = 0.0;
    int inc_n = 0;
    for (size_t i = 0; i < colloc.rows.size(); ++i) {
        const CollocationRow& row = colloc.rows[i];
        if (row.normal) continue;
        double r = std::abs(hg[i] - f[i]);
        rep.max_abs_residual = std::max(rep.max_abs_residual, r);
        if (row.tag == CurveTag::ball) {
            ball_res += r * r;
            ball_ref += std::norm(f[i]);
            rep.ball_max_abs = std::max(rep.ball_max_abs, r);
        } else {
            rep.inclusion_max_abs = std::max(rep.inclusion_max_abs, std::abs(hg[i]));
            inc_sq += std::norm(hg[i]);
            ++inc_n;
        }
    }
    rep.ball_relative = ball_ref > 0 ? std::sqrt(ball_res / ball_ref) : 0.0;
    rep.inclusion_rms = inc_n > 0 ? std::sqrt(inc_sq / inc_n) : 0.0;
    return rep;
}

Recovery recover_kernel(const teig::CompositeEigenfunction& cf, const TargetOptions& opts, int directions,
                        double alpha)
{
    Recovery out;
    out.colloc = build_target(cf, opts);
    const double k = cf.modes.front().k;
    DirectionQuadrature quad = DirectionQuadrature::uniform(directions);
    Eigen::MatrixXcd H = build_operator(out.colloc, quad, k);
    TikhonovResult tr = tikhonov_solve(H, out.colloc.targets(), alpha);
    out.kernel = {quad, tr.g, k, alpha};
    out.report = fit_report(out.colloc, H, tr.g);
    return out;
}

void save_kernel(const std::string& csv_path, const HerglotzKernel& kernel, const FitReport* report)
{
    kernel.validate();
    std::ofstream os(csv_path);
    if (!os) throw Error("cannot write kernel file " + csv_path);
    os.precision(17);
    os << "angle,re_g,im_g,weight\n";
    for (int j = 0; j < kernel.quad.size(); ++j) {
        os << kernel.quad.angles[j] << ',' << kernel.g[j].real() << ',' << kernel.g[j].imag() << ','
           << kernel.quad.weights[j] << '\n';
    }
    nlohmann::json meta;
    meta["k"] = kernel.k;
    meta["alpha_reg"] = kernel.alpha_reg;
    meta["directions"] = kernel.quad.size();
    if (report) {
        meta["residual_norm"] = report->residual_norm;
        meta["solution_norm"] = report->solution_norm;
        meta["ball_relative_residual"] = report->ball_relative;
        meta["inclusion_max_abs"] = report->inclusion_max_abs;
        meta["max_abs_residual"] = report->max_abs_residual;
    }
    std::ofstream js(sidecar_path(csv_path));
    if (!js) throw Error("cannot write kernel sidecar for " + csv_path);
    js << meta.dump(2) << '\n';
}

HerglotzKernel load_kernel(const std::string& csv_path)
{
    std::ifstream is(csv_path);
    if (!is) throw Error("cannot read kernel file " + csv_path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("angle,re_g,im_g,weight", 0) != 0) throw ConfigError("unexpected kernel CSV header in " + csv_path);
    HerglotzKernel kernel;
    std::vector<cplx> g;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        double vals[4];
        for (double& v : vals) {
            if (!std::getline(ss, tok, ',')) throw ConfigError("malformed kernel row: " + line);
            v = std::stod(tok);
        }
        kernel.quad.angles.push_back(vals[0]);
        kernel.quad.weights.push_back(vals[3]);
        g.emplace_back(vals[1], vals[2]);
    }
    kernel.g = Eigen::Map<Eigen::VectorXcd>(g.data(), static_cast<Eigen::Index>(g.size()));
    std::ifstream js(sidecar_path(csv_path));
    if (!js) throw ConfigError("missing kernel sidecar for " + csv_path);
    nlohmann::json meta = nlohmann::json::parse(js);
    kernel.k = meta.at("k").get<double>();
    kernel.alpha_reg = meta.value("alpha_reg", 0.0);
    kernel.validate();
    return kernel;
}

}  // namespace fc::herglotz
