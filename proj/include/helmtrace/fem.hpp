#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <helmtrace/extension.hpp>
#include <helmtrace/trace_space.hpp>

namespace helmtrace {

enum class VertexTag { Interior = 0, Gamma = 1, GammaC = 2 };

struct Mesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles; // positively oriented
    std::vector<VertexTag> tags;
    double target_h = 0.0;
    double max_diameter = 0.0; // largest circumscribed diameter

    std::size_t count(VertexTag t) const {
        std::size_t n = 0;
        for (auto tag : tags)
            if (tag == t) ++n;
        return n;
    }
    double area() const {
        double a = 0.0;
        for (const auto& t : triangles) a += triangle_area(t);
        return a;
    }
    double triangle_area(const std::array<int, 3>& t) const {
        const auto& p0 = vertices[static_cast<std::size_t>(t[0])];
        const auto& p1 = vertices[static_cast<std::size_t>(t[1])];
        const auto& p2 = vertices[static_cast<std::size_t>(t[2])];
        return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                      (p2[0] - p0[0]) * (p1[1] - p0[1]));
    }
    // vertex lines "x y tag", then triangle lines "i j k"
    void serialize(std::ostream& os) const {
        char line[128];
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            std::snprintf(line, sizeof line, "%.17g %.17g %d\n", vertices[v][0],
                          vertices[v][1], static_cast<int>(tags[v]));
            os << line;
        }
        for (const auto& t : triangles) {
            std::snprintf(line, sizeof line, "%d %d %d\n", t[0], t[1], t[2]);
            os << line;
        }
    }
};

namespace detail {

struct Ring {
    double r;
    int sectors;
    int first; // index of vertex (angle 0) in Mesh::vertices
};

// Radial ladder: steps grow geometrically from the resolved boundary layer at
// the outer rim until they reach the bulk step h.
inline double boundary_step(double h) { return std::max(0.5 * h * h, h / 64.0); }

// largest 6*2^t whose sector width keeps w/dr >= 1.2, never below 6
inline int quantized_sectors(double limit) {
    int m = 6;
    while (2 * m <= limit) m *= 2;
    return m;
}

inline int outer_sector_count(double dr) {
    return quantized_sectors(2.0 * pi() / (1.2 * dr));
}

inline int next_sector_count(int m, double r, double dr) {
    int target = quantized_sectors(2.0 * pi() * r / (1.2 * dr));
    if (target >= m) return m;
    return std::max(m / 2, target); // at most one halving per interface
}

inline void append_ring(Mesh& mesh, std::vector<Ring>& rings, double r, int sectors,
                        VertexTag tag) {
    Ring ring{r, sectors, static_cast<int>(mesh.vertices.size())};
    for (int j = 0; j < sectors; ++j) {
        double th = 2.0 * pi() * static_cast<double>(j) / static_cast<double>(sectors);
        mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        mesh.tags.push_back(tag);
    }
    rings.push_back(ring);
}

// Band between consecutive rings; the inner ring has either the same sector
// count or exactly half of it (three-triangle stitch per coarse sector).
inline void triangulate_band(Mesh& mesh, const Ring& outer, const Ring& inner) {
    auto ov = [&](int j) { return outer.first + (j % outer.sectors); };
    auto iv = [&](int j) { return inner.first + (j % inner.sectors); };
    if (inner.sectors == outer.sectors) {
        for (int j = 0; j < outer.sectors; ++j) {
            mesh.triangles.push_back({ov(j), ov(j + 1), iv(j)});
            mesh.triangles.push_back({ov(j + 1), iv(j + 1), iv(j)});
        }
    } else if (2 * inner.sectors == outer.sectors) {
        for (int j = 0; j < inner.sectors; ++j) {
            mesh.triangles.push_back({iv(j), ov(2 * j), ov(2 * j + 1)});
            mesh.triangles.push_back({iv(j), ov(2 * j + 1), iv(j + 1)});
            mesh.triangles.push_back({iv(j + 1), ov(2 * j + 1), ov(2 * j + 2)});
        }
    } else {
        throw std::logic_error("triangulate_band: incompatible sector counts");
    }
}

inline void finalize_mesh(Mesh& mesh) {
    double dmax = 0.0;
    for (const auto& t : mesh.triangles) {
        double a = mesh.triangle_area(t);
        if (!(a > 0.0)) throw std::logic_error("mesh: non-positive triangle");
        const auto& p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
        const auto& p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
        const auto& p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
        double e0 = std::hypot(p1[0] - p2[0], p1[1] - p2[1]);
        double e1 = std::hypot(p2[0] - p0[0], p2[1] - p0[1]);
        double e2 = std::hypot(p0[0] - p1[0], p0[1] - p1[1]);
        dmax = std::max(dmax, e0 * e1 * e2 / (2.0 * a));
    }
    mesh.max_diameter = dmax;
}

inline void require_mesh_h(double h) {
    if (!(h >= 0.005 && h <= 0.3))
        throw std::invalid_argument("mesh: target size outside [0.005, 0.3]");
}

} // namespace detail

// Unit disk, polar mesh graded toward the rim (step 0.5 h^2 at r = 1 growing
// by 1.8x inward until it reaches h), sector counts 6*2^t halving inward,
// closed by a central fan.
inline Mesh mesh_disk(double h) {
    detail::require_mesh_h(h);
    Mesh mesh;
    mesh.target_h = h;
    std::vector<detail::Ring> rings;

    double dr = detail::boundary_step(h);
    int m = detail::outer_sector_count(dr);
    detail::append_ring(mesh, rings, 1.0, m, VertexTag::Gamma);
    double r = 1.0;
    while (true) {
        double next = r - dr;
        if (next < 0.55 * h) {
            if (r > 1.1 * h) {
                double bridge = std::max(0.55 * h, r - h);
                m = detail::next_sector_count(m, bridge, bridge);
                detail::append_ring(mesh, rings, bridge, m, VertexTag::Interior);
            }
            break;
        }
        // the ring's width is judged against the band below it
        m = detail::next_sector_count(m, next, std::min({1.8 * dr, h, next}));
        detail::append_ring(mesh, rings, next, m, VertexTag::Interior);
        r = next;
        dr = std::min(1.8 * dr, h);
    }
    for (std::size_t i = 0; i + 1 < rings.size(); ++i)
        detail::triangulate_band(mesh, rings[i], rings[i + 1]);

    const detail::Ring& hub = rings.back();
    if (hub.sectors > 12) throw std::logic_error("mesh_disk: fan too wide");
    int center = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back({0.0, 0.0});
    mesh.tags.push_back(VertexTag::Interior);
    for (int j = 0; j < hub.sectors; ++j)
        mesh.triangles.push_back({center, hub.first + j, hub.first + (j + 1) % hub.sectors});

    detail::finalize_mesh(mesh);
    return mesh;
}

// Annulus rho < r < 1, graded toward the outer boundary where the data
// lives; the inner rim is reached with a plain band.
inline Mesh mesh_annulus(double rho, double h) {
    detail::require_mesh_h(h);
    if (!(rho >= 0.05 && rho <= 0.95))
        throw std::domain_error("mesh_annulus: radius ratio outside [0.05, 0.95]");
    double dr = detail::boundary_step(h);
    if (1.0 - rho < 2.0 * dr)
        throw std::invalid_argument("mesh_annulus: gap narrower than two boundary steps");

    Mesh mesh;
    mesh.target_h = h;
    std::vector<detail::Ring> rings;
    int m = detail::outer_sector_count(dr);
    detail::append_ring(mesh, rings, 1.0, m, VertexTag::Gamma);
    double r = 1.0;
    while (true) {
        double next = r - dr;
        if (next < rho + 0.4 * dr) {
            m = detail::next_sector_count(m, rho, r - rho);
            detail::append_ring(mesh, rings, rho, m, VertexTag::GammaC);
            break;
        }
        m = detail::next_sector_count(m, next, std::min(1.8 * dr, h));
        detail::append_ring(mesh, rings, next, m, VertexTag::Interior);
        r = next;
        dr = std::min(1.8 * dr, h);
    }
    for (std::size_t i = 0; i + 1 < rings.size(); ++i)
        detail::triangulate_band(mesh, rings[i], rings[i + 1]);
    detail::finalize_mesh(mesh);
    return mesh;
}

namespace detail {

// P1 stiffness + sigma^2 * exact element mass.
inline Eigen::SparseMatrix<double> assemble_energy_matrix(const Mesh& mesh, double sigma) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (const auto& t : mesh.triangles) {
        const auto& p0 = mesh.vertices[static_cast<std::size_t>(t[0])];
        const auto& p1 = mesh.vertices[static_cast<std::size_t>(t[1])];
        const auto& p2 = mesh.vertices[static_cast<std::size_t>(t[2])];
        double area = mesh.triangle_area(t);
        double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double k = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                double mass = area / 12.0 * (i == j ? 2.0 : 1.0);
                trips.emplace_back(t[i], t[j], k + sigma * sigma * mass);
            }
        }
    }
    Eigen::SparseMatrix<double> s(static_cast<int>(mesh.vertices.size()),
                                  static_cast<int>(mesh.vertices.size()));
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

} // namespace detail

// ||grad u||^2 + sigma^2 ||u||^2 of a nodal field.
inline double fem_energy(const Mesh& mesh, const std::vector<cplx>& field, double sigma) {
    if (field.size() != mesh.vertices.size())
        throw std::invalid_argument("fem_energy: field size mismatch");
    auto s = detail::assemble_energy_matrix(mesh, sigma);
    Eigen::VectorXd re(field.size()), im(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        re[static_cast<Eigen::Index>(i)] = field[i].real();
        im[static_cast<Eigen::Index>(i)] = field[i].imag();
    }
    return re.dot(s * re) + im.dot(s * im);
}

// Discrete minimizer of the weighted energy among P1 fields with the given
// boundary data interpolated on the outer rim (and, for the alternative
// variant, zero data on the inner rim).  One factorization per (mesh, sigma);
// solves are reused across boundary data.
class MinExtensionSolver {
public:
    MinExtensionSolver(const Mesh& mesh, double sigma, ExtensionVariant variant)
        : mesh_(&mesh), sigma_(sigma) {
        if (!(sigma >= 1e-6 && sigma <= 1e6))
            throw std::domain_error("MinExtensionSolver: sigma outside supported window");
        bool clamp_inner = variant == ExtensionVariant::Alternative;
        free_of_vertex_.assign(mesh.vertices.size(), -1);
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            bool fixed = mesh.tags[v] == VertexTag::Gamma ||
                         (clamp_inner && mesh.tags[v] == VertexTag::GammaC);
            if (fixed) {
                fixed_list_.push_back(static_cast<int>(v));
            } else {
                free_of_vertex_[v] = static_cast<int>(free_list_.size());
                free_list_.push_back(static_cast<int>(v));
            }
        }
        full_ = detail::assemble_energy_matrix(mesh, sigma);

        int nf = static_cast<int>(free_list_.size());
        int nc = static_cast<int>(fixed_list_.size());
        std::vector<int> fixed_of_vertex(mesh.vertices.size(), -1);
        for (int c = 0; c < nc; ++c)
            fixed_of_vertex[static_cast<std::size_t>(fixed_list_[static_cast<std::size_t>(c)])] = c;
        std::vector<Eigen::Triplet<double>> tff, tfc;
        for (int col = 0; col < full_.outerSize(); ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(full_, col); it; ++it) {
                int fr = free_of_vertex_[static_cast<std::size_t>(it.row())];
                if (fr < 0) continue;
                int fcol = free_of_vertex_[static_cast<std::size_t>(it.col())];
                if (fcol >= 0)
                    tff.emplace_back(fr, fcol, it.value());
                else
                    tfc.emplace_back(fr, fixed_of_vertex[static_cast<std::size_t>(it.col())],
                                     it.value());
            }
        }
        ff_.resize(nf, nf);
        ff_.setFromTriplets(tff.begin(), tff.end());
        fc_.resize(nf, nc);
        fc_.setFromTriplets(tfc.begin(), tfc.end());
        ldlt_.compute(ff_);
        if (ldlt_.info() != Eigen::Success)
            throw std::runtime_error("MinExtensionSolver: factorization failed");
    }

    int boundary_mode_limit() const {
        return static_cast<int>(mesh_->count(VertexTag::Gamma)) / 8;
    }

    struct Solution {
        std::vector<cplx> values;
        double energy = 0.0;
        double residual = 0.0; // relative algebraic residual of the free block
    };

    Solution solve(const FourierTrace& g) const {
        if (g.max_mode() > boundary_mode_limit())
            throw std::invalid_argument("solve: boundary data beyond N_Gamma/8 band limit");
        Eigen::VectorXd bre(fixed_list_.size()), bim(fixed_list_.size());
        for (std::size_t c = 0; c < fixed_list_.size(); ++c) {
            auto v = static_cast<std::size_t>(fixed_list_[c]);
            cplx val{0.0, 0.0};
            if (mesh_->tags[v] == VertexTag::Gamma) {
                double th = std::atan2(mesh_->vertices[v][1], mesh_->vertices[v][0]);
                for (int k = -g.max_mode(); k <= g.max_mode(); ++k)
                    val += g.coeff(k) * std::polar(1.0, k * th);
            }
            bre[static_cast<Eigen::Index>(c)] = val.real();
            bim[static_cast<Eigen::Index>(c)] = val.imag();
        }
        Solution sol;
        sol.values.assign(mesh_->vertices.size(), cplx{0.0, 0.0});
        Eigen::VectorXd ure, uim;
        double resid = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd& b = pass == 0 ? bre : bim;
            Eigen::VectorXd rhs = -(fc_ * b);
            Eigen::VectorXd u = ldlt_.solve(rhs);
            double scale = rhs.norm();
            if (scale > 0.0) resid = std::max(resid, (ff_ * u - rhs).norm() / scale);
            (pass == 0 ? ure : uim) = std::move(u);
        }
        if (resid > 1e-10)
            throw std::runtime_error("solve: direct solver residual above 1e-10");
        sol.residual = resid;
        for (std::size_t c = 0; c < fixed_list_.size(); ++c)
            sol.values[static_cast<std::size_t>(fixed_list_[c])] = cplx{
                bre[static_cast<Eigen::Index>(c)], bim[static_cast<Eigen::Index>(c)]};
        for (std::size_t f = 0; f < free_list_.size(); ++f)
            sol.values[static_cast<std::size_t>(free_list_[f])] =
                cplx{ure[static_cast<Eigen::Index>(f)], uim[static_cast<Eigen::Index>(f)]};
        Eigen::VectorXd re(sol.values.size()), im(sol.values.size());
        for (std::size_t i = 0; i < sol.values.size(); ++i) {
            re[static_cast<Eigen::Index>(i)] = sol.values[i].real();
            im[static_cast<Eigen::Index>(i)] = sol.values[i].imag();
        }
        sol.energy = re.dot(full_ * re) + im.dot(full_ * im);
        return sol;
    }

private:
    const Mesh* mesh_;
    double sigma_;
    Eigen::SparseMatrix<double> full_, ff_, fc_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    std::vector<int> free_of_vertex_, free_list_, fixed_list_;
};

inline MinExtensionSolver::Solution solve_min_extension(const Mesh& mesh,
                                                        const FourierTrace& g,
                                                        double sigma,
                                                        ExtensionVariant variant) {
    return MinExtensionSolver(mesh, sigma, variant).solve(g);
}

} // namespace helmtrace
