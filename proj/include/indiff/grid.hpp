#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace indiff {

enum class SMeshKind { Uniform, LogUniform };

/// Discretization counts and the truncated box containing the solvency region.
struct GridSpec {
    int n_alpha = 6;
    int n_beta = 6;
    int n_s = 100;
    int n_time = 10;
    double alpha_min = 0.2;
    double alpha_max = 0.6;
    double beta_min = -100.0;
    double beta_max = 100.0;
    double s_max = 100.0;
    SMeshKind s_mesh = SMeshKind::Uniform;

    double h_alpha() const { return (alpha_max - alpha_min) / n_alpha; }
    double h_beta() const { return (beta_max - beta_min) / n_beta; }
    double h_s() const { return s_max / n_s; }
    double dt(double maturity) const { return maturity / n_time; }

    void validate(const ModelParams& params) const {
        if (n_alpha < 2 || n_beta < 2 || n_s < 2)
            throw ConfigError("spatial step counts must be at least 2");
        if (n_time < 1)
            throw ConfigError("N must be at least 1");
        if (!(alpha_min < alpha_max))
            throw ConfigError("degenerate alpha span [" + std::to_string(alpha_min) + ", " +
                              std::to_string(alpha_max) + "]");
        if (!(beta_min < beta_max))
            throw ConfigError("degenerate beta span [" + std::to_string(beta_min) + ", " +
                              std::to_string(beta_max) + "]");
        if (!(s_max > 0.0))
            throw ConfigError("S_max must be positive, got " + std::to_string(s_max));
        if (s_mesh == SMeshKind::LogUniform && !(params.strike / 2.0 < s_max))
            throw ConfigError("log-uniform S mesh needs S_max > K/2");
    }
};

enum class NodeKind : std::uint8_t { Insolvent, Boundary, Interior };

/// Tensor-product mesh over the truncated box, with a per-node classification
/// against the solvency region { w(alpha, beta, S) > 0 }.
///
/// A node is Insolvent when its liquid wealth is nonpositive. A solvent node
/// is Boundary when it lies on a face of the box or has an insolvent face
/// neighbor; the remaining solvent nodes are Interior and form the unknown
/// set of the solver. Interior nodes therefore reference only solvent nodes
/// through the 7-point stencil, and S = 0 nodes are always Boundary.
///
/// Flat indexing runs k fastest, so each (i,j) block is a contiguous slice.
class Mesh3D {
public:
    static Mesh3D build(const GridSpec& spec, const ModelParams& params) {
        spec.validate(params);
        Mesh3D m;
        m.spec_ = spec;
        m.theta_ = params.theta;

        m.alphas_.resize(spec.n_alpha + 1);
        for (int i = 0; i <= spec.n_alpha; ++i)
            m.alphas_[i] = spec.alpha_min + i * spec.h_alpha();
        m.betas_.resize(spec.n_beta + 1);
        for (int j = 0; j <= spec.n_beta; ++j)
            m.betas_[j] = spec.beta_min + j * spec.h_beta();

        m.prices_.resize(spec.n_s + 1);
        if (spec.s_mesh == SMeshKind::Uniform) {
            for (int k = 0; k <= spec.n_s; ++k)
                m.prices_[k] = k * spec.h_s();
        } else {
            // Geometric spacing from K/2 to S_max, with an extra node at S = 0,
            // concentrating resolution around the strike.
            const double s_lo = params.strike / 2.0;
            m.prices_[0] = 0.0;
            const double ratio = spec.s_max / s_lo;
            for (int k = 1; k <= spec.n_s; ++k)
                m.prices_[k] = s_lo * std::pow(ratio, double(k - 1) / double(spec.n_s - 1));
        }

        m.kinds_.assign(m.node_count(), NodeKind::Insolvent);
        auto solvent = [&](int i, int j, int k) {
            return wealth(m.alphas_[i], m.betas_[j], m.prices_[k], m.theta_) > 0.0;
        };
        for (int i = 0; i <= spec.n_alpha; ++i)
            for (int j = 0; j <= spec.n_beta; ++j)
                for (int k = 0; k <= spec.n_s; ++k) {
                    if (!solvent(i, j, k))
                        continue;
                    NodeKind kind = NodeKind::Interior;
                    if (i == 0 || i == spec.n_alpha || j == 0 || j == spec.n_beta || k == 0 ||
                        k == spec.n_s)
                        kind = NodeKind::Boundary;
                    else if (!solvent(i - 1, j, k) || !solvent(i + 1, j, k) ||
                             !solvent(i, j - 1, k) || !solvent(i, j + 1, k) ||
                             !solvent(i, j, k - 1) || !solvent(i, j, k + 1))
                        kind = NodeKind::Boundary;
                    m.kinds_[m.stack_index(i, j, k)] = kind;
                }
        return m;
    }

    const GridSpec& spec() const { return spec_; }
    double theta() const { return theta_; }

    std::size_t node_count() const {
        return std::size_t(spec_.n_alpha + 1) * std::size_t(spec_.n_beta + 1) *
               std::size_t(spec_.n_s + 1);
    }

    std::size_t stack_index(int i, int j, int k) const {
        if (i < 0 || i > spec_.n_alpha || j < 0 || j > spec_.n_beta || k < 0 || k > spec_.n_s)
            throw IndexError("node (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                             std::to_string(k) + ") out of range");
        return (std::size_t(i) * (spec_.n_beta + 1) + std::size_t(j)) * (spec_.n_s + 1) +
               std::size_t(k);
    }

    std::array<int, 3> unstack(std::size_t flat) const {
        if (flat >= node_count())
            throw IndexError("flat index " + std::to_string(flat) + " out of range");
        const int ns1 = spec_.n_s + 1;
        const int nb1 = spec_.n_beta + 1;
        const int k = int(flat % ns1);
        const int j = int((flat / ns1) % nb1);
        const int i = int(flat / (std::size_t(ns1) * nb1));
        return {i, j, k};
    }

    double alpha(int i) const { return alphas_[i]; }
    double beta(int j) const { return betas_[j]; }
    double price(int k) const { return prices_[k]; }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& betas() const { return betas_; }
    const std::vector<double>& prices() const { return prices_; }

    NodeKind kind(std::size_t flat) const { return kinds_[flat]; }
    NodeKind kind(int i, int j, int k) const { return kinds_[stack_index(i, j, k)]; }
    bool solvent(int i, int j, int k) const { return kind(i, j, k) != NodeKind::Insolvent; }
    bool interior(int i, int j, int k) const { return kind(i, j, k) == NodeKind::Interior; }

    double node_wealth(int i, int j, int k) const {
        return wealth(alphas_[i], betas_[j], prices_[k], theta_);
    }

    std::size_t count_interior() const {
        std::size_t n = 0;
        for (NodeKind k : kinds_)
            if (k == NodeKind::Interior) ++n;
        return n;
    }

private:
    GridSpec spec_;
    double theta_ = 0.0;
    std::vector<double> alphas_, betas_, prices_;
    std::vector<NodeKind> kinds_;
};

} // namespace indiff
