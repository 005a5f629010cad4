#pragma once

// Bianchi lattice: level-1 transforms of a seed for each phi, and every
// consecutive run of phis combined by the superposition formula.

#include "blc/backlund.hpp"
#include "blc/seeds.hpp"
#include "blc/superpose.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blc {

struct LatticeNode {
    std::size_t first = 0;  ///< indices into the phi list, inclusive
    std::size_t last = 0;
    int level = 0;
    std::vector<int> parents;   ///< node ids of alpha' and alpha''
    std::optional<int> base;    ///< node id of alpha, empty for the seed
    CaseId effective_case = CaseId::Case1;
    Equation equation;
    ScalarField field;

    [[nodiscard]] std::string label() const {
        if (level == 0) return "seed";
        std::string s = "alpha_";
        for (std::size_t k = first; k <= last; ++k) s += std::to_string(k + 1);
        return s;
    }
};

struct Lattice {
    CaseConfig cfg;
    std::vector<double> phis;
    std::vector<LatticeNode> nodes;  ///< node 0 is the seed

    [[nodiscard]] const LatticeNode* find(std::size_t first, std::size_t last) const {
        for (const auto& n : nodes) {
            if (n.level > 0 && n.first == first && n.last == last) return &n;
        }
        return nullptr;
    }
    [[nodiscard]] const LatticeNode& at(std::size_t first, std::size_t last) const {
        if (const auto* n = find(first, last)) return *n;
        throw Error(ErrorKind::InvalidConfig, "lattice has no node for that phi range");
    }
};

/// Level-1 field for phi index k, produced with the transformation of `cfg`.
using Level1Provider = std::function<ScalarField(std::size_t k, double phi, const CaseConfig& cfg)>;

/// Closed-form kinks of a zero seed, one integration constant per phi.
inline Level1Provider kink_level1(const Grid& grid, std::vector<double> consts = {}) {
    return [grid, consts](std::size_t k, double phi, const CaseConfig& cfg) {
        const double c = k < consts.size() ? consts[k] : 0.0;
        return sample(kink_seed(cfg, phi, c), grid);
    };
}

/// Level-1 fields integrated from an analytic seed, alpha'(p0) given per phi.
inline Level1Provider integrated_level1(AnalyticSolution seed, const Grid& grid, GridPoint p0,
                                        std::vector<double> initial, IntegrateOptions opt = {}) {
    return [=](std::size_t k, double phi, const CaseConfig& cfg) {
        const double a0 = k < initial.size() ? initial[k] : 0.0;
        return integrate_bt(make_bt_system(cfg, phi), seed, grid, p0, a0, opt);
    };
}

/// Level-1 fields given as closed forms.
inline Level1Provider analytic_level1(std::vector<AnalyticSolution> forms, const Grid& grid) {
    return [forms = std::move(forms), grid](std::size_t k, double, const CaseConfig&) {
        if (k >= forms.size()) throw Error(ErrorKind::InvalidConfig, "no closed form for this phi index");
        return sample(forms[k], grid);
    };
}

/// Builds all nodes up to `depth`. The node for phis i..j combines the nodes
/// for i..j-1 (phi_i side) and i+1..j (phi_j side) over the base i+1..j-1.
/// For the elliptic cases the node type alternates with the level.
inline Lattice bianchi_lattice(const CaseConfig& cfg, const ScalarField& seed, const std::vector<double>& phis,
                               int depth, const Level1Provider& level1, const SuperposeOptions& opt = {}) {
    for (std::size_t a = 0; a < phis.size(); ++a) {
        for (std::size_t b = a + 1; b < phis.size(); ++b) {
            if (phis[a] == phis[b]) throw Error(ErrorKind::DuplicatePhi, "phi values must be distinct");
        }
    }
    if (depth < 1 || static_cast<std::size_t>(depth) > phis.size()) {
        throw Error(ErrorKind::InvalidConfig, "depth must be between 1 and the number of phis");
    }
    auto type_at = [&](int level) { return level % 2 == 0 ? cfg : partner_case(cfg); };
    for (double phi : phis) (void)congruence_params(cfg, phi);

    Lattice lat{cfg, phis, {}};
    LatticeNode root;
    root.effective_case = cfg.id;
    root.equation = equation_for(cfg, 0);
    root.field = seed;
    lat.nodes.push_back(std::move(root));

    std::map<std::pair<std::size_t, std::size_t>, int> id;
    for (std::size_t k = 0; k < phis.size(); ++k) {
        LatticeNode n;
        n.first = n.last = k;
        n.level = 1;
        n.base = 0;
        n.effective_case = type_at(1).id;
        n.equation = equation_for(cfg, 1);
        n.field = level1(k, phis[k], cfg);
        require_same_grid(seed.grid, n.field.grid, "bianchi_lattice");
        id[{k, k}] = static_cast<int>(lat.nodes.size());
        lat.nodes.push_back(std::move(n));
    }
    for (int level = 2; level <= depth; ++level) {
        const CaseConfig t = type_at(level);
        for (std::size_t i = 0; i + static_cast<std::size_t>(level) <= phis.size(); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(level) - 1;
            const int p1 = id.at({i, j - 1}), p2 = id.at({i + 1, j});
            const int b = level == 2 ? 0 : id.at({i + 1, j - 1});
            SuperposeInput in{t, lat.nodes[b].field, lat.nodes[p1].field, lat.nodes[p2].field, phis[i], phis[j]};
            LatticeNode n;
            n.first = i;
            n.last = j;
            n.level = level;
            n.parents = {p1, p2};
            n.base = b;
            n.effective_case = t.id;
            n.equation = equation_for(t, 0);
            n.field = superpose(in, opt);
            id[{i, j}] = static_cast<int>(lat.nodes.size());
            lat.nodes.push_back(std::move(n));
        }
    }
    return lat;
}

}  // namespace blc
