#include "curvlab/models.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>

namespace curvlab {

namespace {

double spin(std::uint32_t mask, int i) { return (mask >> i) & 1u ? 1.0 : -1.0; }

std::string spin_label(std::uint32_t mask, int n) {
    std::string s(static_cast<std::size_t>(n), '-');
    for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) s[static_cast<std::size_t>(i)] = '+';
    return s;
}

std::string occupancy_label(const Config& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(x[i]);
    }
    return s;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return b;
}

} // namespace

// ---------------------------------------------------------------------------
// Ising
// ---------------------------------------------------------------------------

void IsingSpec::validate() const {
    if (n < 1 || n > 20) throw BadParams("ising: site count must be in [1, 20]");
    if (k.rows() != n || k.cols() != n) throw BadParams("ising: coupling matrix must be n x n");
    if (beta < 0.0 || !std::isfinite(beta)) throw BadParams("ising: beta must be >= 0");
    for (int i = 0; i < n; ++i) {
        if (k(i, i) != 0.0) throw BadParams("ising: coupling diagonal must be zero");
        for (int j = 0; j < n; ++j)
            if (!rel_close(k(i, j), k(j, i), 1e-12, 1e-300))
                throw BadParams("ising: coupling matrix must be symmetric");
    }
}

double ising_hamiltonian(const IsingSpec& spec, std::uint32_t mask) {
    KahanSum h;
    for (int l = 0; l < spec.n; ++l) {
        const double xl = spin(mask, l);
        for (int m = 0; m < spec.n; ++m)
            if (spec.k(l, m) != 0.0) h.add(-spec.k(l, m) * xl * spin(mask, m));
    }
    return h.value();
}

double ising_grad_h(const IsingSpec& spec, std::uint32_t mask, int site) {
    // H(delta_i x) - H(x) = 2 x_i sum_{m != i} (k_im + k_mi) x_m
    double acc = 0.0;
    for (int m = 0; m < spec.n; ++m) {
        if (m == site) continue;
        acc += (spec.k(site, m) + spec.k(m, site)) * spin(mask, m);
    }
    return 2.0 * spin(mask, site) * acc;
}

IsingModel build_ising(const IsingSpec& spec, std::size_t cap) {
    spec.validate();
    const std::size_t n_states = static_cast<std::size_t>(1) << spec.n;
    if (cap == 0) cap = state_cap();
    if (n_states > cap)
        throw TooLarge("ising: 2^" + std::to_string(spec.n) + " states exceed cap " +
                       std::to_string(cap));

    IsingModel model;
    model.spec = spec;
    model.space.labels.reserve(n_states);
    for (std::uint32_t x = 0; x < n_states; ++x)
        model.space.labels.push_back(spin_label(x, spec.n));

    model.rep.moves.resize(static_cast<std::size_t>(spec.n));
    model.rep.rates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states), spec.n);
    for (int i = 0; i < spec.n; ++i) {
        Move& mv = model.rep.moves[static_cast<std::size_t>(i)];
        mv.inverse = i;
        mv.to.resize(n_states);
        for (std::uint32_t x = 0; x < n_states; ++x) {
            mv.to[x] = static_cast<std::int32_t>(x ^ (1u << i));
            model.rep.rates(static_cast<Eigen::Index>(x), i) =
                std::exp(-0.5 * spec.beta * ising_grad_h(spec, x, i));
        }
    }

    // Gibbs weights shifted by min H so the normalizer stays in range.
    Eigen::VectorXd energy(static_cast<Eigen::Index>(n_states));
    for (std::uint32_t x = 0; x < n_states; ++x)
        energy(static_cast<Eigen::Index>(x)) = ising_hamiltonian(spec, x);
    const double hmin = energy.minCoeff();
    Eigen::VectorXd weights(static_cast<Eigen::Index>(n_states));
    for (Eigen::Index x = 0; x < weights.size(); ++x)
        weights(x) = std::exp(-spec.beta * (energy(x) - hmin));

    model.chain = chain_from_mapping(model.space, model.rep, weights);
    return model;
}

IsingModel build_hypercube(int n, double rate, std::size_t cap) {
    if (n < 1 || n > 20) throw BadParams("hypercube: dimension must be in [1, 20]");
    if (!(rate > 0.0)) throw BadParams("hypercube: rate must be positive");
    IsingSpec spec;
    spec.n = n;
    spec.k = Eigen::MatrixXd::Zero(n, n);
    spec.beta = 0.0;
    IsingModel model = build_ising(spec, cap);
    model.rep.rates.setConstant(rate);
    model.chain = chain_from_mapping(model.space, model.rep,
                                     Eigen::VectorXd::Ones(model.rep.n_states()));
    return model;
}

double ising_epsilon(const IsingSpec& spec) {
    spec.validate();
    double worst = 0.0;
    for (int i = 0; i < spec.n; ++i) {
        KahanSum row;
        for (int j = 0; j < spec.n; ++j) {
            if (j == i) continue;
            double exponent = 0.0;
            for (int m = 0; m < spec.n; ++m) {
                if (m == i || m == j) continue;
                exponent += std::abs(spec.k(i, m)) + std::abs(spec.k(j, m));
            }
            row.add(std::exp(2.0 * spec.beta * exponent) *
                    (std::exp(4.0 * spec.beta * std::abs(spec.k(i, j))) - 1.0));
        }
        worst = std::max(worst, row.value());
    }
    return worst;
}

double lattice_display_epsilon(int d, double beta) {
    return (2.0 * d - 1.0) * std::exp(2.0 * beta * (2.0 * d - 1.0)) *
           (std::exp(2.0 * beta) - 1.0);
}

double cw_simplified_epsilon(double beta) { return 2.0 * beta * std::exp(2.0 * beta); }

double cw_epsilon_closed(int n, double beta) {
    return (n - 1.0) * std::exp(2.0 * beta * (n - 2.0) / n) *
           (std::exp(2.0 * beta / n) - 1.0);
}

double cw_published_cstar(int n, double beta) {
    return std::exp(-beta * (n - 1.0) / (2.0 * n));
}

double lattice_published_cstar(int d, double beta) { return std::exp(-beta * d); }

double epsilon_threshold(const std::function<double(double)>& eps, double beta_cap) {
    double lo = 0.0;
    double hi = 0.125;
    while (eps(hi) < 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > beta_cap)
            throw NoRoot("epsilon stays below 1 up to beta = " + std::to_string(beta_cap));
    }
    // The criteria are perturbative in beta; the root finder assumes (and
    // checks) monotonicity on the bracket.
    const int grid = 64;
    double prev = eps(lo);
    for (int i = 1; i <= grid; ++i) {
        const double b = lo + (hi - lo) * i / grid;
        const double v = eps(b);
        if (v < prev - 1e-12 * std::max(1.0, std::abs(prev)))
            throw DomainError("epsilon(beta) is not increasing on the bracket");
        prev = v;
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        (eps(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::vector<int>> lattice_box(const std::vector<int>& extents) {
    if (extents.empty()) throw BadParams("lattice box needs at least one extent");
    std::vector<std::vector<int>> sites{{}};
    for (int extent : extents) {
        if (extent < 1) throw BadParams("lattice box extents must be positive");
        std::vector<std::vector<int>> next;
        for (const auto& site : sites) {
            for (int c = 0; c < extent; ++c) {
                auto s = site;
                s.push_back(c);
                next.push_back(std::move(s));
            }
        }
        sites = std::move(next);
    }
    return sites;
}

LatticeIsing build_lattice_ising(const std::vector<std::vector<int>>& sites, double beta) {
    if (sites.empty()) throw BadParams("lattice: no sites");
    const std::size_t dim = sites.front().size();
    std::set<std::vector<int>> unique(sites.begin(), sites.end());
    if (unique.size() != sites.size()) throw BadParams("lattice: duplicate sites");
    for (const auto& s : sites)
        if (s.size() != dim) throw BadParams("lattice: mixed dimensions");

    const int n = static_cast<int>(sites.size());
    LatticeIsing lattice;
    lattice.sites = sites;
    lattice.dim = static_cast<int>(dim);
    lattice.spec.n = n;
    lattice.spec.beta = beta;
    lattice.spec.k = Eigen::MatrixXd::Zero(n, n);

    auto adjacent = [](const std::vector<int>& a, const std::vector<int>& b) {
        int dist = 0;
        for (std::size_t c = 0; c < a.size(); ++c) dist += std::abs(a[c] - b[c]);
        return dist == 1;
    };
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (adjacent(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)])) {
                lattice.spec.k(i, j) = 0.5;
                lattice.spec.k(j, i) = 0.5;
                ++degree[static_cast<std::size_t>(i)];
                ++degree[static_cast<std::size_t>(j)];
            }
    lattice.max_degree = *std::max_element(degree.begin(), degree.end());

    // connectivity of the site graph
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (int j = 0; j < n; ++j)
            if (lattice.spec.k(i, j) != 0.0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                ++reached;
                queue.push_back(j);
            }
    }
    if (reached != n) throw BadParams("lattice: site set is not connected");
    return lattice;
}

IsingSpec build_curie_weiss(int n, double beta) {
    if (n < 2) throw BadParams("curie-weiss: need n >= 2");
    IsingSpec spec;
    spec.n = n;
    spec.beta = beta;
    spec.k = Eigen::MatrixXd::Constant(n, n, 1.0 / (2.0 * n));
    spec.k.diagonal().setZero();
    return spec;
}

// ---------------------------------------------------------------------------
// Hard-core
// ---------------------------------------------------------------------------

namespace {

double poisson_weight(const std::vector<double>& nu, const Config& x) {
    double w = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (int c = 1; c <= x[i]; ++c) w *= nu[i] / static_cast<double>(c);
    }
    return w;
}

} // namespace

HardCoreModel build_hardcore(const HardCoreSpec& spec, std::size_t cap) {
    if (spec.n_sites < 1) throw BadParams("hardcore: need at least one site");
    if (static_cast<int>(spec.nu.size()) != spec.n_sites)
        throw BadParams("hardcore: one intensity per site expected");
    for (double v : spec.nu)
        if (!(v > 0.0)) throw BadParams("hardcore: intensities must be positive");
    if (!spec.allowed) throw BadParams("hardcore: missing membership predicate");

    const Config zero(static_cast<std::size_t>(spec.n_sites), 0);
    if (!spec.allowed(zero)) throw BadParams("hardcore: zero configuration must be allowed");

    if (cap == 0) cap = state_cap();
    HardCoreModel model;
    model.spec = spec;

    // A is decreasing, so every allowed configuration is reachable from zero
    // by single creations; breadth-first enumeration orders by particle count.
    std::map<Config, int> index;
    std::deque<Config> queue{zero};
    index[zero] = 0;
    model.configs.push_back(zero);
    while (!queue.empty()) {
        Config x = queue.front();
        queue.pop_front();
        for (int i = 0; i < spec.n_sites; ++i) {
            Config y = x;
            ++y[static_cast<std::size_t>(i)];
            if (!spec.allowed(y) || index.count(y)) continue;
            if (model.configs.size() + 1 > cap)
                throw TooLarge("hardcore: allowed set exceeds state cap " + std::to_string(cap));
            index[y] = static_cast<int>(model.configs.size());
            model.configs.push_back(y);
            queue.push_back(std::move(y));
        }
    }
    if (model.configs.size() < 2)
        throw BadParams("hardcore: allowed set is trivial (no creation possible)");

    for (const auto& x : model.configs) {
        for (int i = 0; i < spec.n_sites; ++i) {
            if (x[static_cast<std::size_t>(i)] == 0) continue;
            Config y = x;
            --y[static_cast<std::size_t>(i)];
            if (!spec.allowed(y))
                throw NotDecreasing("hardcore: removing a particle left the allowed set");
        }
    }

    const int n_states = static_cast<int>(model.configs.size());
    model.space.labels.reserve(static_cast<std::size_t>(n_states));
    for (const auto& x : model.configs) model.space.labels.push_back(occupancy_label(x));

    const int n_moves = 2 * spec.n_sites;
    model.rep.moves.resize(static_cast<std::size_t>(n_moves));
    model.rep.rates = Eigen::MatrixXd::Zero(n_states, n_moves);
    for (int i = 0; i < spec.n_sites; ++i) {
        const int create = 2 * i;
        const int annihilate = 2 * i + 1;
        model.creation_moves.push_back(create);
        model.annihilation_moves.push_back(annihilate);
        Move& up = model.rep.moves[static_cast<std::size_t>(create)];
        Move& down = model.rep.moves[static_cast<std::size_t>(annihilate)];
        up.inverse = annihilate;
        down.inverse = create;
        up.to.resize(static_cast<std::size_t>(n_states));
        down.to.resize(static_cast<std::size_t>(n_states));
        for (int s = 0; s < n_states; ++s) {
            const Config& x = model.configs[static_cast<std::size_t>(s)];
            Config plus = x;
            ++plus[static_cast<std::size_t>(i)];
            const auto it = index.find(plus);
            up.to[static_cast<std::size_t>(s)] = it == index.end() ? kOutside : it->second;
            if (it != index.end()) model.rep.rates(s, create) = spec.nu[static_cast<std::size_t>(i)];
            if (x[static_cast<std::size_t>(i)] > 0) {
                Config minus = x;
                --minus[static_cast<std::size_t>(i)];
                down.to[static_cast<std::size_t>(s)] = index.at(minus);
                model.rep.rates(s, annihilate) = static_cast<double>(x[static_cast<std::size_t>(i)]);
            } else {
                down.to[static_cast<std::size_t>(s)] = s; // fixed point, rate zero
            }
        }
    }

    Eigen::VectorXd weights(n_states);
    for (int s = 0; s < n_states; ++s)
        weights(s) = poisson_weight(spec.nu, model.configs[static_cast<std::size_t>(s)]);
    model.chain = chain_from_mapping(model.space, model.rep, weights);

    // Blocking parameters of the split criterion.
    double eps0 = 0.0;
    double eps1 = std::numeric_limits<double>::infinity();
    for (const auto& x : model.configs) {
        for (int i = 0; i < spec.n_sites; ++i) {
            if (x[static_cast<std::size_t>(i)] == 0) continue;
            eps0 = std::max(eps0, hardcore_blocking_sum(spec, x, i));
            Config plus = x;
            ++plus[static_cast<std::size_t>(i)];
            eps1 = std::min(eps1, spec.allowed(plus) ? 0.0 : spec.nu[static_cast<std::size_t>(i)]);
        }
    }
    model.eps0 = eps0;
    model.eps1 = eps1;
    return model;
}

double hardcore_blocking_sum(const HardCoreSpec& spec, const Config& x, int i) {
    if (x[static_cast<std::size_t>(i)] <= 0)
        throw BadParams("blocking sum is defined at occupied sites only");
    double sum = 0.0;
    for (int j = 0; j < spec.n_sites; ++j) {
        if (j == i) continue;
        Config swapped = x;
        ++swapped[static_cast<std::size_t>(j)];
        Config added = swapped; // x + 1_j
        --swapped[static_cast<std::size_t>(i)];
        if (spec.allowed(swapped) && !spec.allowed(added))
            sum += spec.nu[static_cast<std::size_t>(j)];
    }
    return sum;
}

CurvatureCertificate hardcore_split_certificate(const HardCoreModel& model) {
    CurvatureCertificate cert = split_lambda_criterion(model.rep, model.chain.pi,
                                                       model.creation_moves,
                                                       model.annihilation_moves);
    cert.intermediates["eps0"] = model.eps0;
    cert.intermediates["eps1"] = model.eps1;
    return cert;
}

HardCoreSpec build_graph_hardcore(int n_vertices,
                                  const std::vector<std::pair<int, int>>& edges, double rho) {
    if (n_vertices < 1) throw BadParams("graph hardcore: need vertices");
    if (!(rho > 0.0)) throw BadParams("graph hardcore: rho must be positive");
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(n_vertices),
                                       std::vector<char>(static_cast<std::size_t>(n_vertices), 0));
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices || a == b)
            throw BadParams("graph hardcore: bad edge");
        adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
        adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
    }
    HardCoreSpec spec;
    spec.n_sites = n_vertices;
    spec.nu.assign(static_cast<std::size_t>(n_vertices), rho);
    spec.allowed = [adj, n_vertices](const Config& x) {
        for (int i = 0; i < n_vertices; ++i) {
            const int xi = x[static_cast<std::size_t>(i)];
            if (xi < 0 || xi > 1) return false;
            if (xi == 0) continue;
            for (int j = i + 1; j < n_vertices; ++j)
                if (x[static_cast<std::size_t>(j)] == 1 &&
                    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                    return false;
        }
        return true;
    };
    return spec;
}

std::pair<HardCoreSpec, RodsInfo> build_rods(int L, int k, double rho) {
    if (k < 1 || L < k) throw BadParams("rods: need L >= k >= 1");
    if (!(rho > 0.0)) throw BadParams("rods: rho must be positive");

    RodsInfo info;
    info.L = L;
    info.k = k;
    // horizontal rods first, then vertical; a rod covers k+1 cells
    for (int u2 = 0; u2 <= L; ++u2)
        for (int u1 = 0; u1 + k <= L; ++u1) {
            std::vector<std::pair<int, int>> cells;
            for (int t = 0; t <= k; ++t) cells.emplace_back(u1 + t, u2);
            info.rods.push_back(std::move(cells));
        }
    for (int u1 = 0; u1 <= L; ++u1)
        for (int u2 = 0; u2 + k <= L; ++u2) {
            std::vector<std::pair<int, int>> cells;
            for (int t = 0; t <= k; ++t) cells.emplace_back(u1, u2 + t);
            info.rods.push_back(std::move(cells));
        }

    const int n = static_cast<int>(info.rods.size());
    info.conflict.assign(static_cast<std::size_t>(n),
                         std::vector<char>(static_cast<std::size_t>(n), 0));
    auto intersects = [](const std::vector<std::pair<int, int>>& a,
                         const std::vector<std::pair<int, int>>& b) {
        for (const auto& ca : a)
            for (const auto& cb : b)
                if (ca == cb) return true;
        return false;
    };
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (intersects(info.rods[static_cast<std::size_t>(i)],
                           info.rods[static_cast<std::size_t>(j)])) {
                info.conflict[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
                info.conflict[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
                ++degree[static_cast<std::size_t>(i)];
                ++degree[static_cast<std::size_t>(j)];
            }
    info.max_conflict_degree = *std::max_element(degree.begin(), degree.end());
    const int full = k * k + 4 * k + 1;
    for (int i = 0; i < n; ++i)
        if (degree[static_cast<std::size_t>(i)] == full) {
            info.interior_rod = i;
            break;
        }

    HardCoreSpec spec;
    spec.n_sites = n;
    spec.nu.assign(static_cast<std::size_t>(n), rho);
    for (int i = 0; i < n; ++i) {
        const auto& head = info.rods[static_cast<std::size_t>(i)].front();
        const bool horizontal = i < (L - k + 1) * (L + 1);
        spec.site_labels.push_back((horizontal ? "h" : "v") + std::string("(") +
                                   std::to_string(head.first) + "," +
                                   std::to_string(head.second) + ")");
    }
    auto conflict = info.conflict;
    spec.allowed = [conflict, n](const Config& x) {
        for (int i = 0; i < n; ++i) {
            const int xi = x[static_cast<std::size_t>(i)];
            if (xi < 0 || xi > 1) return false;
            if (xi == 0) continue;
            for (int j = i + 1; j < n; ++j)
                if (x[static_cast<std::size_t>(j)] == 1 &&
                    conflict[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                    return false;
        }
        return true;
    };
    return {spec, info};
}

// ---------------------------------------------------------------------------
// Symmetric group walks
// ---------------------------------------------------------------------------

namespace {

using Perm = std::vector<std::uint8_t>;

Perm compose(const Perm& p, const Perm& q) {
    Perm out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[q[i]];
    return out;
}

std::string perm_label(const Perm& p) {
    std::string s;
    for (std::uint8_t v : p) s += static_cast<char>('0' + v);
    return s;
}

} // namespace

CayleyModel build_symmetric_group_walk(int n, int k, std::size_t cap) {
    if (n < 2 || n > 7) throw BadParams("symmetric group walk: need 2 <= n <= 7");
    if (k <= 1 || k >= n) throw BadParams("symmetric group walk: need 1 < k < n");

    Perm identity(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) identity[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);

    // All k-cycles: pick the support, anchor its smallest element, and run
    // through the (k-1)! cyclic orders of the rest.
    std::vector<int> support(static_cast<std::size_t>(k));
    std::vector<Perm> cycles;
    std::function<void(int, int)> pick = [&](int start, int depth) {
        if (depth == k) {
            std::vector<int> rest(support.begin() + 1, support.end());
            std::sort(rest.begin(), rest.end());
            do {
                Perm cyc = identity;
                int prev = support[0];
                for (int r : rest) {
                    cyc[static_cast<std::size_t>(prev)] = static_cast<std::uint8_t>(r);
                    prev = r;
                }
                cyc[static_cast<std::size_t>(prev)] = static_cast<std::uint8_t>(support[0]);
                cycles.push_back(cyc);
            } while (std::next_permutation(rest.begin(), rest.end()));
            return;
        }
        for (int v = start; v < n; ++v) {
            support[static_cast<std::size_t>(depth)] = v;
            pick(v + 1, depth + 1);
        }
    };
    pick(0, 0);
    std::sort(cycles.begin(), cycles.end());

    // The walk lives on the subgroup generated by the cycles. Odd-length
    // cycles are even permutations, so for odd k this is the alternating
    // group rather than all of S_n.
    std::set<Perm> closure{identity};
    std::deque<Perm> frontier{identity};
    while (!frontier.empty()) {
        const Perm g = frontier.front();
        frontier.pop_front();
        for (const Perm& cyc : cycles) {
            Perm next = compose(cyc, g);
            if (closure.insert(next).second) frontier.push_back(std::move(next));
        }
    }
    std::vector<Perm> elements(closure.begin(), closure.end()); // sorted, identity first
    std::map<Perm, int> elem_index;
    for (int g = 0; g < static_cast<int>(elements.size()); ++g)
        elem_index[elements[static_cast<std::size_t>(g)]] = g;
    const int order = static_cast<int>(elements.size());
    if (cap == 0) cap = state_cap();
    if (static_cast<std::size_t>(order) > cap)
        throw TooLarge("symmetric group walk: group order exceeds state cap");

    CayleyModel model;
    model.group.identity = elem_index.at(identity);
    model.group.mult.assign(static_cast<std::size_t>(order),
                            std::vector<int>(static_cast<std::size_t>(order), 0));
    model.group.inverse.assign(static_cast<std::size_t>(order), 0);
    for (int g = 0; g < order; ++g) {
        for (int h = 0; h < order; ++h)
            model.group.mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] =
                elem_index.at(compose(elements[static_cast<std::size_t>(g)],
                                      elements[static_cast<std::size_t>(h)]));
        Perm inv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            inv[elements[static_cast<std::size_t>(g)][static_cast<std::size_t>(i)]] =
                static_cast<std::uint8_t>(i);
        model.group.inverse[static_cast<std::size_t>(g)] = elem_index.at(inv);
    }
    model.generates_full_group = [&] {
        double factorial = 1.0;
        for (int i = 2; i <= n; ++i) factorial *= i;
        return order == static_cast<int>(factorial);
    }();

    const int m = static_cast<int>(cycles.size());
    model.rate = 1.0 / static_cast<double>(m);
    model.claimed_rate = 1.0 / binomial(n, k);
    model.generator_count_matches_claim = m == static_cast<int>(std::lround(binomial(n, k)));

    std::map<int, int> gen_move; // group element -> move id
    for (int d = 0; d < m; ++d) {
        const int g = elem_index.at(cycles[static_cast<std::size_t>(d)]);
        model.generator_elements.push_back(g);
        gen_move[g] = d;
    }

    model.space.labels.reserve(static_cast<std::size_t>(order));
    for (const auto& e : elements) model.space.labels.push_back(perm_label(e));

    model.rep.moves.resize(static_cast<std::size_t>(m));
    model.rep.rates = Eigen::MatrixXd::Constant(order, m, model.rate);
    for (int d = 0; d < m; ++d) {
        Move& mv = model.rep.moves[static_cast<std::size_t>(d)];
        const int g = model.generator_elements[static_cast<std::size_t>(d)];
        mv.inverse = gen_move.at(model.group.inverse[static_cast<std::size_t>(g)]);
        mv.to.resize(static_cast<std::size_t>(order));
        for (int x = 0; x < order; ++x)
            mv.to[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(
                model.group.mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(x)]);
    }

    model.chain = chain_from_mapping(model.space, model.rep, Eigen::VectorXd::Ones(order));
    return model;
}

CurvatureCertificate cayley_certificate(const CayleyModel& model) {
    CurvatureCertificate cert = cayley_epsilon(model.rep, model.chain.pi, model.group,
                                               model.generator_elements);
    cert.intermediates["claimed_rate"] = model.claimed_rate;
    cert.intermediates["generator_count_matches_claim"] =
        model.generator_count_matches_claim ? 1.0 : 0.0;
    cert.intermediates["generates_full_group"] = model.generates_full_group ? 1.0 : 0.0;
    return cert;
}

} // namespace curvlab
