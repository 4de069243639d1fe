#ifndef PERCMOD_PERCSIM_HPP
#define PERCMOD_PERCSIM_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "crossing.hpp"
#include "errors.hpp"

namespace percmod::percsim
{

enum class Lattice { bond_square, site_triangular };

inline std::string to_string(Lattice l)
{
    return l == Lattice::bond_square ? "bond_square" : "site_triangular";
}

inline Lattice lattice_from_string(const std::string &s)
{
    if (s == "bond_square") {
        return Lattice::bond_square;
    }
    if (s == "site_triangular") {
        return Lattice::site_triangular;
    }
    throw domain_error("unknown lattice '" + s + "' (expected bond_square or site_triangular)");
}

// width counts columns of sites and height counts rows. Horizontal crossing joins
// column 0 to column width - 1.
struct SimConfig {
    Lattice lattice = Lattice::bond_square;
    int width = 512;
    int height = 512;
    double p = 0.5;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    int threads = 0;           // 0: PERCMOD_THREADS, else hardware concurrency
    bool keep_outcomes = false;

    void validate() const
    {
        if (width < 8 || height < 8) {
            throw domain_error("SimConfig: width and height must be at least 8");
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            throw domain_error("SimConfig: p must lie in [0, 1]");
        }
        if (trials < 1) {
            throw domain_error("SimConfig: trials must be at least 1");
        }
        if (threads < 0) {
            throw domain_error("SimConfig: threads must be non-negative");
        }
    }

    // Euclidean width / height of the sampled region. Triangular rows are sqrt(3)/2 apart.
    double aspect_ratio() const noexcept
    {
        const double row_gap = lattice == Lattice::bond_square ? 1.0 : std::sqrt(3.0) / 2.0;
        return (width - 1.0) / ((height - 1.0) * row_gap);
    }
};

// Per-trial outcome bits.
inline constexpr std::uint8_t crossed_h = 1;
inline constexpr std::uint8_t crossed_v = 2;

struct SimResult {
    double est_pi_h = 0.0;
    double est_pi_v = 0.0;
    double est_pi_hv = 0.0;
    double std_err_h = 0.0;
    double std_err_v = 0.0;
    double std_err_hv = 0.0;
    std::int64_t count_h = 0;
    std::int64_t count_v = 0;
    std::int64_t count_hv = 0;
    std::int64_t trials_run = 0;
    std::chrono::duration<double> wall_time{0.0};
    std::vector<std::uint8_t> outcomes;  // filled when SimConfig::keep_outcomes
};

namespace detail
{

inline constexpr std::uint8_t flag_left = 1;
inline constexpr std::uint8_t flag_right = 2;
inline constexpr std::uint8_t flag_bottom = 4;
inline constexpr std::uint8_t flag_top = 8;

// Open/closed states for one trial, stored as a bitmask. Element j carries a uniform
// u_j = sum_k b_k(j) 2^{-k-1} whose bit b_k(j) is bit j % 64 of the SplitMix64 output
// at counter 64 (j / 64) + k of a stream keyed by (seed, trial); j is open when
// u_j < p. Digits of u are drawn only until every element of a 64-block is decided, so
// p = 1/2 costs one draw per 64 elements. The uniforms do not depend on p: raising p
// only opens more elements.
class Field
{
public:
    void assign(std::uint64_t seed, std::uint64_t trial, double p, std::uint64_t count)
    {
        const std::uint64_t stream = mix(seed ^ mix(trial + 0x632be59bd9b4e019ULL));
        bits_.assign(static_cast<std::size_t>((count + 63) / 64), 0);
        if (p >= 1.0) {
            std::fill(bits_.begin(), bits_.end(), ~0ULL);
            return;
        }
        // p truncated to 53 binary digits; digit k has weight 2^{-k-1}
        const auto digits = static_cast<std::uint64_t>(std::ldexp(p, 53));
        for (std::size_t b = 0; b < bits_.size(); ++b) {
            std::uint64_t undecided = ~0ULL;
            std::uint64_t open = 0;
            for (int k = 0; k < 53 && undecided != 0; ++k) {
                const std::uint64_t rest = digits & ((1ULL << (53 - k)) - 1);
                if (rest == 0) {
                    break;  // remaining digits of p are zero: u >= p for the undecided ones
                }
                const std::uint64_t w = mix(stream + (64 * static_cast<std::uint64_t>(b) + k + 1) * golden);
                if ((digits >> (52 - k)) & 1ULL) {
                    open |= undecided & ~w;
                    undecided &= w;
                } else {
                    undecided &= ~w;
                }
            }
            bits_[b] = open;
        }
    }

    bool open(std::uint64_t index) const noexcept
    {
        return (bits_[index >> 6] >> (index & 63)) & 1ULL;
    }

private:
    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::vector<std::uint64_t> bits_;
};

// Square-lattice bonds: horizontal (x, y)-(x+1, y) has index 2(yW + x), vertical
// (x, y)-(x, y+1) has index 2(yW + x) + 1.
inline std::uint64_t bond_index(bool vertical, int x, int y, int w) noexcept
{
    return 2 * (static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) + static_cast<std::uint64_t>(x))
           + (vertical ? 1 : 0);
}

// Left-right crossing of the bond-square rectangle by exploration. The left column is
// wired open and the row below the rectangle wired closed; the interface between the
// open cluster of the left wall and the dual cluster of the bottom starts at the
// lower-left corner and ends either at the right column (open crossing) or above the
// top row (dual top-bottom crossing, which rules the open one out). With transpose set
// the grid is read with x and y exchanged, giving the top-bottom crossing instead.
//
// The walk sits on an edge between a primal site p (its left) and a dual site
// q = p + (dx, dy)/2 (its right) and examines the bond of the rhombus ahead.
inline bool explore_left_right(const Field &field, int w, int h, bool transpose)
{
    const int ew = transpose ? h : w;  // extent along the crossing direction
    const int eh = transpose ? w : h;
    auto is_open = [&](bool vertical, int x, int y) {
        return transpose ? field.open(bond_index(!vertical, y, x, w)) : field.open(bond_index(vertical, x, y, w));
    };
    int px = 0;
    int py = 0;
    int dx = 1;
    int dy = -1;
    for (;;) {
        if (px == ew - 1) {
            return true;
        }
        if (dy == 1 && py == eh - 1) {
            return false;
        }
        if (dx * dy > 0) {
            // vertical bond from p to p + (0, dy)
            bool open;
            if (px == 0) {
                open = true;
            } else if (dy < 0) {
                open = py > 0 && is_open(true, px, py - 1);
            } else {
                open = is_open(true, px, py);
            }
            if (open) {
                py += dy;
                dy = -dy;
            } else {
                dx = -dx;
            }
        } else {
            // horizontal bond from p to p + (dx, 0)
            const bool open = is_open(false, dx > 0 ? px : px - 1, py);
            if (open) {
                px += dx;
                dx = -dx;
            } else {
                dy = -dy;
            }
        }
    }
}

// Scans the lattice one row at a time. Only the labels of the previous row are kept;
// every live cluster carries the boundary sides it has touched.
class RowScanner
{
public:
    explicit RowScanner(int width)
        : w_(width), prev_label_(width, -1), cur_label_(width, -1), prev_flags_(width, 0), parent_(width),
          flags_(width), rep_(width, -1), compact_(width, -1), open_(width, 0), prev_open_(width, 0)
    {
    }

    std::uint8_t run(const SimConfig &cfg, const Field &src)
    {
        const int h = cfg.height;
        bool horizontal = false;
        bool vertical = false;
        std::fill(prev_label_.begin(), prev_label_.end(), -1);
        std::fill(prev_open_.begin(), prev_open_.end(), 0);
        for (int y = 0; y < h; ++y) {
            start_row(y, h);
            if (cfg.lattice == Lattice::bond_square) {
                bond_row(src, y);
            } else {
                site_row(src, y);
            }
            finish_row(horizontal, vertical, y == h - 1);
        }
        return static_cast<std::uint8_t>((horizontal ? crossed_h : 0) | (vertical ? crossed_v : 0));
    }

private:
    int find(int x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (a > b) {
            std::swap(a, b);
        }
        parent_[b] = a;
        flags_[a] |= flags_[b];
    }

    // Joins site x of the current row to the cluster labelled lab in the previous row.
    void attach(int x, int lab)
    {
        if (rep_[lab] < 0) {
            rep_[lab] = x;
            flags_[find(x)] |= prev_flags_[lab];
        } else {
            unite(x, rep_[lab]);
        }
    }

    void start_row(int y, int h)
    {
        const std::uint8_t row_flags =
            static_cast<std::uint8_t>((y == 0 ? flag_bottom : 0) | (y == h - 1 ? flag_top : 0));
        for (int x = 0; x < w_; ++x) {
            parent_[x] = x;
            flags_[x] = row_flags;
            rep_[x] = -1;
        }
        flags_[0] |= flag_left;
        flags_[w_ - 1] |= flag_right;
    }

    void bond_row(const Field &src, int y)
    {
        std::fill(open_.begin(), open_.end(), 1);
        if (y > 0) {
            for (int x = 0; x < w_; ++x) {
                if (src.open(bond_index(true, x, y - 1, w_))) {
                    attach(x, prev_label_[x]);
                }
            }
        }
        for (int x = 1; x < w_; ++x) {
            if (src.open(bond_index(false, x - 1, y, w_))) {
                unite(x - 1, x);
            }
        }
    }

    // Triangular lattice drawn as a brick wall: odd rows sit half a spacing to the right,
    // so row y touches previous-row sites x and x - 1 (y even) or x and x + 1 (y odd).
    void site_row(const Field &src, int y)
    {
        for (int x = 0; x < w_; ++x) {
            open_[x] = src.open(static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w_)
                                + static_cast<std::uint64_t>(x))
                           ? 1
                           : 0;
        }
        const int shift = (y % 2 == 1) ? 1 : -1;
        for (int x = 0; x < w_; ++x) {
            if (!open_[x]) {
                continue;
            }
            if (x > 0 && open_[x - 1]) {
                unite(x - 1, x);
            }
            if (y == 0) {
                continue;
            }
            if (prev_open_[x]) {
                attach(x, prev_label_[x]);
            }
            const int xs = x + shift;
            if (xs >= 0 && xs < w_ && prev_open_[xs]) {
                attach(x, prev_label_[xs]);
            }
        }
    }

    void finish_row(bool &horizontal, bool &vertical, bool last)
    {
        std::fill(compact_.begin(), compact_.end(), -1);
        int next = 0;
        for (int x = 0; x < w_; ++x) {
            if (!open_[x]) {
                cur_label_[x] = -1;
                continue;
            }
            const int root = find(x);
            if (compact_[root] < 0) {
                compact_[root] = next;
                const std::uint8_t f = flags_[root];
                prev_flags_[next] = f;
                if ((f & (flag_left | flag_right)) == (flag_left | flag_right)) {
                    horizontal = true;
                }
                if (last && (f & (flag_bottom | flag_top)) == (flag_bottom | flag_top)) {
                    vertical = true;
                }
                ++next;
            }
            cur_label_[x] = compact_[root];
        }
        std::swap(prev_label_, cur_label_);
        std::swap(prev_open_, open_);
    }

    int w_;
    std::vector<int> prev_label_, cur_label_;
    std::vector<std::uint8_t> prev_flags_;
    std::vector<int> parent_;
    std::vector<std::uint8_t> flags_;
    std::vector<int> rep_, compact_;
    std::vector<std::uint8_t> open_, prev_open_;
};

inline std::uint64_t element_count(const SimConfig &cfg)
{
    const auto sites = static_cast<std::uint64_t>(cfg.width) * static_cast<std::uint64_t>(cfg.height);
    return cfg.lattice == Lattice::bond_square ? 2 * sites : sites;
}

// Per-thread workspace. Bond-square trials use exploration; the row scanner handles
// the triangular lattice and serves as an independent reference for bond_square.
class TrialRunner
{
public:
    explicit TrialRunner(const SimConfig &cfg) : cfg_(cfg), scanner_(cfg.width)
    {
    }

    const Field &field(std::uint64_t trial)
    {
        field_.assign(cfg_.seed, trial, cfg_.p, element_count(cfg_));
        return field_;
    }

    std::uint8_t run(std::uint64_t trial)
    {
        field(trial);
        if (cfg_.lattice == Lattice::site_triangular) {
            return scanner_.run(cfg_, field_);
        }
        const bool h = explore_left_right(field_, cfg_.width, cfg_.height, false);
        const bool v = explore_left_right(field_, cfg_.width, cfg_.height, true);
        return static_cast<std::uint8_t>((h ? crossed_h : 0) | (v ? crossed_v : 0));
    }

    std::uint8_t run_reference(std::uint64_t trial)
    {
        return scanner_.run(cfg_, field(trial));
    }

private:
    SimConfig cfg_;
    Field field_;
    RowScanner scanner_;
};

inline int resolve_threads(const SimConfig &cfg)
{
    if (cfg.threads > 0) {
        return cfg.threads;
    }
    if (const char *env = std::getenv("PERCMOD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

inline double std_err(double phat, std::int64_t n)
{
    return std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
}

} // namespace detail

// Monte Carlo estimate of the crossing probabilities. Trial t always draws from the
// stream seeded by (seed, t), so results do not depend on the thread count.
inline SimResult run_sim(const SimConfig &cfg)
{
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int nthreads =
        static_cast<int>(std::min<std::int64_t>(detail::resolve_threads(cfg), cfg.trials));

    std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(cfg.trials));
    auto worker = [&](int k) {
        detail::TrialRunner runner(cfg);
        for (std::int64_t t = k; t < cfg.trials; t += nthreads) {
            outcomes[static_cast<std::size_t>(t)] = runner.run(static_cast<std::uint64_t>(t));
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nthreads; ++k) {
            pool.emplace_back(worker, k);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    SimResult res;
    for (const auto o : outcomes) {
        res.count_h += (o & crossed_h) ? 1 : 0;
        res.count_v += (o & crossed_v) ? 1 : 0;
        res.count_hv += (o == (crossed_h | crossed_v)) ? 1 : 0;
    }
    const auto n = static_cast<double>(cfg.trials);
    res.trials_run = cfg.trials;
    res.est_pi_h = static_cast<double>(res.count_h) / n;
    res.est_pi_v = static_cast<double>(res.count_v) / n;
    res.est_pi_hv = static_cast<double>(res.count_hv) / n;
    res.std_err_h = detail::std_err(res.est_pi_h, cfg.trials);
    res.std_err_v = detail::std_err(res.est_pi_v, cfg.trials);
    res.std_err_hv = detail::std_err(res.est_pi_hv, cfg.trials);
    if (cfg.keep_outcomes) {
        res.outcomes = std::move(outcomes);
    }
    res.wall_time = std::chrono::steady_clock::now() - t0;
    return res;
}

struct FormulaComparison {
    double r;
    double est;
    double std_err;
    double formula_value;
    double formula_err;
    double gap;
    double allowance;
    double combined_tolerance;  // 3 std_err + allowance
    bool pass;
};

// Compares the simulated horizontal crossing probability with the continuum Pi_h(r).
// The allowance covers finite-size corrections, which are not modelled.
inline FormulaComparison compare_to_formula(const SimConfig &cfg, const crossing::AspectRatio &ar,
                                            double allowance = 0.01, const SimResult *precomputed = nullptr)
{
    cfg.validate();
    const double aspect = cfg.aspect_ratio();
    if (std::abs(aspect / ar.r - 1.0) > 0.02) {
        throw domain_error("compare_to_formula: lattice aspect ratio " + std::to_string(aspect)
                           + " differs from r = " + std::to_string(ar.r) + " by more than 2%");
    }
    const SimResult sim = precomputed ? *precomputed : run_sim(cfg);
    const auto formula = crossing::pi_h(ar);
    FormulaComparison out{};
    out.r = ar.r;
    out.est = sim.est_pi_h;
    out.std_err = sim.std_err_h;
    out.formula_value = formula.value.real();
    out.formula_err = formula.abs_err;
    out.gap = std::abs(out.est - out.formula_value);
    out.allowance = allowance;
    out.combined_tolerance = 3.0 * out.std_err + allowance;
    out.pass = out.gap < out.combined_tolerance;
    return out;
}

} // namespace percmod::percsim

#endif
