#include "driftnoise/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "driftnoise/brownian.hpp"
#include "driftnoise/errors.hpp"
#include "driftnoise/stats.hpp"

namespace driftnoise::extensions {

void InductiveSystemSpec::validate() const {
    if (depth < 2) throw std::invalid_argument("InductiveSystemSpec: depth must be >= 2");
    switch (kind) {
        case Kind::iid_real:
            if (alphabet < 0) throw std::invalid_argument("InductiveSystemSpec: negative alphabet");
            if (alphabet == 0 && !marginal)
                throw std::invalid_argument("InductiveSystemSpec: iid system needs an alphabet or a marginal");
            break;
        case Kind::brownian_tail:
            if (grid_depth < 1) throw std::invalid_argument("InductiveSystemSpec: brownian tail needs a grid depth");
            break;
    }
}

std::vector<double> InductiveSystemSpec::sample_level_one(RngStream& rng) const {
    validate();
    if (kind != Kind::iid_real)
        throw std::invalid_argument("InductiveSystemSpec: coordinate sampling is an iid-system operation");
    std::vector<double> omega(static_cast<std::size_t>(depth));
    for (auto& v : omega) {
        v = alphabet > 0 ? std::floor(rng.next_uniform() * static_cast<double>(alphabet)) : marginal(rng);
    }
    return omega;
}

BinaryExtensionStep build_binary_extension(const InductiveSystemSpec& system,
                                           std::function<int(int n, double x)> x) {
    system.validate();
    if (system.kind != InductiveSystemSpec::Kind::iid_real)
        throw std::invalid_argument("build_binary_extension: step maps are built for iid systems");
    return BinaryExtensionStep{std::move(x)};
}

std::pair<std::vector<double>, int> BinaryExtensionStep::step(int n, std::vector<double> omega, int s) const {
    if (omega.empty()) throw std::invalid_argument("BinaryExtensionStep: empty coordinate window");
    if (s != 1 && s != -1) throw std::invalid_argument("BinaryExtensionStep: sign must be +/-1");
    int factor = sign_of(n, omega.front());
    if (factor != 1 && factor != -1) throw std::invalid_argument("BinaryExtensionStep: X_n must be +/-1 valued");
    omega.erase(omega.begin());
    return {std::move(omega), s * factor};
}

int SignFunction::eval(std::span<const int> coords) const {
    if (static_cast<int>(coords.size()) < window) throw std::invalid_argument("SignFunction: window underflow");
    std::size_t idx = 0;
    std::size_t mul = 1;
    for (int j = 0; j < window; ++j) {
        idx += static_cast<std::size_t>(coords[static_cast<std::size_t>(j)]) * mul;
        mul *= static_cast<std::size_t>(alphabet);
    }
    return table[idx];
}

void CocycleProblem::validate() const {
    if (alphabet < 2) throw std::invalid_argument("CocycleProblem: alphabet must be >= 2");
    if (depth < 2) throw std::invalid_argument("CocycleProblem: depth must be >= 2");
    if (window < 1) throw std::invalid_argument("CocycleProblem: window must be >= 1");
    if (static_cast<int>(x.size()) != depth || static_cast<int>(y.size()) != depth)
        throw std::invalid_argument("CocycleProblem: X, Y must have one row per level");
    for (const auto& row : x)
        if (static_cast<int>(row.size()) != alphabet) throw std::invalid_argument("CocycleProblem: bad X row size");
    for (const auto& row : y)
        if (static_cast<int>(row.size()) != alphabet) throw std::invalid_argument("CocycleProblem: bad Y row size");
    double cells = std::pow(static_cast<double>(alphabet), window);
    if (cells > 16.5) throw std::invalid_argument("CocycleProblem: alphabet^window too large to enumerate");
}

namespace {

std::size_t ipow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

}  // namespace

CocycleSolution cocycle_solve(const CocycleProblem& problem) {
    problem.validate();
    const int a = problem.alphabet;
    const int k = problem.window;
    const std::size_t cells = ipow(a, k);

    // Propagation of one candidate U_1: each U_{n+1} is forced pointwise; it
    // exists iff U_n(x_n, w) X_n(x_n) Y_n(x_n) does not depend on x_n.
    auto propagate = [&](const std::vector<signed char>& u1, std::vector<SignFunction>* out) -> bool {
        std::vector<signed char> cur = u1;
        if (out) {
            out->clear();
            out->push_back(SignFunction{a, k, cur});
        }
        for (int n = 0; n + 1 < problem.depth; ++n) {
            // W(x_n, w) = U_n(x_n, w) X_n(x_n) Y_n(x_n), w the remaining k-1 coords
            std::vector<signed char> next(cells);
            const std::size_t tail_cells = cells / static_cast<std::size_t>(a);
            for (std::size_t w = 0; w < tail_cells; ++w) {
                signed char val = 0;
                for (int x0 = 0; x0 < a; ++x0) {
                    std::size_t idx = static_cast<std::size_t>(x0) + static_cast<std::size_t>(a) * w;
                    signed char cand = static_cast<signed char>(
                        cur[idx] * problem.x[static_cast<std::size_t>(n)][static_cast<std::size_t>(x0)] *
                        problem.y[static_cast<std::size_t>(n)][static_cast<std::size_t>(x0)]);
                    if (x0 == 0) {
                        val = cand;
                    } else if (cand != val) {
                        return false;  // forced U_{n+1} would depend on the dropped coordinate
                    }
                }
                // constant in the freshly revealed last coordinate
                for (int xk = 0; xk < a; ++xk) next[w + tail_cells * static_cast<std::size_t>(xk)] = val;
            }
            cur = std::move(next);
            if (out) out->push_back(SignFunction{a, k, cur});
        }
        return true;
    };

    std::vector<signed char> u1(cells);
    const std::size_t total = std::size_t{1} << cells;
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t c = 0; c < cells; ++c) u1[c] = (mask >> c) & 1 ? -1 : 1;
        CocycleSolution sol;
        if (propagate(u1, &sol.u)) {
            sol.status = CocycleStatus::found;
            return sol;
        }
    }
    CocycleSolution sol;
    sol.status = problem.window >= problem.depth ? CocycleStatus::absent : CocycleStatus::inconclusive;
    return sol;
}

FiniteBinaryExtension make_binary_extension(const FiniteSpace& base) {
    FiniteBinaryExtension e;
    e.base = base;
    const int m = base.size();
    e.weight.resize(static_cast<std::size_t>(2 * m));
    e.gamma.resize(static_cast<std::size_t>(2 * m));
    e.involution.resize(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
        for (int t = 0; t < 2; ++t) {
            int p = 2 * i + t;
            e.weight[static_cast<std::size_t>(p)] = 0.5 * base.prob[static_cast<std::size_t>(i)];
            e.gamma[static_cast<std::size_t>(p)] = i;
            e.involution[static_cast<std::size_t>(p)] = 2 * i + (1 - t);
        }
    }
    return e;
}

namespace {

FiniteSpace product_space(const FiniteSpace& s1, const FiniteSpace& s2) {
    FiniteSpace s;
    s.prob.reserve(static_cast<std::size_t>(s1.size() * s2.size()));
    for (double p1 : s1.prob)
        for (double p2 : s2.prob) s.prob.push_back(p1 * p2);
    return s;
}

// the two gamma-preimages of each base atom, in point order
std::vector<std::array<int, 2>> fibers(const FiniteBinaryExtension& e) {
    std::vector<std::array<int, 2>> f(static_cast<std::size_t>(e.base.size()), {-1, -1});
    for (int p = 0; p < e.points(); ++p) {
        auto& slot = f[static_cast<std::size_t>(e.gamma[static_cast<std::size_t>(p)])];
        if (slot[0] < 0)
            slot[0] = p;
        else if (slot[1] < 0)
            slot[1] = p;
        else
            throw std::invalid_argument("product_extension: fiber larger than two points");
    }
    for (const auto& slot : f)
        if (slot[1] < 0) throw std::invalid_argument("product_extension: fiber smaller than two points");
    return f;
}

}  // namespace

FiniteBinaryExtension product_extension(const FiniteBinaryExtension& e1, const FiniteBinaryExtension& e2,
                                        const std::vector<std::uint8_t>& a_indicator) {
    const int m1 = e1.base.size();
    const int m2 = e2.base.size();
    if (static_cast<int>(a_indicator.size()) != m1 * m2)
        throw std::invalid_argument("product_extension: indicator size mismatch");
    const auto f1 = fibers(e1);
    const auto f2 = fibers(e2);
    FiniteBinaryExtension out;
    out.base = product_space(e1.base, e2.base);
    const int points = 2 * m1 * m2;
    out.weight.resize(static_cast<std::size_t>(points));
    out.gamma.resize(static_cast<std::size_t>(points));
    out.involution.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < m1; ++i) {
        for (int j = 0; j < m2; ++j) {
            const int atom = i * m2 + j;
            const bool in_a = a_indicator[static_cast<std::size_t>(atom)] != 0;
            for (int t = 0; t < 2; ++t) {
                const int p = 2 * atom + t;
                if (in_a) {
                    const int tilde = f1[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
                    out.weight[static_cast<std::size_t>(p)] =
                        e1.weight[static_cast<std::size_t>(tilde)] * e2.base.prob[static_cast<std::size_t>(j)];
                } else {
                    const int tilde = f2[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
                    out.weight[static_cast<std::size_t>(p)] =
                        e1.base.prob[static_cast<std::size_t>(i)] * e2.weight[static_cast<std::size_t>(tilde)];
                }
                out.gamma[static_cast<std::size_t>(p)] = atom;
                out.involution[static_cast<std::size_t>(p)] = 2 * atom + (1 - t);
            }
        }
    }
    return out;
}

FiniteBinaryExtension lift_left(const FiniteBinaryExtension& e1, const FiniteSpace& s2) {
    std::vector<std::uint8_t> all(static_cast<std::size_t>(e1.base.size() * s2.size()), 1);
    return product_extension(e1, make_binary_extension(s2), all);
}

FiniteBinaryExtension lift_right(const FiniteSpace& s1, const FiniteBinaryExtension& e2) {
    std::vector<std::uint8_t> none(static_cast<std::size_t>(s1.size() * e2.base.size()), 0);
    return product_extension(make_binary_extension(s1), e2, none);
}

ObstructionReport obstruction_distance_iid(const signs::SignRule& f, const signs::SignRule& g, int n,
                                           const std::function<double(double)>& marginal_density, double lo, double hi,
                                           const QuadratureSpec& spec) {
    ObstructionReport rep;
    rep.level = n;
    rep.replicas = 1;
    if (signs::levels_identical(f, g, n)) {
        rep.d_hat = 0.0;
        return rep;
    }
    double err = 0.0;
    double integral = signs::mean_value(f, g, n, marginal_density, lo, hi, spec, &err);
    rep.d_hat = 1.0 - integral * integral;
    rep.stderr_d = 2.0 * std::abs(integral) * err;
    return rep;
}

ObstructionReport obstruction_distance_brownian(const signs::SignRule& f, const signs::SignRule& g, int n, int depth,
                                                std::int64_t replicas, const RngFamily& rng, const QuadratureSpec& spec,
                                                int workers) {
    if (n < 1) throw std::invalid_argument("obstruction_distance_brownian: n must be >= 1");
    if (depth < n + 2) throw std::invalid_argument("obstruction_distance_brownian: depth must be >= n+2");
    if (replicas < 1) throw std::invalid_argument("obstruction_distance_brownian: replicas must be >= 1");
    const bool trivial = signs::levels_identical(f, g, n);
    const TimeGrid grid = TimeGrid::unit(depth);
    const std::int64_t eps_steps = grid.steps_in_pow3(n + 1);  // 3^-(n+1)
    const double eps = 1.0 / static_cast<double>(TimeGrid::pow3(n + 1));

    std::vector<double> value(static_cast<std::size_t>(replicas));
    std::vector<double> attempts(static_cast<std::size_t>(replicas));

    auto run_replica = [&](std::int64_t r) {
        RngStream stream = rng.stream(static_cast<std::uint64_t>(r));
        double tries = 0.0;
        for (;;) {
            tries += 1.0;
            if (tries > 1e5) {
                throw AcceptanceStarvationError("obstruction_distance_brownian: conditioning never accepted",
                                                0.0);
            }
            brownian::DiscretePath path = brownian::sample_path(grid, stream);
            auto [tau, tau_value] = brownian::global_min(path);
            if (tau + 3 * eps_steps >= grid.cells()) continue;  // tau + 3^-n must stay below 1
            const double a = path.at(tau + eps_steps) - tau_value;
            const double b = path.at(tau + 3 * eps_steps) - tau_value;
            if (!(a > 0.0) || !(b > 0.0)) continue;  // discrete argmin tie; resample
            double integral = 1.0;
            if (!trivial) {
                density::DensityParams params{a, b, eps};
                const double mean = 0.5 * (a + b);
                const double sigma = std::sqrt(0.5 * eps);
                const double lo = std::max(0.0, mean - 12.0 * sigma);
                const double hi = mean + 12.0 * sigma;
                auto dens = [&](double x) { return density::midpoint_density(params, x); };
                integral = signs::mean_value(f, g, n, dens, lo, hi, spec);
            }
            value[static_cast<std::size_t>(r)] = 1.0 - integral * integral;
            attempts[static_cast<std::size_t>(r)] = tries;
            return;
        }
    };

    if (workers <= 1) {
        for (std::int64_t r = 0; r < replicas; ++r) run_replica(r);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::int64_t chunk = (replicas + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::int64_t lo = w * chunk;
            std::int64_t hi = std::min(replicas, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, w] {
                try {
                    for (std::int64_t r = lo; r < hi; ++r) run_replica(r);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    ObstructionReport rep;
    rep.level = n;
    rep.replicas = replicas;
    MeanStderr ms = mean_stderr(value);
    rep.d_hat = ms.mean;
    rep.stderr_d = ms.stderr_mean;
    rep.acceptance_rate = static_cast<double>(replicas) / pairwise_sum(attempts);
    return rep;
}

}  // namespace driftnoise::extensions
