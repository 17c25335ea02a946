#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "driftnoise/quadrature.hpp"
#include "driftnoise/rng.hpp"
#include "driftnoise/signs.hpp"

namespace driftnoise::extensions {

// ---------------------------------------------------------------------------
// inductive systems and the binary extension step map (pairs (omega, s))

/// A truncated inductive system of probability spaces.  iid_real drops one
/// coordinate per level (the coordinate shift); brownian_tail is the chain of
/// restrictions to [0, tau + 3^-n] realized in obstruction_distance_brownian.
struct InductiveSystemSpec {
    enum class Kind { iid_real, brownian_tail };

    Kind kind = Kind::iid_real;
    int depth = 2;  // number of levels N

    // iid_real only: alphabet > 0 means uniform letters {0..alphabet-1},
    // otherwise `marginal` draws the coordinate law.
    int alphabet = 0;
    std::function<double(RngStream&)> marginal;

    // brownian_tail only: triadic depth of the path grid.
    int grid_depth = 0;

    void validate() const;
    /// Draw the visible coordinate window of level 1 (depth coordinates).
    std::vector<double> sample_level_one(RngStream& rng) const;
};

/// One-step map of a binary extension: (omega_n, s) -> (beta omega_n, s * X_n(omega_n)),
/// where X_n reads the n-th coordinate and beta drops it.
struct BinaryExtensionStep {
    std::function<int(int n, double x)> sign_of;  // X_n at the level's first coordinate, +/-1

    /// omega holds the visible coordinates of level n, front() being coordinate n.
    std::pair<std::vector<double>, int> step(int n, std::vector<double> omega, int s) const;
};

/// The extension stepper of an iid system under the sign sequence X.
BinaryExtensionStep build_binary_extension(const InductiveSystemSpec& system,
                                           std::function<int(int n, double x)> x);

// ---------------------------------------------------------------------------
// finite cocycle problem (the isomorphism criterion X T(U) = Y U, truncated)

/// Sign function of a window of `window` consecutive coordinates over a finite
/// alphabet; table indexed by base-`alphabet` digits, first window coordinate
/// least significant.
struct SignFunction {
    int alphabet = 2;
    int window = 1;
    std::vector<signed char> table;  // size alphabet^window, values +/-1

    int eval(std::span<const int> coords) const;
};

struct CocycleProblem {
    int alphabet = 2;  // A
    int depth = 2;     // number of levels N
    int window = 1;    // K visible coordinates per level
    // X[n], Y[n] give the +/-1 value of X_{n+1}, Y_{n+1} per alphabet letter.
    std::vector<std::vector<signed char>> x;
    std::vector<std::vector<signed char>> y;

    void validate() const;
};

enum class CocycleStatus { found, absent, inconclusive };

struct CocycleSolution {
    CocycleStatus status = CocycleStatus::inconclusive;
    std::vector<SignFunction> u;  // filled when status == found
};

/// Decides X T(U) = Y U within the truncated class (each U_n a function of its
/// K-coordinate window) by enumerating U_1 and propagating U_{n+1} = U_n X_n Y_n,
/// which must come out constant in the dropped coordinate.  When no candidate
/// survives: `absent` under full visibility (window >= depth), otherwise
/// `inconclusive` (a wider window could still carry a solution).
CocycleSolution cocycle_solve(const CocycleProblem& problem);

// ---------------------------------------------------------------------------
// products of binary extensions over finite spaces (explicit tables)

struct FiniteSpace {
    std::vector<double> prob;  // atom weights, sum 1
    int size() const { return static_cast<int>(prob.size()); }
    bool operator==(const FiniteSpace&) const = default;
};

/// A binary extension of a finite space with explicit point tables.
struct FiniteBinaryExtension {
    FiniteSpace base;
    std::vector<double> weight;   // per extension point
    std::vector<int> gamma;       // point -> base atom
    std::vector<int> involution;  // atom-swapping pairing

    int points() const { return static_cast<int>(weight.size()); }
    bool operator==(const FiniteBinaryExtension&) const = default;
};

/// Canonical extension base x {-1,+1}: point 2i+t covers atom i, t = 0 the
/// +1 copy, t = 1 the -1 copy.
FiniteBinaryExtension make_binary_extension(const FiniteSpace& base);

/// Sign rides on factor 1 everywhere (the A = everything product).
FiniteBinaryExtension lift_left(const FiniteBinaryExtension& e1, const FiniteSpace& s2);
/// Sign rides on factor 2 everywhere (the A = empty product).
FiniteBinaryExtension lift_right(const FiniteSpace& s1, const FiniteBinaryExtension& e2);

/// Product of two binary extensions along the subset A of the product base:
/// over A the fiber comes from extension 1, off A from extension 2.
/// a_indicator is row-major on base1 x base2.
FiniteBinaryExtension product_extension(const FiniteBinaryExtension& e1, const FiniteBinaryExtension& e2,
                                        const std::vector<std::uint8_t>& a_indicator);

// ---------------------------------------------------------------------------
// obstruction distance dist^2(psi_n, H_n) = E[1 - (int h_n dnu_n)^2]

struct ObstructionReport {
    int level = 0;
    double d_hat = 0.0;
    double stderr_d = 0.0;
    std::int64_t replicas = 0;
    double acceptance_rate = 1.0;
};

/// iid model: nu_n is the marginal itself, so the distance is deterministic:
/// 1 - (int f_n g_n dmu)^2 with the quadrature error propagated into stderr.
ObstructionReport obstruction_distance_iid(const signs::SignRule& f, const signs::SignRule& g, int n,
                                           const std::function<double(double)>& marginal_density, double lo, double hi,
                                           const QuadratureSpec& spec = {});

/// Brownian model: per replica sample a path on [0,1], take the global
/// minimizer tau, condition on tau + 3^-n < 1 by resampling, set
/// eps = 3^-(n+1), a = B(tau+eps)-B(tau), b = B(tau+3eps)-B(tau), and
/// integrate h_n against the conditional midpoint density.  Averages
/// 1 - I^2 over replicas.
ObstructionReport obstruction_distance_brownian(const signs::SignRule& f, const signs::SignRule& g, int n, int depth,
                                                std::int64_t replicas, const RngFamily& rng,
                                                const QuadratureSpec& spec = {.abs_tol = 1e-7, .max_depth = 48},
                                                int workers = 1);

}  // namespace driftnoise::extensions
