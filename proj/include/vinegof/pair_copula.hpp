#pragma once

// Bivariate copula families: density, cdf, conditional distributions
// (h-functions) in both directions, their inverses, Kendall's tau
// conversions, and per-observation log-likelihood derivatives.
//
// All base families are exchangeable; asymmetry enters only through
// rotations. Rotation convention:
//   c90(u,v)  = c(v, 1-u)
//   c180(u,v) = c(1-u, 1-v)
//   c270(u,v) = c(1-v, u)

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vinegof/errors.hpp"
#include "vinegof/math.hpp"

namespace vinegof {

enum class Family : int {
    independence = 0,
    gauss = 1,
    student_t = 2,
    clayton = 3,
    gumbel = 4,
    frank = 5,
    joe = 6,
};

enum class Rotation : int { r0 = 0, r90 = 90, r180 = 180, r270 = 270 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::independence: return "independence";
        case Family::gauss: return "gauss";
        case Family::student_t: return "student-t";
        case Family::clayton: return "clayton";
        case Family::gumbel: return "gumbel";
        case Family::frank: return "frank";
        case Family::joe: return "joe";
    }
    return "?";
}

inline int param_count(Family f) {
    switch (f) {
        case Family::independence: return 0;
        case Family::student_t: return 2;
        default: return 1;
    }
}

struct ParamDomain {
    double lower;
    double upper;
    bool open_lower;
    bool open_upper;

    bool contains(double x) const {
        if (open_lower ? !(x > lower) : !(x >= lower)) return false;
        if (open_upper ? !(x < upper) : !(x <= upper)) return false;
        return true;
    }
    // strict interior test used by finite-difference stencils
    bool interior(double x, double margin) const {
        return x > lower + margin && x < upper - margin;
    }
};

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline ParamDomain param_domain(Family f, int index) {
    switch (f) {
        case Family::gauss: return {-1.0, 1.0, true, true};
        case Family::student_t:
            return index == 0 ? ParamDomain{-1.0, 1.0, true, true} : ParamDomain{2.0, 30.0, true, false};
        case Family::clayton: return {0.0, inf, true, true};
        case Family::gumbel: return {1.0, inf, false, true};
        case Family::frank: return {-inf, inf, true, true};  // theta != 0 checked separately
        case Family::joe: return {1.0, inf, true, true};
        case Family::independence: break;
    }
    throw DomainError("param_domain: family has no parameters");
}

struct PairCopulaSpec {
    Family family = Family::independence;
    Rotation rotation = Rotation::r0;
    std::vector<double> params;

    static PairCopulaSpec indep() { return {}; }
    static PairCopulaSpec make(Family f, std::vector<double> p, Rotation rot = Rotation::r0) {
        PairCopulaSpec s{f, rot, std::move(p)};
        validate(s);
        return s;
    }

    static void validate(const PairCopulaSpec& s) {
        const int np = param_count(s.family);
        if (static_cast<int>(s.params.size()) != np)
            throw DomainError(std::string("pair copula ") + family_name(s.family) + ": expected " +
                              std::to_string(np) + " parameter(s)");
        for (int j = 0; j < np; ++j) {
            if (!std::isfinite(s.params[static_cast<std::size_t>(j)]) ||
                !param_domain(s.family, j).contains(s.params[static_cast<std::size_t>(j)]))
                throw DomainError(std::string("pair copula ") + family_name(s.family) +
                                  ": parameter " + std::to_string(j + 1) + " outside domain");
        }
        if (s.family == Family::frank && s.params[0] == 0.0)
            throw DomainError("pair copula frank: theta must be nonzero");
        if (s.rotation != Rotation::r0 && s.family != Family::independence) {
            const bool asym = s.family == Family::clayton || s.family == Family::gumbel || s.family == Family::joe;
            const bool frank180 = s.family == Family::frank && s.rotation == Rotation::r180;
            if (!asym && !frank180)
                throw DomainError(std::string("pair copula ") + family_name(s.family) +
                                  ": rotation not permitted for this family");
        }
    }
};

// Serialization codes: family integer plus 10 per 90 degrees of rotation.
inline int family_code(const PairCopulaSpec& s) {
    const Rotation rot = s.family == Family::independence ? Rotation::r0 : s.rotation;
    return static_cast<int>(s.family) + 10 * (static_cast<int>(rot) / 90);
}

inline std::pair<Family, Rotation> decode_family(int code) {
    const int fam = code % 10;
    const int rot = code / 10;
    if (fam < 0 || fam > 6 || rot < 0 || rot > 3) throw FormatError("unknown family code " + std::to_string(code));
    return {static_cast<Family>(fam), static_cast<Rotation>(rot * 90)};
}

namespace pc_detail {

inline constexpr double u_eps = 1e-10;

inline double clamp_unit(double x) { return std::min(std::max(x, u_eps), 1.0 - u_eps); }

inline void require_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + ": argument outside open unit interval");
}

inline double log_sum_2exp(double la, double lb) {
    const double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

// ---- base (unrotated, exchangeable) families -------------------------------

inline double gauss_logpdf(double rho, double u, double v) {
    const double x = math::std_normal_quantile(u);
    const double y = math::std_normal_quantile(v);
    const double r2 = rho * rho;
    return -0.5 * std::log1p(-r2) - (r2 * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - r2));
}

inline double gauss_h(double rho, double u, double v) {
    const double x = math::std_normal_quantile(u);
    const double y = math::std_normal_quantile(v);
    return math::std_normal_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

inline double gauss_hinv(double rho, double p, double v) {
    const double y = math::std_normal_quantile(v);
    const double x = math::std_normal_quantile(p) * std::sqrt(1.0 - rho * rho) + rho * y;
    return math::std_normal_cdf(x);
}

inline double t_logpdf(double rho, double nu, double u, double v) {
    const double x = math::student_t_quantile(u, nu);
    const double y = math::student_t_quantile(v, nu);
    const double r2 = rho * rho;
    const double q = (x * x - 2.0 * rho * x * y + y * y) / (1.0 - r2);
    const double log_joint = std::lgamma(0.5 * (nu + 2.0)) - std::lgamma(0.5 * nu) - std::log(nu * math::pi)
                             - 0.5 * std::log1p(-r2) - 0.5 * (nu + 2.0) * std::log1p(q / nu);
    return log_joint - math::student_t_logpdf(x, nu) - math::student_t_logpdf(y, nu);
}

inline double t_h(double rho, double nu, double u, double v) {
    const double x = math::student_t_quantile(u, nu);
    const double y = math::student_t_quantile(v, nu);
    const double scale = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    return math::student_t_cdf((x - rho * y) / scale, nu + 1.0);
}

inline double t_hinv(double rho, double nu, double p, double v) {
    const double y = math::student_t_quantile(v, nu);
    const double scale = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    const double x = math::student_t_quantile(p, nu + 1.0) * scale + rho * y;
    return math::student_t_cdf(x, nu);
}

// log(u^-th + v^-th - 1), stable for both tiny and large th
inline double clayton_lse(double th, double u, double v) {
    const double a = -th * std::log(u);
    const double b = -th * std::log(v);
    const double m = std::max(a, b);
    if (m < 1.0) return std::log1p(std::expm1(a) + std::expm1(b));
    return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

inline double clayton_logpdf(double th, double u, double v) {
    return std::log1p(th) - (1.0 + th) * (std::log(u) + std::log(v)) - (2.0 + 1.0 / th) * clayton_lse(th, u, v);
}

inline double clayton_cdf(double th, double u, double v) {
    return std::exp(-clayton_lse(th, u, v) / th);
}

inline double clayton_h(double th, double u, double v) {
    return std::exp(-(th + 1.0) * std::log(v) - (1.0 + 1.0 / th) * clayton_lse(th, u, v));
}

inline double clayton_hinv(double th, double p, double v) {
    // u = [ (p^{-th/(1+th)} - 1) v^{-th} + 1 ]^{-1/th}
    const double lp = -(th / (1.0 + th)) * std::log(p);           // >= 0
    const double lw = std::log(std::expm1(lp)) - th * std::log(v); // log((p^..-1) * v^-th)
    const double lx = lw > 0.0 ? lw + std::log1p(std::exp(-lw)) : std::log1p(std::exp(lw));
    return std::exp(-lx / th);
}

inline double gumbel_ls(double th, double u, double v) {
    // log(S) with S = (-log u)^th + (-log v)^th
    return log_sum_2exp(th * std::log(-std::log(u)), th * std::log(-std::log(v)));
}

inline double gumbel_logpdf(double th, double u, double v) {
    const double lxu = std::log(-std::log(u));
    const double lxv = std::log(-std::log(v));
    const double ls = log_sum_2exp(th * lxu, th * lxv);
    const double s_pow = std::exp(ls / th);  // S^{1/th}
    return -s_pow - std::log(u) - std::log(v) + (th - 1.0) * (lxu + lxv) + (2.0 / th - 2.0) * ls +
           std::log1p((th - 1.0) / s_pow);
}

inline double gumbel_cdf(double th, double u, double v) {
    return std::exp(-std::exp(gumbel_ls(th, u, v) / th));
}

inline double gumbel_h(double th, double u, double v) {
    const double lxv = std::log(-std::log(v));
    const double ls = gumbel_ls(th, u, v);
    return std::exp(-std::exp(ls / th) + (1.0 / th - 1.0) * ls + (th - 1.0) * lxv - std::log(v));
}

inline double frank_logpdf(double th, double u, double v) {
    if (std::fabs(th) < 1e-12) return 0.0;  // independence limit
    const double eta = std::expm1(-th);
    const double gg = std::expm1(-th * u) * std::expm1(-th * v);
    const double denom = -eta - gg;  // (1-e^-th) - (1-e^-th u)(1-e^-th v)
    return std::log(th * -eta) - th * (u + v) - 2.0 * std::log(std::fabs(denom));
}

inline double frank_cdf(double th, double u, double v) {
    const double eta = std::expm1(-th);
    return -std::log1p(std::expm1(-th * u) * std::expm1(-th * v) / eta) / th;
}

inline double frank_h(double th, double u, double v) {
    const double eta = std::expm1(-th);
    const double gu = std::expm1(-th * u);
    return gu * std::exp(-th * v) / (eta + gu * std::expm1(-th * v));
}

inline double frank_hinv(double th, double p, double v) {
    const double eta = std::expm1(-th);
    const double gv = std::expm1(-th * v);
    const double gu = p * eta / (std::exp(-th * v) - p * gv);
    return -std::log1p(gu) / th;
}

inline double joe_la(double th, double u) { return th * std::log1p(-u); }  // log((1-u)^th)

inline double joe_log_a(double th, double u, double v) {
    // log(A), A = (1-u)^th + (1-v)^th - (1-u)^th (1-v)^th
    const double la = joe_la(th, u), lb = joe_la(th, v);
    const double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m) - std::exp(la + lb - m));
}

inline double joe_logpdf(double th, double u, double v) {
    const double la = joe_la(th, u), lb = joe_la(th, v);
    const double lA = joe_log_a(th, u, v);
    const double tail = th - 1.0 + std::exp(la) + std::exp(lb) - std::exp(la + lb);
    return (1.0 / th - 2.0) * lA + (th - 1.0) * (std::log1p(-u) + std::log1p(-v)) + std::log(tail);
}

inline double joe_cdf(double th, double u, double v) {
    return -std::expm1(joe_log_a(th, u, v) / th);
}

inline double joe_h(double th, double u, double v) {
    const double la = joe_la(th, u);
    const double lA = joe_log_a(th, u, v);
    return std::exp((1.0 / th - 1.0) * lA + (th - 1.0) * std::log1p(-v) + std::log1p(-std::exp(la)));
}

inline double base_logpdf(Family f, const std::vector<double>& p, double u, double v) {
    switch (f) {
        case Family::independence: return 0.0;
        case Family::gauss: return gauss_logpdf(p[0], u, v);
        case Family::student_t: return t_logpdf(p[0], p[1], u, v);
        case Family::clayton: return clayton_logpdf(p[0], u, v);
        case Family::gumbel: return gumbel_logpdf(p[0], u, v);
        case Family::frank: return frank_logpdf(p[0], u, v);
        case Family::joe: return joe_logpdf(p[0], u, v);
    }
    throw DomainError("base_logpdf: unknown family");
}

inline double base_h(Family f, const std::vector<double>& p, double u, double v) {
    double h;
    switch (f) {
        case Family::independence: return u;
        case Family::gauss: h = gauss_h(p[0], u, v); break;
        case Family::student_t: h = t_h(p[0], p[1], u, v); break;
        case Family::clayton: h = clayton_h(p[0], u, v); break;
        case Family::gumbel: h = gumbel_h(p[0], u, v); break;
        case Family::frank: h = frank_h(p[0], u, v); break;
        case Family::joe: h = joe_h(p[0], u, v); break;
        default: throw DomainError("base_h: unknown family");
    }
    return std::min(std::max(h, 0.0), 1.0);
}

// bracketed Newton on the monotone h-function, bisection fallback
inline double solve_hinv(Family f, const std::vector<double>& p, double target, double v) {
    double lo = u_eps, hi = 1.0 - u_eps;
    double x = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double hx = base_h(f, p, x, v);
        const double err = hx - target;
        if (std::fabs(err) < 1e-11 || hi - lo < 1e-16) return x;
        if (err > 0.0) hi = x; else lo = x;
        const double dens = std::exp(base_logpdf(f, p, x, v));
        double next = dens > 1e-12 ? x - err / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw ConvergenceError(std::string("hinv(") + family_name(f) + "): no convergence after 200 steps");
}

inline double base_hinv(Family f, const std::vector<double>& p, double pr, double v) {
    double u;
    switch (f) {
        case Family::independence: return pr;
        case Family::gauss: u = gauss_hinv(p[0], pr, v); break;
        case Family::student_t: u = t_hinv(p[0], p[1], pr, v); break;
        case Family::clayton: u = clayton_hinv(p[0], pr, v); break;
        case Family::frank: u = frank_hinv(p[0], pr, v); break;
        case Family::gumbel:
        case Family::joe: u = solve_hinv(f, p, pr, v); break;
        default: throw DomainError("base_hinv: unknown family");
    }
    return clamp_unit(u);
}

inline double base_cdf(Family f, const std::vector<double>& p, double u, double v) {
    switch (f) {
        case Family::independence: return u * v;
        case Family::clayton: return clayton_cdf(p[0], u, v);
        case Family::gumbel: return gumbel_cdf(p[0], u, v);
        case Family::frank: return frank_cdf(p[0], u, v);
        case Family::joe: return joe_cdf(p[0], u, v);
        case Family::gauss:
        case Family::student_t: {
            // C(u,v) = int_0^v h(u|t) dt; the h-function is the closed-form
            // inner integral of the density over the first coordinate.
            auto integrand = [&](double t) { return base_h(f, p, u, clamp_unit(t)); };
            return math::integrate_adaptive(integrand, 0.0, v, 1e-12);
        }
    }
    throw DomainError("base_cdf: unknown family");
}

} // namespace pc_detail

// ---- public operations (rotation-aware) ------------------------------------

inline double pair_logpdf(const PairCopulaSpec& s, double u, double v) {
    pc_detail::require_open_unit(u, "pair pdf");
    pc_detail::require_open_unit(v, "pair pdf");
    u = pc_detail::clamp_unit(u);
    v = pc_detail::clamp_unit(v);
    if (s.family == Family::independence) return 0.0;
    switch (s.rotation) {
        case Rotation::r0: return pc_detail::base_logpdf(s.family, s.params, u, v);
        case Rotation::r90: return pc_detail::base_logpdf(s.family, s.params, v, 1.0 - u);
        case Rotation::r180: return pc_detail::base_logpdf(s.family, s.params, 1.0 - u, 1.0 - v);
        case Rotation::r270: return pc_detail::base_logpdf(s.family, s.params, 1.0 - v, u);
    }
    throw DomainError("pair_logpdf: unknown rotation");
}

inline double pair_pdf(const PairCopulaSpec& s, double u, double v) {
    const double lp = pair_logpdf(s, u, v);
    const double val = std::exp(lp);
    if (!std::isfinite(val)) throw NumericalError("pair pdf: non-finite density value");
    return val;
}

inline double pair_cdf(const PairCopulaSpec& s, double u, double v) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw DomainError("pair cdf: argument outside [0,1]");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    u = pc_detail::clamp_unit(u);
    v = pc_detail::clamp_unit(v);
    if (s.family == Family::independence) return u * v;
    using namespace pc_detail;
    switch (s.rotation) {
        case Rotation::r0: return base_cdf(s.family, s.params, u, v);
        case Rotation::r90: return v - base_cdf(s.family, s.params, 1.0 - u, v);
        case Rotation::r180: return u + v - 1.0 + base_cdf(s.family, s.params, 1.0 - u, 1.0 - v);
        case Rotation::r270: return u - base_cdf(s.family, s.params, u, 1.0 - v);
    }
    throw DomainError("pair_cdf: unknown rotation");
}

// h(u|v) = dC(u,v)/dv: conditional cdf of the first argument given the second
inline double hfunc2(const PairCopulaSpec& s, double u, double v) {
    pc_detail::require_open_unit(u, "hfunc");
    pc_detail::require_open_unit(v, "hfunc");
    u = pc_detail::clamp_unit(u);
    v = pc_detail::clamp_unit(v);
    if (s.family == Family::independence) return u;
    using namespace pc_detail;
    switch (s.rotation) {
        case Rotation::r0: return base_h(s.family, s.params, u, v);
        case Rotation::r90: return 1.0 - base_h(s.family, s.params, 1.0 - u, v);
        case Rotation::r180: return 1.0 - base_h(s.family, s.params, 1.0 - u, 1.0 - v);
        case Rotation::r270: return base_h(s.family, s.params, u, 1.0 - v);
    }
    throw DomainError("hfunc2: unknown rotation");
}

// h(v|u) = dC(u,v)/du: conditional cdf of the second argument given the first
inline double hfunc1(const PairCopulaSpec& s, double u, double v) {
    pc_detail::require_open_unit(u, "hfunc");
    pc_detail::require_open_unit(v, "hfunc");
    u = pc_detail::clamp_unit(u);
    v = pc_detail::clamp_unit(v);
    if (s.family == Family::independence) return v;
    using namespace pc_detail;
    switch (s.rotation) {
        case Rotation::r0: return base_h(s.family, s.params, v, u);
        case Rotation::r90: return base_h(s.family, s.params, v, 1.0 - u);
        case Rotation::r180: return 1.0 - base_h(s.family, s.params, 1.0 - v, 1.0 - u);
        case Rotation::r270: return 1.0 - base_h(s.family, s.params, 1.0 - v, u);
    }
    throw DomainError("hfunc1: unknown rotation");
}

inline double hinv2(const PairCopulaSpec& s, double p, double v) {
    pc_detail::require_open_unit(p, "hinv");
    pc_detail::require_open_unit(v, "hinv");
    p = pc_detail::clamp_unit(p);
    v = pc_detail::clamp_unit(v);
    if (s.family == Family::independence) return p;
    using namespace pc_detail;
    switch (s.rotation) {
        case Rotation::r0: return base_hinv(s.family, s.params, p, v);
        case Rotation::r90: return 1.0 - base_hinv(s.family, s.params, 1.0 - p, v);
        case Rotation::r180: return 1.0 - base_hinv(s.family, s.params, 1.0 - p, 1.0 - v);
        case Rotation::r270: return base_hinv(s.family, s.params, p, 1.0 - v);
    }
    throw DomainError("hinv2: unknown rotation");
}

inline double hinv1(const PairCopulaSpec& s, double p, double u) {
    pc_detail::require_open_unit(p, "hinv");
    pc_detail::require_open_unit(u, "hinv");
    p = pc_detail::clamp_unit(p);
    u = pc_detail::clamp_unit(u);
    if (s.family == Family::independence) return p;
    using namespace pc_detail;
    switch (s.rotation) {
        case Rotation::r0: return base_hinv(s.family, s.params, p, u);
        case Rotation::r90: return base_hinv(s.family, s.params, p, 1.0 - u);
        case Rotation::r180: return 1.0 - base_hinv(s.family, s.params, 1.0 - p, 1.0 - u);
        case Rotation::r270: return 1.0 - base_hinv(s.family, s.params, 1.0 - p, u);
    }
    throw DomainError("hinv1: unknown rotation");
}

// spec-facing aliases: hfunc(u | given v), hinv(p | given v)
inline double hfunc(const PairCopulaSpec& s, double u, double v) { return hfunc2(s, u, v); }
inline double hinv(const PairCopulaSpec& s, double p, double v) { return hinv2(s, p, v); }

// ---- Kendall's tau ----------------------------------------------------------

inline double param_to_tau(const PairCopulaSpec& s) {
    PairCopulaSpec::validate(s);
    double tau;
    switch (s.family) {
        case Family::independence: return 0.0;
        case Family::gauss:
        case Family::student_t: tau = 2.0 / math::pi * std::asin(s.params[0]); break;
        case Family::clayton: tau = s.params[0] / (s.params[0] + 2.0); break;
        case Family::gumbel: tau = 1.0 - 1.0 / s.params[0]; break;
        case Family::frank: {
            const double th = std::fabs(s.params[0]);
            tau = 1.0 - 4.0 / th * (1.0 - math::debye1(th));
            if (s.params[0] < 0.0) tau = -tau;
            break;
        }
        case Family::joe: {
            const double th = s.params[0];
            auto integrand = [th](double w) {
                if (w <= 0.0) return 0.0;
                const double wt = std::exp(th * std::log(w));  // w^th
                const double one_m = -std::expm1(th * std::log(w));  // 1 - w^th
                if (one_m <= 0.0) return 0.0;
                return std::log(one_m) * one_m / (th * wt / w);  // / (th * w^{th-1})
            };
            tau = 1.0 + 4.0 * math::integrate_gl64(integrand, 0.0, 1.0);
            break;
        }
        default: throw DomainError("param_to_tau: unknown family");
    }
    if (s.rotation == Rotation::r90 || s.rotation == Rotation::r270) tau = -tau;
    return tau;
}

inline std::vector<double> tau_to_param(Family f, double tau) {
    switch (f) {
        case Family::independence:
            if (tau != 0.0) throw DomainError("tau_to_param: independence attains only tau = 0");
            return {};
        case Family::gauss:
            if (!(tau > -1.0 && tau < 1.0)) throw DomainError("tau_to_param(gauss): tau outside (-1,1)");
            return {std::sin(math::pi * tau / 2.0)};
        case Family::student_t:
            if (!(tau > -1.0 && tau < 1.0)) throw DomainError("tau_to_param(student-t): tau outside (-1,1)");
            return {std::sin(math::pi * tau / 2.0), 10.0};  // nu is not tau-identified; midrange start
        case Family::clayton:
            if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau_to_param(clayton): tau outside (0,1)");
            return {2.0 * tau / (1.0 - tau)};
        case Family::gumbel:
            if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("tau_to_param(gumbel): tau outside [0,1)");
            return {1.0 / (1.0 - tau)};
        case Family::frank: {
            if (tau == 0.0) throw DomainError("tau_to_param(frank): tau = 0 unattainable");
            const double a = std::fabs(tau);
            auto tau_of = [](double th) { return param_to_tau({Family::frank, Rotation::r0, {th}}); };
            if (a >= tau_of(50.0)) throw DomainError("tau_to_param(frank): |tau| outside attainable range");
            double lo = 1e-6, hi = 50.0;
            if (a <= tau_of(lo)) return {tau > 0.0 ? lo : -lo};
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double t = tau_of(mid);
                if (std::fabs(t - a) < 1e-8) return {tau > 0.0 ? mid : -mid};
                if (t < a) lo = mid; else hi = mid;
            }
            return {tau > 0.0 ? 0.5 * (lo + hi) : -0.5 * (lo + hi)};
        }
        case Family::joe: {
            auto tau_of = [](double th) { return param_to_tau({Family::joe, Rotation::r0, {th}}); };
            const double lo0 = 1.0 + 1e-6;
            if (!(tau > 0.0) || tau >= tau_of(50.0))
                throw DomainError("tau_to_param(joe): tau outside attainable range");
            double lo = lo0, hi = 50.0;
            if (tau <= tau_of(lo)) return {lo};
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double t = tau_of(mid);
                if (std::fabs(t - tau) < 1e-8) return {mid};
                if (t < tau) lo = mid; else hi = mid;
            }
            return {0.5 * (lo + hi)};
        }
    }
    throw DomainError("tau_to_param: unknown family");
}

// ---- log-likelihood derivatives ---------------------------------------------

struct PairDerivs {
    int p = 0;
    std::array<double, 2> score{};
    std::array<std::array<double, 2>, 2> hessian{};
};

// Central finite differences of ln c(u,v;theta); step cbrt(machine eps) scaled.
inline PairDerivs loglik_derivs(const PairCopulaSpec& s, double u, double v) {
    pc_detail::require_open_unit(u, "loglik_derivs");
    pc_detail::require_open_unit(v, "loglik_derivs");
    const int p = param_count(s.family);
    PairDerivs out;
    out.p = p;
    if (p == 0) return out;

    const double step_scale = std::cbrt(std::numeric_limits<double>::epsilon());
    std::array<double, 2> h{};
    for (int j = 0; j < p; ++j) {
        const double th = s.params[static_cast<std::size_t>(j)];
        h[static_cast<std::size_t>(j)] = step_scale * std::max(1.0, std::fabs(th));
        const auto dom = param_domain(s.family, j);
        if (!dom.interior(th - h[static_cast<std::size_t>(j)], 0.0) || !dom.interior(th + h[static_cast<std::size_t>(j)], 0.0))
            throw NumericalError("loglik_derivs: finite-difference stencil leaves the parameter domain");
        if (s.family == Family::frank && std::fabs(th) <= h[static_cast<std::size_t>(j)])
            throw NumericalError("loglik_derivs: frank theta too close to zero for the stencil");
    }
    auto f = [&](double d0, double d1) {
        PairCopulaSpec t = s;
        t.params[0] += d0;
        if (p > 1) t.params[1] += d1;
        return pair_logpdf(t, u, v);
    };
    const double f0 = f(0.0, 0.0);
    for (int j = 0; j < p; ++j) {
        const double hj = h[static_cast<std::size_t>(j)];
        const double fp = j == 0 ? f(hj, 0.0) : f(0.0, hj);
        const double fm = j == 0 ? f(-hj, 0.0) : f(0.0, -hj);
        out.score[static_cast<std::size_t>(j)] = (fp - fm) / (2.0 * hj);
        out.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = (fp - 2.0 * f0 + fm) / (hj * hj);
    }
    if (p == 2) {
        const double h0 = h[0], h1 = h[1];
        const double mixed =
            (f(h0, h1) - f(h0, -h1) - f(-h0, h1) + f(-h0, -h1)) / (4.0 * h0 * h1);
        out.hessian[0][1] = mixed;
        out.hessian[1][0] = mixed;
    }
    return out;
}

} // namespace vinegof
