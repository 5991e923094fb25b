#include "vulnfwd/quadrature.hpp"

#include "vulnfwd/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace vulnfwd {

namespace {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK qk15 constants).
// Odd-index Kronrod abscissae are the embedded Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double center = 0.5 * (a + b);

    const double fc = f(center);
    double result_g = fc * kWg[3];
    double result_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        result_k += kWgk[j] * fsum;
        if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
    }
    result_k *= half;
    result_g *= half;
    return {result_k, std::fabs(result_k - result_g)};
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        const QuadConfig& cfg) {
    QuadResult out;
    if (a == b) return out;

    struct Segment {
        double a, b;
        int level;
    };
    const double total_len = std::fabs(b - a);
    std::vector<Segment> stack;
    stack.push_back({a, b, 0});

    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        const PanelEstimate est = gk15(f, seg.a, seg.b);
        const double budget = cfg.abs_tol * std::fabs(seg.b - seg.a) / total_len;
        if (est.err <= budget || seg.level >= cfg.max_levels) {
            out.value += est.kronrod;
            out.abs_error += est.err;
            if (est.err > budget) out.converged = false;
        } else {
            const double mid = 0.5 * (seg.a + seg.b);
            stack.push_back({seg.a, mid, seg.level + 1});
            stack.push_back({mid, seg.b, seg.level + 1});
        }
    }
    return out;
}

double integrate_gk_or_throw(const std::function<double(double)>& f, double a, double b,
                             const QuadConfig& cfg) {
    const QuadResult r = integrate_gk(f, a, b, cfg);
    if (!r.converged) {
        throw QuadratureNonConvergence(
            "adaptive quadrature did not reach abs_tol=" + std::to_string(cfg.abs_tol) +
            " within " + std::to_string(cfg.max_levels) + " bisection levels");
    }
    return r.value;
}

}  // namespace vulnfwd
