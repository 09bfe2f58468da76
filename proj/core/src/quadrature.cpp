#include "gendiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gendiff {

namespace {

// (G7, K15) nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01,
};
constexpr double kKronrodWeights[8] = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02,
};
constexpr double kGaussWeights[4] = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01,
};

struct PanelResult {
    double kronrod;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double f0 = f(mid);
    double kronrod = kKronrodWeights[0] * f0;
    double gauss = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kKronrodWeights[i] * fsum;
        if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    const double diff = std::abs(kronrod - gauss);
    // standard QUADPACK-style error inflation
    const double err = diff > 0.0 ? diff * std::min(1.0, std::pow(200.0 * diff, 0.5)) : 0.0;
    return {kronrod, std::max(err, diff)};
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts) {
    if (!(b > a)) return {0.0, 0.0, true};

    struct Panel {
        double a, b, value, error;
        int depth;
    };
    PanelResult first = gk15(f, a, b);
    std::vector<Panel> heap{{a, b, first.kronrod, first.error, 0}};
    auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::make_heap(heap.begin(), heap.end(), cmp);

    double total = first.kronrod;
    double total_err = first.error;
    int panels = 1;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           panels < opts.max_panels) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Panel worst = heap.back();
        heap.pop_back();
        if (worst.depth >= opts.max_depth || worst.b - worst.a < 1e-300) {
            // cannot refine further; put it back and stop
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        PanelResult left = gk15(f, worst.a, mid);
        PanelResult right = gk15(f, mid, worst.b);
        total += left.kronrod + right.kronrod - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back({worst.a, mid, left.kronrod, left.error, worst.depth + 1});
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back({mid, worst.b, right.kronrod, right.error, worst.depth + 1});
        std::push_heap(heap.begin(), heap.end(), cmp);
        ++panels;
    }
    // re-sum for a sharper error estimate
    total = 0.0;
    total_err = 0.0;
    for (const Panel& p : heap) {
        total += p.value;
        total_err += p.error;
    }
    const bool ok = total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) * 4.0;
    return {total, total_err, ok};
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 const QuadOptions& opts) {
    double total = 0.0, err = 0.0;
    double lo = a;
    double width = 1.0;
    double prev_mass = -1.0;
    int decaying = 0;
    for (int k = 0; k < 64; ++k) {
        QuadResult w = integrate(f, lo, lo + width, opts);
        total += w.value;
        err += w.abs_error;
        const double mass = std::abs(w.value);
        if (prev_mass >= 0.0 && mass <= 0.5 * prev_mass) {
            ++decaying;
        } else if (mass > opts.abs_tol * 0.01) {
            decaying = 0;
        }
        if (decaying >= 2 && mass < std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
            // geometric decay with ratio <= 1/2: remainder bounded by last mass
            return {total, err + mass, true};
        }
        if (mass <= 1e-16 * (std::abs(total) + 1.0)) {
            return {total, err + mass, true};
        }
        prev_mass = mass;
        lo += width;
        width *= 2.0;
    }
    return {total, err, false};
}

TailReport classify_tail(const std::function<double(int)>& window_mass,
                         const TailOptions& opts) {
    TailReport rep;
    std::vector<double> mass(static_cast<std::size_t>(opts.max_windows));
    double partial = 0.0;
    int used = 0;
    for (int k = 0; k < opts.max_windows; ++k) {
        mass[static_cast<std::size_t>(k)] = std::max(0.0, window_mass(k));
        partial += mass[static_cast<std::size_t>(k)];
        used = k + 1;
        if (partial > opts.blow_up) {
            rep.verdict = TailVerdict::Divergent;
            rep.rule = "partial-sum blow-up";
            rep.partial_sum = partial;
            rep.windows_used = used;
            return rep;
        }
        // geometric decay: three consecutive ratios <= 0.7 and negligible mass
        if (k >= 3) {
            bool geo = true;
            for (int j = k - 2; j <= k; ++j) {
                const double prev = mass[static_cast<std::size_t>(j - 1)];
                const double cur = mass[static_cast<std::size_t>(j)];
                if (!(prev == 0.0 ? cur == 0.0 : cur <= 0.7 * prev)) geo = false;
            }
            if (geo && mass[static_cast<std::size_t>(k)] <
                           std::max(opts.negligible, 1e-12 * (partial + 1.0))) {
                rep.verdict = TailVerdict::Convergent;
                rep.rule = "geometric decay";
                rep.partial_sum = partial;
                rep.tail_bound = mass[static_cast<std::size_t>(k)] / 0.3;
                rep.windows_used = used;
                return rep;
            }
        }
    }
    rep.partial_sum = partial;
    rep.windows_used = used;

    // Exhausted masses: everything left is below noise.
    if (mass[static_cast<std::size_t>(used - 1)] <= opts.negligible &&
        mass[static_cast<std::size_t>(used - 2)] <= opts.negligible) {
        rep.verdict = TailVerdict::Convergent;
        rep.rule = "masses exhausted";
        rep.tail_bound = opts.negligible * 8;
        return rep;
    }

    // Decay analysis over the later windows through the log-ratios
    // rho_k = ln(mass_{k+1}/mass_k). Two regimes cover the families at hand:
    //   x^{-p}-type integrands  => rho_k ~ (1-p) ln2, constant;
    //   x^{-1} log^{-g} x types => rho_k ~ -g/(k+delta), so 1/rho_k is linear
    //                              in k with slope -1/g.
    const int fit_lo = std::max(3, opts.max_windows / 4);
    const int fit_hi = opts.max_windows - 2;
    std::vector<double> ks, ws, rhos;
    for (int k = fit_lo; k <= fit_hi; ++k) {
        const double m0 = mass[static_cast<std::size_t>(k)];
        const double m1 = mass[static_cast<std::size_t>(k + 1)];
        if (m0 <= 0.0 || m1 <= 0.0) continue;
        const double rho = std::log(m1 / m0);
        ks.push_back(static_cast<double>(k));
        rhos.push_back(rho);
        ws.push_back(std::abs(rho) > 1e-12 ? 1.0 / rho : 0.0);
    }
    if (ks.size() < 8) {
        rep.rule = "insufficient windows for the decay fit";
        return rep;
    }
    double mean_rho = 0.0;
    for (double r : rhos) mean_rho += r;
    mean_rho /= static_cast<double>(rhos.size());

    auto slope_of = [&](const std::vector<double>& y) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            sx += ks[i];
            sy += y[i];
            sxx += ks[i] * ks[i];
            sxy += ks[i] * y[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double w_slope = slope_of(ws);

    // harmonic regime: meaningful decay and 1/rho clearly linear in k
    if (mean_rho < -0.02 && std::abs(w_slope) >= 0.25) {
        const double g = -1.0 / w_slope;
        rep.fitted_exponent = g;
        if (g >= 1.15) {
            rep.verdict = TailVerdict::Convergent;
            rep.rule = "log-scale decay (g > 1)";
            rep.tail_bound = mass[static_cast<std::size_t>(used - 1)] *
                             static_cast<double>(used) / (g - 1.0);
            return rep;
        }
        if (g >= 0.0 && g <= 1.05) {
            rep.verdict = TailVerdict::Divergent;
            rep.rule = "log-scale masses not summable (g <= 1)";
            return rep;
        }
        rep.rule = "ambiguous log-scale exponent";
        return rep;
    }

    // power regime: near-constant ratios, mass_k ~ r^k with r = e^{mean_rho}
    rep.fitted_exponent = 1.0 - mean_rho / 0.6931471805599453;
    if (mean_rho <= -0.062) {
        const double r = std::exp(mean_rho);
        rep.verdict = TailVerdict::Convergent;
        rep.rule = "power-law decay (p > 1)";
        rep.tail_bound = mass[static_cast<std::size_t>(used - 1)] * r / (1.0 - r);
        return rep;
    }
    if (mean_rho >= -0.007) {
        rep.verdict = TailVerdict::Divergent;
        rep.rule = "window masses not summable (p <= 1)";
        return rep;
    }
    rep.rule = "ambiguous decay exponent";
    return rep;
}

} // namespace gendiff
