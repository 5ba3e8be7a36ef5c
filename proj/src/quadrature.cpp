#include "ddegrowth/quadrature.hpp"

#include "ddegrowth/errors.hpp"
#include "ddegrowth/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace ddegrowth {

namespace {

// Kronrod abscissae; the odd entries (1, 3, 5, 7) are the Gauss 7 nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    int depth;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

double checked(const std::function<double(double)>& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        throw NumericError("quadrature: integrand is not finite at v = " + format_double(x));
    }
    return y;
}

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, center);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = checked(f, center - dx) + checked(f, center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("quadrature: need finite a <= b");
    }
    if (a == b) {
        return QuadratureResult{};
    }

    std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
    double total = 0.0;
    double total_error = 0.0;

    double lo = a;
    double width = 1.0;
    while (lo < b) {
        const double hi = (b - lo <= width) ? b : lo + width;
        Panel p = gauss_kronrod(f, lo, hi, 0);
        total += p.value;
        total_error += p.error;
        queue.push(p);
        lo = hi;
        if (hi - a >= 2.0) {
            width = hi - a;
        }
    }

    while (total_error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
        const Panel worst = queue.top();
        if (worst.depth >= options.max_depth || queue.size() >= options.max_panels) {
            throw NumericError("quadrature did not converge on [" + format_double(a) + ", " + format_double(b) +
                               "]: value " + format_double(total) + ", error estimate " +
                               format_double(total_error) + ", worst panel [" + format_double(worst.a) + ", " +
                               format_double(worst.b) + "] at depth " + std::to_string(worst.depth));
        }
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
        Panel right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum from the panels to shed drift from the incremental updates.
    QuadratureResult out;
    out.panels = queue.size();
    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : panels) {
        out.value += p.value;
        out.error += p.error;
    }
    return out;
}

}  // namespace ddegrowth
