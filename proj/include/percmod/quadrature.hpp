#ifndef PERCMOD_QUADRATURE_HPP
#define PERCMOD_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

#include <percmod/errors.hpp>

namespace percmod::quad
{

template <class T>
struct Estimate {
    T value{};
    double abs_err = 0.0;
    int evaluations = 0;
};

namespace detail
{

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                             0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v)
{
    return std::abs(v);
}
inline double magnitude(const std::complex<double> &v)
{
    return std::abs(v);
}

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double err;
    bool operator<(const Panel &o) const
    {
        return err < o.err;
    }
};

template <class F>
auto gk15(F &f, double a, double b)
{
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[0] = f(c);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xk[j];
        fv[1 + 2 * j] = f(c - dx);
        fv[2 + 2 * j] = f(c + dx);
    }
    T kronrod = fv[0] * wk[7];
    T gauss = fv[0] * wg[3];
    for (int j = 0; j < 7; ++j) {
        kronrod += (fv[1 + 2 * j] + fv[2 + 2 * j]) * wk[j];
        if (j % 2 == 1) {
            gauss += (fv[1 + 2 * j] + fv[2 + 2 * j]) * wg[j / 2];
        }
    }
    // QUADPACK error heuristic: scale the Gauss/Kronrod difference by the
    // integral of |f - mean| over the panel.
    const T mean = kronrod * 0.5;
    double resasc = wk[7] * magnitude(fv[0] - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += wk[j] * (magnitude(fv[1 + 2 * j] - mean) + magnitude(fv[2 + 2 * j] - mean));
    }
    resasc *= std::abs(h);
    const T value = kronrod * h;
    double err = magnitude((kronrod - gauss) * h);
    if (resasc > 0.0 && err > 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    return Panel<T>{a, b, value, std::max(err, 50.0 * 2.22e-16 * magnitude(value))};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod on [a, b]: the panel with the largest error
// estimate is bisected until the summed estimate meets max(abs_tol, rel_tol |I|).
template <class F>
auto integrate(F &&f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-12, int max_panels = 2000)
{
    using T = std::decay_t<decltype(f(a))>;
    Estimate<T> out;
    if (a == b) {
        return out;
    }
    std::priority_queue<detail::Panel<T>> heap;
    heap.push(detail::gk15(f, a, b));
    out.evaluations = 15;
    T total = heap.top().value;
    double err = heap.top().err;
    while (err > std::max(abs_tol, rel_tol * detail::magnitude(total))) {
        if (static_cast<int>(heap.size()) >= max_panels) {
            throw precision_error("adaptive quadrature did not converge", err);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        heap.push(left);
        heap.push(right);
        total = total - worst.value + left.value + right.value;
        err = err - worst.err + left.err + right.err;
    }
    // Re-sum from the panels so the reported value carries no drift from the running updates.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().err;
        heap.pop();
    }
    out.value = sum;
    out.abs_err = esum;
    return out;
}

} // namespace percmod::quad

#endif
