#include "helixlab/fd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helixlab {

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
    const int n = static_cast<int>(nodes.size());
    const int m = order;
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

std::vector<double> fd_derive_strided(const std::vector<double>& values, double h,
                                      int order, int stride) {
    const int n = static_cast<int>(values.size());
    const int win = 7;
    const int span = (win - 1) * stride;
    if (stride < 1 || n <= span)
        throw std::invalid_argument("fd_derive_strided: too few samples for the stride");

    std::vector<double> offsets(win);
    for (int i = 0; i < win; ++i) offsets[i] = static_cast<double>(i * stride);
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(span) + 1);

    double hm = 1.0;
    for (int k = 0; k < order; ++k) hm *= h;

    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int start = std::clamp(i - span / 2, 0, n - 1 - span);
        const int off = i - start;
        std::vector<double>& wi = weights[static_cast<std::size_t>(off)];
        if (wi.empty()) wi = fd_weights(static_cast<double>(off), offsets, order);
        double acc = 0.0;
        for (int k = 0; k < win; ++k) acc += wi[k] * values[start + k * stride];
        out[i] = acc / hm;
    }
    return out;
}

std::vector<double> fd_derive(const std::vector<double>& values, double h, int order) {
    return fd_derive_strided(values, h, order, 1);
}

std::vector<double> fd_derive_auto(const std::vector<double>& values, double h, int order) {
    const int n = static_cast<int>(values.size());
    int stride = static_cast<int>(std::lround(5e-3 / h));
    stride = std::max(1, std::min(stride, (n - 1) / 6));
    return fd_derive_strided(values, h, order, stride);
}

std::vector<double> cumulative_integral(const std::vector<double>& values, double h) {
    const int n = static_cast<int>(values.size());
    if (n < 4) throw std::invalid_argument("cumulative_integral needs at least 4 samples");
    std::vector<double> out(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double step;
        if (i == 0) {
            step = h * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]) / 24.0;
        } else if (i + 2 >= n) {
            step = h * (values[n - 4] - 5.0 * values[n - 3] + 19.0 * values[n - 2] +
                        9.0 * values[n - 1]) / 24.0;
        } else {
            step = h * (-values[i - 1] + 13.0 * values[i] + 13.0 * values[i + 1] -
                        values[i + 2]) / 24.0;
        }
        out[i + 1] = out[i] + step;
    }
    return out;
}

}  // namespace helixlab
