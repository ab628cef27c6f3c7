#ifndef SLICENET_SRC_LSTSQ_HPP
#define SLICENET_SRC_LSTSQ_HPP

#include <algorithm>
#include <cmath>
#include <vector>

namespace slicenet::detail {

// Least-squares solve of A z ~= b by Householder QR with column pivoting.
// A is m x n column-major and is destroyed, as is b. Columns beyond the
// detected numerical rank get z = 0.
inline std::vector<double> lstsq(std::vector<double>& a, int m, int n, std::vector<double>& b,
                                 double rcond = 1e-12) {
    std::vector<int> perm(n);
    for (int j = 0; j < n; ++j) perm[j] = j;
    std::vector<double> colnorm2(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) colnorm2[j] += a[j * m + i] * a[j * m + i];

    const int steps = std::min(m, n);
    double r00 = 0.0;
    int rank = steps;

    for (int k = 0; k < steps; ++k) {
        int pivot = k;
        for (int j = k + 1; j < n; ++j)
            if (colnorm2[j] > colnorm2[pivot]) pivot = j;
        if (pivot != k) {
            for (int i = 0; i < m; ++i) std::swap(a[k * m + i], a[pivot * m + i]);
            std::swap(colnorm2[k], colnorm2[pivot]);
            std::swap(perm[k], perm[pivot]);
        }

        double norm = 0.0;
        for (int i = k; i < m; ++i) norm += a[k * m + i] * a[k * m + i];
        norm = std::sqrt(norm);
        if (k == 0) r00 = norm;
        if (norm == 0.0 || norm <= rcond * r00) {
            rank = k;
            break;
        }

        // Householder vector v lives in column k, rows k..m-1.
        double alpha = a[k * m + k] >= 0 ? -norm : norm;
        a[k * m + k] -= alpha;
        double vtv = 0.0;
        for (int i = k; i < m; ++i) vtv += a[k * m + i] * a[k * m + i];

        for (int j = k + 1; j < n; ++j) {
            double vtx = 0.0;
            for (int i = k; i < m; ++i) vtx += a[k * m + i] * a[j * m + i];
            double c = 2.0 * vtx / vtv;
            for (int i = k; i < m; ++i) a[j * m + i] -= c * a[k * m + i];
        }
        double vtb = 0.0;
        for (int i = k; i < m; ++i) vtb += a[k * m + i] * b[i];
        double cb = 2.0 * vtb / vtv;
        for (int i = k; i < m; ++i) b[i] -= cb * a[k * m + i];

        a[k * m + k] = alpha;
        for (int j = k + 1; j < n; ++j) {
            colnorm2[j] = 0.0;
            for (int i = k + 1; i < m; ++i) colnorm2[j] += a[j * m + i] * a[j * m + i];
        }
    }

    std::vector<double> z(n, 0.0);
    for (int i = rank - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < rank; ++j) s -= a[j * m + i] * z[perm[j]];
        z[perm[i]] = s / a[i * m + i];
    }
    return z;
}

} // namespace slicenet::detail

#endif
