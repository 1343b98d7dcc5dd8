#pragma once

#include <Eigen/Core>

namespace optcompact::detail {

// X, Y order matrices on m = -M..M; shared by the double and extended
// precision assemblers so both see identical formulas.
template <class T>
void fill_order_matrices(int d, int p, int M,
                         Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& X,
                         Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& Y) {
    const int n = 2 * M + 1;
    const int cols = d + p + 1;
    X.setZero(n, cols);
    Y.setZero(n, cols);
    for (int i = 0; i < n; ++i) {
        const T m = T(i - M);
        // powers and factorials built incrementally, 0^0 = 1
        T pw = T(1), fact = T(1);
        for (int j = 0; j < cols; ++j) {
            if (j > 0) {
                pw *= m;
                fact *= T(j);
            }
            X(i, j) = j < d ? pw : pw / fact;
        }
        pw = T(1);
        fact = T(1);
        for (int r = 0; r <= p; ++r) {
            if (r > 0) {
                pw *= m;
                fact *= T(r);
            }
            Y(i, d + r) = pw / fact;
        }
    }
}

}  // namespace optcompact::detail
