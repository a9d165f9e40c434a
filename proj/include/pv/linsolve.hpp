#pragma once

#include <array>
#include <cmath>
#include <type_traits>
#include <utility>

namespace pv {

// In-place Gaussian elimination, A x = b -> b.  Returns false on a singular
// matrix.  Floating-point types pivot on the largest magnitude; exact types
// (e.g. rationals) take the first nonzero pivot.
template <typename T, size_t N>
bool solve_linear(std::array<std::array<T, N>, N>& A, std::array<T, N>& b) {
    for (size_t col = 0; col < N; ++col) {
        size_t pivot = col;
        if constexpr (std::is_floating_point_v<T>) {
            for (size_t r = col + 1; r < N; ++r)
                if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
            if (!(std::abs(A[pivot][col]) > T(0))) return false;
        } else {
            while (pivot < N && A[pivot][col] == 0) ++pivot;
            if (pivot == N) return false;
        }
        if (pivot != col) {
            std::swap(A[pivot], A[col]);
            std::swap(b[pivot], b[col]);
        }
        for (size_t r = col + 1; r < N; ++r) {
            if (A[r][col] == 0) continue;
            T f = A[r][col] / A[col][col];
            for (size_t c = col; c < N; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (size_t col = N; col-- > 0;) {
        T acc = b[col];
        for (size_t c = col + 1; c < N; ++c) acc -= A[col][c] * b[c];
        b[col] = acc / A[col][col];
    }
    return true;
}

}  // namespace pv
