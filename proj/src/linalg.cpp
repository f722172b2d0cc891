#include "feop/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "feop/error.hpp"
#include "feop/kernels.hpp"

namespace feop {

namespace {
constexpr double kPivotRel = 1e-14;
}

void matmul_abt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    if (c.rows != a.rows || c.cols != b.rows) c = Matrix(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            ci[j] = kernels::dot(ai, b.row(j), a.cols);
        }
    }
}

void matmul_ab(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    if (c.rows != a.rows || c.cols != b.cols) c = Matrix(a.rows, b.cols);
    c.set_zero();
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t l = 0; l < a.cols; ++l) {
            if (ai[l] != 0.0) kernels::axpy(ai[l], b.row(l), ci, b.cols);
        }
    }
}

void matmul_atb(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    if (c.rows != a.cols || c.cols != b.cols) c = Matrix(a.cols, b.cols);
    c.set_zero();
    for (std::size_t m = 0; m < a.rows; ++m) {
        const double* am = a.row(m);
        const double* bm = b.row(m);
        for (std::size_t l = 0; l < a.cols; ++l) {
            if (am[l] != 0.0) kernels::axpy(am[l], bm, c.row(l), b.cols);
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            throw std::invalid_argument("CsrMatrix::from_triplets: index out of range");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_ptr.assign(n_rows + 1, 0);
    std::size_t i = 0;
    while (i < triplets.size()) {
        std::size_t j = i;
        double s = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            s += triplets[j].value;
            ++j;
        }
        m.col.push_back(triplets[i].col);
        m.val.push_back(s);
        ++m.row_ptr[triplets[i].row + 1];
        i = j;
    }
    for (int r = 0; r < n_rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void CsrMatrix::matvec(const double* x, double* y) const {
    for (int i = 0; i < n_rows; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void CsrMatrix::matvec_transposed(const double* x, double* y) const {
    std::fill(y, y + n_cols, 0.0);
    for (int i = 0; i < n_rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) y[col[k]] += val[k] * xi;
    }
}

std::vector<double> CsrMatrix::matvec(const std::vector<double>& x) const {
    assert(static_cast<int>(x.size()) == n_cols);
    std::vector<double> y(n_rows);
    matvec(x.data(), y.data());
    return y;
}

std::vector<double> CsrMatrix::matvec_transposed(const std::vector<double>& x) const {
    assert(static_cast<int>(x.size()) == n_rows);
    std::vector<double> y(n_cols);
    matvec_transposed(x.data(), y.data());
    return y;
}

double CsrMatrix::at(int i, int j) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        if (col[k] == j) return val[k];
    }
    return 0.0;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : val) m = std::max(m, std::fabs(v));
    return m;
}

int CsrMatrix::bandwidth() const {
    int bw = 0;
    for (int i = 0; i < n_rows; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            bw = std::max(bw, std::abs(i - col[k]));
        }
    }
    return bw;
}

double CsrMatrix::symmetry_defect() const {
    double d = 0.0;
    for (int i = 0; i < n_rows; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            d = std::max(d, std::fabs(val[k] - at(col[k], i)));
        }
    }
    return d;
}

Matrix CsrMatrix::to_dense() const {
    Matrix m(n_rows, n_cols);
    for (int i = 0; i < n_rows; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col[k]) = val[k];
    }
    return m;
}

void CsrMatrix::write_triplets(std::ostream& os) const {
    char buf[64];
    for (int i = 0; i < n_rows; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, col[k], val[k]);
            os << buf;
        }
    }
}

DenseLu lu_factor(Matrix a) {
    if (a.rows != a.cols) throw std::invalid_argument("lu_factor: matrix not square");
    const int n = static_cast<int>(a.rows);
    double amax = 0.0;
    for (double v : a.data) amax = std::max(amax, std::fabs(v));
    const double tol = kPivotRel * amax;

    DenseLu f;
    f.n = n;
    f.piv.resize(n);
    for (int j = 0; j < n; ++j) {
        int p = j;
        double best = std::fabs(a(j, j));
        for (int i = j + 1; i < n; ++i) {
            const double v = std::fabs(a(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > tol)) {
            throw SingularMatrixError("lu_factor: pivot " + std::to_string(best) +
                                      " below threshold at column " + std::to_string(j));
        }
        f.piv[j] = p;
        if (p != j) {
            for (int c = 0; c < n; ++c) std::swap(a(j, c), a(p, c));
        }
        const double d = a(j, j);
        for (int i = j + 1; i < n; ++i) {
            const double m = a(i, j) / d;
            a(i, j) = m;
            if (m != 0.0) kernels::axpy(-m, a.row(j) + j + 1, a.row(i) + j + 1, n - j - 1);
        }
    }
    f.lu = std::move(a);
    return f;
}

void lu_solve(const DenseLu& f, const double* b, double* x) {
    const int n = f.n;
    std::copy(b, b + n, x);
    // The factorization swaps full rows (L part included), so apply every
    // recorded interchange before the clean triangular solves.
    for (int j = 0; j < n; ++j) {
        if (f.piv[j] != j) std::swap(x[j], x[f.piv[j]]);
    }
    for (int j = 0; j < n; ++j) {
        const double xj = x[j];
        if (xj != 0.0) {
            for (int i = j + 1; i < n; ++i) x[i] -= f.lu(i, j) * xj;
        }
    }
    for (int j = n - 1; j >= 0; --j) {
        x[j] /= f.lu(j, j);
        const double xj = x[j];
        if (xj != 0.0) {
            for (int i = 0; i < j; ++i) x[i] -= f.lu(i, j) * xj;
        }
    }
}

std::vector<double> lu_solve(const DenseLu& f, const std::vector<double>& b) {
    assert(static_cast<int>(b.size()) == f.n);
    std::vector<double> x(f.n);
    lu_solve(f, b.data(), x.data());
    return x;
}

BandLu band_factor(const CsrMatrix& a) {
    if (a.n_rows != a.n_cols) throw std::invalid_argument("band_factor: matrix not square");
    const int n = a.n_rows;
    int kl = 0, ku = 0;
    for (int i = 0; i < n; ++i) {
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const int j = a.col[k];
            kl = std::max(kl, i - j);
            ku = std::max(ku, j - i);
        }
    }
    BandLu f;
    f.n = n;
    f.kl = kl;
    f.ku = ku;
    const int ldab = 2 * kl + ku + 1;
    f.ab = Matrix(ldab, n);
    // A(i,j) lives at ab(kl + ku + i - j, j); the top kl rows are fill space.
    auto entry = [&f, kl, ku](int i, int j) -> double& {
        return f.ab(kl + ku + i - j, j);
    };
    for (int i = 0; i < n; ++i) {
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            entry(i, a.col[k]) = a.val[k];
        }
    }
    const double tol = kPivotRel * a.max_abs();
    f.piv.resize(n);
    for (int j = 0; j < n; ++j) {
        const int last_row = std::min(j + kl, n - 1);
        int p = j;
        double best = std::fabs(entry(j, j));
        for (int i = j + 1; i <= last_row; ++i) {
            const double v = std::fabs(entry(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > tol)) {
            throw SingularMatrixError("band_factor: pivot below threshold at column " +
                                      std::to_string(j));
        }
        f.piv[j] = p;
        const int last_col = std::min(j + kl + ku, n - 1);
        if (p != j) {
            for (int c = j; c <= last_col; ++c) std::swap(entry(j, c), entry(p, c));
        }
        const double d = entry(j, j);
        for (int i = j + 1; i <= last_row; ++i) {
            const double m = entry(i, j) / d;
            entry(i, j) = m;
            if (m != 0.0) {
                for (int c = j + 1; c <= last_col; ++c) entry(i, c) -= m * entry(j, c);
            }
        }
    }
    return f;
}

void band_solve(const BandLu& f, const double* b, double* x) {
    const int n = f.n;
    const int kl = f.kl;
    const int ku = f.ku;
    auto entry = [&f, kl, ku](int i, int j) -> double {
        return f.ab(kl + ku + i - j, j);
    };
    std::copy(b, b + n, x);
    for (int j = 0; j < n; ++j) {
        if (f.piv[j] != j) std::swap(x[j], x[f.piv[j]]);
        const double xj = x[j];
        if (xj != 0.0) {
            const int last = std::min(j + kl, n - 1);
            for (int i = j + 1; i <= last; ++i) x[i] -= entry(i, j) * xj;
        }
    }
    for (int j = n - 1; j >= 0; --j) {
        x[j] /= entry(j, j);
        const double xj = x[j];
        if (xj != 0.0) {
            const int first = std::max(0, j - kl - ku);
            for (int i = first; i < j; ++i) x[i] -= entry(i, j) * xj;
        }
    }
}

std::vector<double> band_solve(const BandLu& f, const std::vector<double>& b) {
    assert(static_cast<int>(b.size()) == f.n);
    std::vector<double> x(f.n);
    band_solve(f, b.data(), x.data());
    return x;
}

bool is_positive_definite(Matrix a) {
    if (a.rows != a.cols) return false;
    const int n = static_cast<int>(a.rows);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    return true;
}

LinearSolver::LinearSolver(const CsrMatrix& a) {
    const int bw = a.bandwidth();
    // Banded pays off only for the long thin 1D systems.
    use_band_ = a.n_rows >= 256 && bw <= 16;
    if (use_band_) {
        band_ = band_factor(a);
    } else {
        dense_ = lu_factor(a.to_dense());
    }
}

std::vector<double> LinearSolver::solve(const std::vector<double>& b) const {
    return use_band_ ? band_solve(band_, b) : lu_solve(dense_, b);
}

}  // namespace feop
