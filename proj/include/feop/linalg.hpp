#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace feop {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    void set_zero() { data.assign(data.size(), 0.0); }
};

// C = A * B^T   (A: m x k, B: n x k, C: m x n)
void matmul_abt(const Matrix& a, const Matrix& b, Matrix& c);
// C = A * B     (A: m x k, B: k x n, C: m x n)
void matmul_ab(const Matrix& a, const Matrix& b, Matrix& c);
// C = A^T * B   (A: m x k, B: m x n, C: k x n)
void matmul_atb(const Matrix& a, const Matrix& b, Matrix& c);

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed-sparse-row matrix. Column indices are sorted within each row;
/// duplicate triplets are summed during construction.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    static CsrMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);

    void matvec(const double* x, double* y) const;
    void matvec_transposed(const double* x, double* y) const;
    std::vector<double> matvec(const std::vector<double>& x) const;
    std::vector<double> matvec_transposed(const std::vector<double>& x) const;

    double at(int i, int j) const;  // 0 when the entry is absent
    double max_abs() const;
    int bandwidth() const;          // max |i - j| over stored nonzeros
    double symmetry_defect() const; // max |A_ij - A_ji|
    Matrix to_dense() const;
    void write_triplets(std::ostream& os) const;  // "row col value" lines
};

/// LU factorization with partial pivoting. A pivot smaller than
/// 1e-14 * max|A| raises SingularMatrixError.
struct DenseLu {
    Matrix lu;
    std::vector<int> piv;
    int n = 0;
};

DenseLu lu_factor(Matrix a);
void lu_solve(const DenseLu& f, const double* b, double* x);
std::vector<double> lu_solve(const DenseLu& f, const std::vector<double>& b);

/// Banded LU with partial pivoting (LAPACK-style band storage with kl extra
/// fill rows). Used for the large 1D systems where the matrix is tri- or
/// penta-diagonal in coordinate-ordered DOF numbering.
struct BandLu {
    int n = 0;
    int kl = 0;
    int ku = 0;
    Matrix ab;  // (2*kl + ku + 1) x n
    std::vector<int> piv;
};

BandLu band_factor(const CsrMatrix& a);
void band_solve(const BandLu& f, const double* b, double* x);
std::vector<double> band_solve(const BandLu& f, const std::vector<double>& b);

/// Cholesky test for symmetric positive definiteness: returns false as soon
/// as a pivot fails to be positive.
bool is_positive_definite(Matrix a);

/// Either factorization behind one solve interface; picks banded storage for
/// narrow-band matrices, dense otherwise.
class LinearSolver {
public:
    explicit LinearSolver(const CsrMatrix& a);
    std::vector<double> solve(const std::vector<double>& b) const;
    bool banded() const { return use_band_; }

private:
    bool use_band_ = false;
    DenseLu dense_;
    BandLu band_;
};

}  // namespace feop
