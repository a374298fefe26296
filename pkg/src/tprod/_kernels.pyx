# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched matrix products over the middle axis.

Operands are C-contiguous (m, B, k) / (k, B, n) stacks whose middle slices
``[:, b, :]`` are row-major matrices with leading dimension B*k (resp.
B*n), so BLAS gemm can run on them in place, one call per slice, without
gathering the batch into contiguous matrices first.
"""

from scipy.linalg.cython_blas cimport dgemm, zgemm


def slicewise_matmul_f64(double[:, :, ::1] a, double[:, :, ::1] x,
                         double[:, :, ::1] y):
    cdef int m = <int> a.shape[0]
    cdef int nb = <int> a.shape[1]
    cdef int k = <int> a.shape[2]
    cdef int n = <int> x.shape[2]
    # row-major slices seen column-major: Y_b^T = X_b^T A_b^T
    cdef int lda = nb * k
    cdef int ldx = nb * n
    cdef int ldy = nb * n
    cdef double one = 1.0, zero = 0.0
    cdef Py_ssize_t b
    with nogil:
        for b in range(nb):
            dgemm("N", "N", &n, &m, &k, &one,
                  &x[0, b, 0], &ldx, &a[0, b, 0], &lda,
                  &zero, &y[0, b, 0], &ldy)


def slicewise_matmul_c128(double complex[:, :, ::1] a,
                          double complex[:, :, ::1] x,
                          double complex[:, :, ::1] y):
    cdef int m = <int> a.shape[0]
    cdef int nb = <int> a.shape[1]
    cdef int k = <int> a.shape[2]
    cdef int n = <int> x.shape[2]
    cdef int lda = nb * k
    cdef int ldx = nb * n
    cdef int ldy = nb * n
    cdef double complex one = 1.0, zero = 0.0
    cdef Py_ssize_t b
    with nogil:
        for b in range(nb):
            zgemm("N", "N", &n, &m, &k, &one,
                  &x[0, b, 0], &ldx, &a[0, b, 0], &lda,
                  &zero, &y[0, b, 0], &ldy)
