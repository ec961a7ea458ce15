# File: matrix_service.py
# Description: Dense Hermitian matrix services.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import scipy.linalg


class InvalidCovarianceError(Exception):
    """
    Exception raised when a matrix that should be a covariance matrix cannot be factorized,
    because it has a negative eigenvalue beyond the numerical tolerance.
    """

    pass


class SingularMatrixError(Exception):
    """
    Exception raised when a Hermitian matrix is too badly conditioned to be inverted.
    """

    pass


class MatrixService:
    """
    Numerical kernels on dense M x M complex Hermitian matrices.

    Covariance matrices, sample covariance matrices and their regularized versions are all
    stored as plain numpy arrays of shape (M, M) and dtype complex128. This class collects the
    operations on them that need a numerical tolerance or a decomposition.
    """

    PSD_TOLERANCE = 1e-9
    MAX_CONDITION_NUMBER = 1e12

    @staticmethod
    def hermitian_part(matrix: np.ndarray) -> np.ndarray:
        """
        Return (A + A^H) / 2, which is Hermitian exactly.

        :param matrix: np.ndarray, square complex matrix
        :return: np.ndarray, Hermitian part of the matrix
        """

        return 0.5 * (matrix + matrix.conj().T)

    @staticmethod
    def is_hermitian(matrix: np.ndarray, tolerance: float = 0.0) -> bool:
        """
        Determine if the matrix is Hermitian.

        :param matrix: np.ndarray, matrix to check
        :param tolerance: float, largest allowed |A - A^H| entry relative to max|A|, 0.0 means exact
        :return: bool, True if the matrix is square and Hermitian within the tolerance
        """

        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            return False

        deviation = np.max(np.abs(matrix - matrix.conj().T), initial=0.0)
        scale = np.max(np.abs(matrix), initial=0.0)
        return deviation <= tolerance * scale

    @staticmethod
    def trace_product(first: np.ndarray, second: np.ndarray) -> complex:
        """
        Compute tr(A B) without forming the product.

        :param first: np.ndarray, matrix A of shape (M, N)
        :param second: np.ndarray, matrix B of shape (N, M)
        :return: complex, the trace of A B
        """

        return complex(np.sum(first * second.T))

    @staticmethod
    def relative_min_eigenvalue(matrix: np.ndarray) -> float:
        """
        Smallest eigenvalue divided by the largest absolute eigenvalue.

        :param matrix: np.ndarray, Hermitian matrix
        :return: float, relative minimum eigenvalue, 0.0 for the zero matrix
        """

        eigenvalues = scipy.linalg.eigh(matrix, eigvals_only=True)
        scale = np.max(np.abs(eigenvalues))
        if scale == 0.0:
            return 0.0
        return float(eigenvalues[0] / scale)

    @staticmethod
    def effective_rank(matrix: np.ndarray, threshold: float = 1e-3) -> int:
        """
        Number of eigenvalues larger than threshold times the largest eigenvalue.

        :param matrix: np.ndarray, Hermitian positive semidefinite matrix
        :param threshold: float, relative eigenvalue threshold
        :return: int, effective rank
        """

        eigenvalues = scipy.linalg.eigh(matrix, eigvals_only=True)
        scale = np.max(eigenvalues)
        if scale <= 0.0:
            return 0
        return int(np.count_nonzero(eigenvalues > threshold * scale))

    @staticmethod
    def psd_factor(covariance: np.ndarray) -> np.ndarray:
        """
        Compute F = U sqrt(Lambda) such that F F^H = R.

        Negative eigenvalues within PSD_TOLERANCE of the largest eigenvalue are clamped to zero.
        A triangular factorization is not used since one-ring covariance matrices are
        numerically rank deficient.

        :param covariance: np.ndarray, Hermitian positive semidefinite matrix R
        :return: np.ndarray, factor F with the same shape as R

        :raises InvalidCovarianceError: If R has a negative eigenvalue beyond the tolerance.
        """

        eigenvalues, eigenvectors = scipy.linalg.eigh(MatrixService.hermitian_part(covariance))
        scale = np.max(np.abs(eigenvalues), initial=0.0)

        if scale > 0.0 and eigenvalues[0] < -MatrixService.PSD_TOLERANCE * scale:
            raise InvalidCovarianceError(
                f"covariance has eigenvalue {eigenvalues[0]:.3e} below tolerance (largest {scale:.3e})")

        eigenvalues = np.clip(eigenvalues, 0.0, None)
        return eigenvectors * np.sqrt(eigenvalues)[np.newaxis, :]

    @staticmethod
    def hermitian_inverse(matrix: np.ndarray, context: str = '') -> np.ndarray:
        """
        Invert a Hermitian matrix through its eigendecomposition.

        :param matrix: np.ndarray, Hermitian matrix
        :param context: str, text appended to the error message, e.g. the regularization factor
        :return: np.ndarray, Hermitian inverse

        :raises SingularMatrixError: If the condition number exceeds MAX_CONDITION_NUMBER.
        """

        eigenvalues, eigenvectors = scipy.linalg.eigh(MatrixService.hermitian_part(matrix))
        magnitudes = np.abs(eigenvalues)
        largest = np.max(magnitudes, initial=0.0)
        smallest = np.min(magnitudes, initial=0.0)

        if smallest == 0.0 or largest / smallest > MatrixService.MAX_CONDITION_NUMBER:
            condition = np.inf if smallest == 0.0 else largest / smallest
            message = f"matrix is numerically singular (condition number {condition:.3e})"
            if context:
                message = f"{message}: {context}"
            raise SingularMatrixError(message)

        return (eigenvectors / eigenvalues[np.newaxis, :]) @ eigenvectors.conj().T
