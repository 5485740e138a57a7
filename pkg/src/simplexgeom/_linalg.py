"""Minimal dense matrix kernel for the tiny systems used by this library.

Coordinate dimensions never exceed a handful, so plain O(n^3) loops are
plenty; keeping the factorizations in-module also leaves the LU route as an
oracle that is independent of any closed-form inverse it is checked against.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor; raises DomainError if not SPD."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    L = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            s = a[i, j] - np.dot(L[i, :j], L[j, :j])
            if i == j:
                if s <= 0.0:
                    raise DomainError("matrix is not positive definite")
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


def lu_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Partial-pivot LU; returns (LU, perm, sign) with L and U packed."""
    lu = np.array(a, dtype=float)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(lu[k:, k])))
        if lu[pivot, k] == 0.0:
            raise DomainError("matrix is singular")
        if pivot != k:
            lu[[k, pivot]] = lu[[pivot, k]]
            perm[[k, pivot]] = perm[[pivot, k]]
            sign = -sign
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm, sign


def lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = np.asarray(b, dtype=float)[perm].copy()
    for k in range(1, n):  # forward, unit lower
        x[k] -= np.dot(lu[k, :k], x[:k])
    for k in range(n - 1, -1, -1):  # backward
        x[k] = (x[k] - np.dot(lu[k, k + 1 :], x[k + 1 :])) / lu[k, k]
    return x


def lu_inverse(a: np.ndarray) -> np.ndarray:
    lu, perm, _ = lu_factor(a)
    n = a.shape[0]
    inv = np.empty((n, n))
    eye = np.eye(n)
    for j in range(n):
        inv[:, j] = lu_solve(lu, perm, eye[:, j])
    return inv


def lu_det(a: np.ndarray) -> float:
    lu, _, sign = lu_factor(a)
    return float(sign * np.prod(np.diag(lu)))


def symmetric_eigenvalues(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 64) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    m = np.array(a, dtype=float)
    n = m.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(m, -1) ** 2)))
        if off <= tol * max(1.0, float(np.max(np.abs(np.diag(m))))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if m[p, q] == 0.0:
                    continue
                theta = 0.5 * math.atan2(2.0 * m[p, q], m[q, q] - m[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
    return np.sort(np.diag(m))
