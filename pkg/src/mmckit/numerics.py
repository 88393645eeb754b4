"""Deterministic dense decompositions.

Thin wrappers over LAPACK (through numpy) that pin down everything LAPACK
leaves free: eigenvalues and singular values come back in descending order,
and every eigenvector / singular vector is sign-fixed so its
largest-magnitude entry is positive (ties broken by the lowest index).
With the ordering and signs pinned, models built on these decompositions
are reproducible bit for bit and serialize exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NonSymmetric, ShapeMismatch

# relative asymmetry allowed before sym_eig refuses the input
SYM_TOL = 1e-10


@dataclass(frozen=True)
class SymEig:
    """Eigenpairs of a symmetric matrix, eigenvalues descending.

    Column ``vectors[:, j]`` pairs with ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class Svd:
    """Thin SVD ``m = u @ diag(s) @ v.T`` with ``s`` descending."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def _fix_signs(vectors, coupled=None):
    """Flip columns so each column's largest-|entry| is positive.

    np.argmax returns the first maximal index, which is the tie rule.
    A `coupled` matrix (right vectors tracking left ones) is flipped by
    the same signs so products are preserved.
    """
    if vectors.shape[1] == 0:
        return vectors if coupled is None else (vectors, coupled)
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    if coupled is None:
        return vectors * signs
    return vectors * signs, coupled * signs


def sym_eig(a):
    """Full eigendecomposition of a symmetric matrix.

    Raises NonFinite on NaN/inf input and NonSymmetric when the relative
    asymmetry exceeds SYM_TOL. Output order and vector signs are fixed as
    described in the module docstring.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains NaN or inf")
    if a.size:
        scale = max(1.0, float(np.abs(a).max()))
        if float(np.abs(a - a.T).max()) > SYM_TOL * scale:
            raise NonSymmetric("matrix is not symmetric within tolerance")
    values, vectors = np.linalg.eigh(a)
    order = np.arange(len(values))[::-1]
    values = np.ascontiguousarray(values[order])
    vectors = _fix_signs(np.ascontiguousarray(vectors[:, order]))
    return SymEig(values=values, vectors=vectors)


def svd(m):
    """Thin SVD with descending singular values and pinned signs.

    Left singular vectors get the sign fix; right ones are flipped with
    them so ``u @ diag(s) @ v.T`` still reconstructs the input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains NaN or inf")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    u, v = _fix_signs(u, vt.T)
    return Svd(u=np.ascontiguousarray(u), s=s, v=np.ascontiguousarray(v))


def principal_angles(a, b):
    """Principal angles (radians, descending) between two column spans.

    Uses the sine formulation: the singular values of the residual of one
    orthonormal basis against the other are the sines of the angles, which
    stays accurate near zero where the cosine formulation loses half the
    digits. Inputs must have full column rank and equal column counts.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    resid = qb - qa @ (qa.T @ qb)
    sines = np.linalg.svd(resid, compute_uv=False)
    return np.arcsin(np.clip(sines, 0.0, 1.0))
