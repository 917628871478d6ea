"""Orthonormal polynomials in non-commuting variables.

Given a strictly positive moment functional, the monomials F_w are
orthonormalized in graded-lex order, producing triangular coefficients
a_{sigma,tau} (tau <= sigma) with a_{sigma,sigma} > 0. Two routes are
implemented: a Cholesky factorization of the Gram matrix, and a bordered
determinant formula useful as an independent cross-check at small sizes.

For stationary (toeplitz) functionals the basis also satisfies a two-term
ladder driven by one scalar per word: left multiplication by a generator
maps phi_sigma to phi_{k.sigma} up to a correction along an auxiliary
family phi#, mirroring the classical orthogonal-polynomials-on-the-circle
recursion. ``szego_recursion`` rebuilds the basis that way and verifies it
against the Cholesky route.

Coefficient rows pair conjugated against the Gram's first slot: the
orthonormality identity reads conj(A) G A^T = I (for real moments this is
the familiar A G A* = I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PositivityError, ValidationError
from .functional import (GramMatrix, MomentFunctional, gram, kernel_entry,
                         require_strict_positivity)
from .words import EMPTY, Word, words_up_to

DETERMINANT_CAP = 21  # bordered-matrix order limit for the cross-check route


@dataclass
class OrthoBasis:
    """Triangular coefficients of an orthonormal family, rows by word."""

    n_generators: int
    level: int
    coeffs: dict[Word, dict[Word, complex]]

    def words(self) -> list[Word]:
        return words_up_to(self.level, self.n_generators)

    def matrix(self, level: int | None = None) -> np.ndarray:
        """Dense lower-triangular coefficient matrix over graded-lex words."""
        lvl = self.level if level is None else level
        if lvl > self.level:
            raise ValidationError(f"basis only valid to level {self.level}")
        ws = words_up_to(lvl, self.n_generators)
        idx = {w: i for i, w in enumerate(ws)}
        A = np.zeros((len(ws), len(ws)), dtype=complex)
        for w in ws:
            for t, c in self.coeffs[w].items():
                A[idx[w], idx[t]] = c
        return A

    def leading(self, w: Word) -> float:
        return float(np.real(self.coeffs[w][w]))


def _coeffs_from_matrix(A: np.ndarray, ws: list[Word]) -> dict[Word, dict[Word, complex]]:
    out: dict[Word, dict[Word, complex]] = {}
    for i, w in enumerate(ws):
        out[w] = {ws[j]: complex(A[i, j]) for j in range(i + 1)}
    return out


def orthogonalize(f: MomentFunctional, level: int, tol: float = 1e-9) -> OrthoBasis:
    """Orthonormal basis to a level via Cholesky of the Gram matrix.

    Raises PositivityError (with certificate) unless the Gram matrix is
    strictly positive at the level.
    """
    require_strict_positivity(f, level, tol)
    G = gram(f, level)
    try:
        L = np.linalg.cholesky(np.conj(G.entries))
    except np.linalg.LinAlgError as exc:
        raise PositivityError(f"Cholesky failed at level {level}: {exc}") from exc
    A = np.linalg.inv(L)
    di = np.arange(A.shape[0])
    A[di, di] = A[di, di].real
    return OrthoBasis(n_generators=f.n_generators, level=level,
                      coeffs=_coeffs_from_matrix(A, G.words))


def orthonormality_residual(basis: OrthoBasis, G: GramMatrix | np.ndarray,
                            level: int | None = None) -> float:
    """max |conj(A) G A^T - I| over the basis range."""
    ent = G.entries if isinstance(G, GramMatrix) else np.asarray(G)
    A = basis.matrix(level)
    n = A.shape[0]
    R = np.conj(A) @ ent[:n, :n] @ A.T
    return float(np.max(np.abs(R - np.eye(n))))


def determinant_formula(f: MomentFunctional, sigma: Word, tol: float = 1e-9) -> dict[Word, complex]:
    """phi_sigma by the bordered determinant, expanded along its last row.

    The bordered matrix stacks kernel rows for all words strictly before
    sigma over the columns of words up to sigma, with the monomials as the
    final row; the normalizer is 1/sqrt(D_{sigma-1} D_sigma) with D the
    initial-segment Gram determinants. Intended as a small-size cross-check
    of the Cholesky route.
    """
    if sigma == EMPTY:
        return {EMPTY: 1.0 + 0.0j}
    require_strict_positivity(f, len(sigma), tol)
    ws = [w for w in words_up_to(len(sigma), f.n_generators) if w <= sigma]
    m = len(ws) - 1
    if m + 1 > DETERMINANT_CAP:
        raise ValidationError(
            f"determinant route capped at order {DETERMINANT_CAP}, needed {m + 1}")
    top = np.empty((m, m + 1), dtype=complex)
    for i in range(m):
        for j in range(m + 1):
            top[i, j] = kernel_entry(f, ws[i], ws[j])
    d_prev = float(np.real(np.linalg.det(top[:, :m]))) if m else 1.0
    full = np.vstack([top, np.zeros((1, m + 1))])
    for j in range(m + 1):
        full[m, j] = kernel_entry(f, sigma, ws[j])
    d_full = float(np.real(np.linalg.det(full)))
    if d_prev <= 0 or d_full <= 0:
        raise PositivityError(
            f"initial-segment determinants not positive at {sigma}")
    norm = 1.0 / np.sqrt(d_prev * d_full)
    coeffs: dict[Word, complex] = {}
    for j in range(m + 1):
        minor = np.delete(top, j, axis=1)
        sign = -1.0 if (m + j) % 2 else 1.0
        coeffs[ws[j]] = complex(sign * np.linalg.det(minor) * norm)
    return coeffs


@dataclass
class SzegoData:
    """Per-word ladder scalars and the auxiliary family coefficients."""

    gammas: dict[Word, complex]
    ds: dict[Word, float]
    sharp: dict[Word, dict[Word, complex]]


def szego_recursion(f: MomentFunctional, level: int, tol: float = 1e-8
                    ) -> tuple[OrthoBasis, SzegoData]:
    """Rebuild the basis of a stationary functional by the scalar ladder.

    For each nonempty word w = k.sigma (in graded-lex order, with p the
    predecessor of w):

        phi_w  = (Y_k phi_sigma - gamma_w phi#_p) / d_w
        phi#_w = (-conj(gamma_w) Y_k phi_sigma + phi#_p) / d_w

    with gamma_w = -sqrt(D_w / D_{1,w}) a_{w,e}, d_w = sqrt(1 - |gamma_w|^2),
    and phi#_e = 1. D_w is the initial-segment Gram determinant through w and
    D_{1,w} the same with the empty word removed. The rebuilt basis must
    match the Cholesky route; a mismatch raises ConsistencyError.
    """
    if f.kind != "toeplitz":
        raise ValidationError("the scalar ladder applies to toeplitz functionals")
    basis = orthogonalize(f, level)
    G = gram(f, level)
    n = len(G.words)
    A = basis.matrix()

    Lbar = np.linalg.cholesky(np.conj(G.entries))
    diag = np.real(np.diag(Lbar))
    lead = np.concatenate([[1.0], np.cumprod(diag**2)])  # order-m minors
    if n > 1:
        L1 = np.linalg.cholesky(np.conj(G.entries[1:, 1:]))
        diag1 = np.real(np.diag(L1))
        lead1 = np.concatenate([[1.0], np.cumprod(diag1**2)])
    else:
        lead1 = np.array([1.0])

    idx = {w: i for i, w in enumerate(G.words)}
    kmap = {}
    for k in range(1, f.n_generators + 1):
        arr = np.full(n, -1, dtype=int)
        for j, u in enumerate(G.words):
            if len(u) <= level - 1:
                arr[j] = idx[Word((k,) + u.letters)]
        kmap[k] = arr

    gammas: dict[Word, complex] = {}
    ds: dict[Word, float] = {}
    phi = np.zeros((n, n), dtype=complex)
    sharp = np.zeros((n, n), dtype=complex)
    phi[0, 0] = 1.0
    sharp[0, 0] = 1.0
    for i in range(1, n):
        w = G.words[i]
        gamma = complex(-np.sqrt(lead[i + 1] / lead1[i]) * A[i, 0])
        if abs(gamma) >= 1.0:
            raise PositivityError(
                f"ladder scalar at {w} has modulus {abs(gamma):.6f} >= 1")
        d = float(np.sqrt(1.0 - abs(gamma) ** 2))
        gammas[w], ds[w] = gamma, d
        k, tail = w.letters[0], Word(w.letters[1:])
        src = phi[idx[tail]]
        shifted = np.zeros(n, dtype=complex)
        mask = kmap[k] >= 0
        shifted[kmap[k][mask]] = src[mask]
        phi[i] = (shifted - gamma * sharp[i - 1]) / d
        sharp[i] = (-np.conj(gamma) * shifted + sharp[i - 1]) / d

    dev = float(np.max(np.abs(phi - A)))
    if dev > tol * max(1.0, float(np.max(np.abs(A)))):
        raise ConsistencyError(
            f"ladder basis deviates from Gram-Schmidt basis by {dev:.3e}")
    rebuilt = OrthoBasis(n_generators=f.n_generators, level=level,
                         coeffs=_coeffs_from_matrix(phi, G.words))
    sharp_coeffs = {G.words[i]: {G.words[j]: complex(sharp[i, j])
                                 for j in range(i + 1) if sharp[i, j] != 0}
                    for i in range(n)}
    return rebuilt, SzegoData(gammas=gammas, ds=ds, sharp=sharp_coeffs)


def _tuple_mats(point) -> np.ndarray:
    mats = getattr(point, "mats", point)
    arr = np.asarray(mats, dtype=complex)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValidationError("point must provide matrices of shape (N, d, d)")
    return arr


def word_product(mats: np.ndarray, w: Word, cache: dict[Word, np.ndarray]) -> np.ndarray:
    """Z_w = Z_{i1} ... Z_{ik}, memoized on suffixes."""
    hit = cache.get(w)
    if hit is not None:
        return hit
    if not w.letters:
        out = np.eye(mats.shape[1], dtype=complex)
    else:
        out = mats[w.letters[0] - 1] @ word_product(mats, Word(w.letters[1:]), cache)
    cache[w] = out
    return out


def evaluate(basis: OrthoBasis, sigma: Word, point) -> np.ndarray:
    """phi_sigma at an operator tuple: sum of a_{sigma,tau} Z_tau."""
    mats = _tuple_mats(point)
    if mats.shape[0] != basis.n_generators:
        raise ValidationError("point has the wrong number of generator matrices")
    d = mats.shape[1]
    cache: dict[Word, np.ndarray] = {}
    out = np.zeros((d, d), dtype=complex)
    for tau, c in basis.coeffs[sigma].items():
        if c != 0:
            out += c * word_product(mats, tau, cache)
    return out
