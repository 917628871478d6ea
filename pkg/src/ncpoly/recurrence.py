"""Three-term recurrence blocks and their inversion.

Left multiplication by a generator acts on the orthonormal family by

    Y_k Phi_n = Phi_{n+1} B_{n,k} + Phi_n A_{n,k} + Phi_{n-1} B*_{n-1,k}

with Phi_n the row of level-n basis elements, A_{n,k} Hermitian, and the
level-coupling blocks B stacking to an upper triangular invertible matrix
B_n = [B_{n,1} ... B_{n,N}] whose diagonal entry at word k.sigma equals
a_{sigma,sigma} / a_{k.sigma,k.sigma} > 0.

``extract`` reads the blocks off a basis by inner products; ``favard`` goes
the other way, rebuilding the basis and a moment functional from the blocks
alone. Both directions carry runtime checks (symmetry, triangularity,
residual of the recurrence as a polynomial identity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ValidationError
from .functional import MomentFunctional, gram
from .orthopoly import OrthoBasis, _coeffs_from_matrix
from .words import EMPTY, Word, enumerate_level, involution, words_up_to

HERMITICITY_TOL = 1e-10
RESIDUAL_TOL = 1e-9
DIAG_TOL = 1e-9
COND_BOUND = 1e8


@dataclass
class RecurrenceCoeffs:
    """Blocks A_{n,k} (N^n x N^n) and B_{n,k} (N^{n+1} x N^n), 0 <= n < levels."""

    n_generators: int
    levels: int
    A: dict[tuple[int, int], np.ndarray]
    B: dict[tuple[int, int], np.ndarray]

    def __post_init__(self):
        N = self.n_generators
        for n in range(self.levels):
            for k in range(1, N + 1):
                if (n, k) not in self.A or (n, k) not in self.B:
                    raise ValidationError(f"missing block at (n={n}, k={k})")
                a = np.asarray(self.A[n, k], dtype=complex)
                b = np.asarray(self.B[n, k], dtype=complex)
                if a.shape != (N**n, N**n):
                    raise ValidationError(f"A block (n={n}, k={k}) has shape {a.shape}")
                if b.shape != (N ** (n + 1), N**n):
                    raise ValidationError(f"B block (n={n}, k={k}) has shape {b.shape}")
                self.A[n, k], self.B[n, k] = a, b

    def b_block(self, n: int) -> np.ndarray:
        """Assembled B_n, columns ordered by the word k.sigma (graded-lex)."""
        return np.hstack([self.B[n, k] for k in range(1, self.n_generators + 1)])

    def a_block(self, n: int) -> np.ndarray:
        return np.hstack([self.A[n, k] for k in range(1, self.n_generators + 1)])

    def validate(self, cond_bound: float = COND_BOUND) -> None:
        """Reject non-Hermitian A, non-triangular/ill-conditioned B, bad diagonal."""
        N = self.n_generators
        for n in range(self.levels):
            for k in range(1, N + 1):
                a = self.A[n, k]
                if np.max(np.abs(a - a.conj().T)) > HERMITICITY_TOL * max(1.0, np.max(np.abs(a))):
                    raise ValidationError(f"A block (n={n}, k={k}) is not Hermitian")
            Bn = self.b_block(n)
            m = Bn.shape[0]
            scale = max(1.0, float(np.max(np.abs(Bn))))
            rows, cols = np.tril_indices(m, k=-1)
            bad = np.abs(Bn[rows, cols]) > HERMITICITY_TOL * scale
            if np.any(bad):
                j = int(cols[bad][0])
                raise ValidationError(
                    f"B_{n} not upper triangular (offending block n={n}, k={j // N**n + 1})")
            dg = np.diag(Bn)
            if np.any(np.abs(dg.imag) > DIAG_TOL * scale) or np.any(dg.real <= 0):
                j = int(np.argmin(dg.real))
                raise ValidationError(
                    f"B_{n} diagonal not strictly positive (offending block n={n}, "
                    f"k={j // N**n + 1})")
            if np.linalg.cond(Bn) > cond_bound:
                raise ValidationError(f"B_{n} condition number exceeds {cond_bound:.1e}")


def _shift_maps(n_generators: int, level: int) -> dict[int, np.ndarray]:
    """Index map sending word u (|u| < level) to k.u within graded-lex order."""
    ws = words_up_to(level, n_generators)
    idx = {w: i for i, w in enumerate(ws)}
    maps = {}
    for k in range(1, n_generators + 1):
        arr = np.full(len(ws), -1, dtype=int)
        for j, u in enumerate(ws):
            if len(u) < level:
                arr[j] = idx[Word((k,) + u.letters)]
        maps[k] = arr
    return maps


def _shift_rows(rows: np.ndarray, kmap: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rows)
    mask = kmap >= 0
    out[:, kmap[mask]] = rows[:, mask]
    return out


def _level_offsets(n_generators: int, level: int) -> list[int]:
    offs = [0]
    for n in range(level + 1):
        offs.append(offs[-1] + n_generators**n)
    return offs


def extract(f: MomentFunctional, basis: OrthoBasis, levels: int) -> RecurrenceCoeffs:
    """Recurrence blocks from a basis by inner products against the kernel.

    Needs the basis to level ``levels`` and kernel data through word length
    2*levels (for hankel functionals). Asserts Hermiticity of A, the
    triangular structure and diagonal identity of B, and the coefficient-wise
    residual of the recurrence on every run.
    """
    if levels < 1:
        raise ValidationError("levels must be >= 1")
    if basis.level < levels:
        raise ValidationError(f"basis valid to level {basis.level}, need {levels}")
    N = f.n_generators
    G = gram(f, levels).entries
    A_coef = basis.matrix(levels)
    offs = _level_offsets(N, levels)
    kmaps = _shift_maps(N, levels)

    A_blocks: dict[tuple[int, int], np.ndarray] = {}
    B_blocks: dict[tuple[int, int], np.ndarray] = {}
    for n in range(levels):
        src = A_coef[offs[n]:offs[n + 1]]
        rows_n = np.conj(A_coef[offs[n]:offs[n + 1]])
        rows_n1 = np.conj(A_coef[offs[n + 1]:offs[n + 2]])
        for k in range(1, N + 1):
            shifted = _shift_rows(src, kmaps[k])          # coeffs of Y_k phi_sigma
            A_blocks[n, k] = rows_n @ G @ shifted.T
            B_blocks[n, k] = rows_n1 @ G @ shifted.T
    coeffs = RecurrenceCoeffs(n_generators=N, levels=levels, A=A_blocks, B=B_blocks)

    for n in range(levels):
        for k in range(1, N + 1):
            a = coeffs.A[n, k]
            dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
            if dev > HERMITICITY_TOL:
                raise ConsistencyError(
                    f"extracted A (n={n}, k={k}) deviates from Hermitian by {dev:.3e}")
        Bn = coeffs.b_block(n)
        lvl_next = enumerate_level(n + 1, N)
        for j, w in enumerate(lvl_next):
            tail = Word(w.letters[1:])
            expected = basis.leading(tail) / basis.leading(w)
            if abs(Bn[j, j] - expected) > DIAG_TOL * max(1.0, abs(expected)):
                raise ConsistencyError(
                    f"B_{n} diagonal at {w} deviates from leading-coefficient ratio")
    resid = residual_check(basis, coeffs)
    if resid > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(A_coef)))):
        raise ConsistencyError(f"recurrence residual {resid:.3e} too large")
    return coeffs


def residual_check(basis: OrthoBasis, coeffs: RecurrenceCoeffs) -> float:
    """Largest coefficient-wise residual of the recurrence identity."""
    N = coeffs.n_generators
    levels = coeffs.levels
    if basis.level < levels:
        raise ValidationError(f"basis valid to level {basis.level}, need {levels}")
    A_coef = basis.matrix(levels)
    offs = _level_offsets(N, levels)
    kmaps = _shift_maps(N, levels)
    worst = 0.0
    for n in range(levels):
        C_n = A_coef[offs[n]:offs[n + 1]]
        C_n1 = A_coef[offs[n + 1]:offs[n + 2]]
        C_nm1 = A_coef[offs[n - 1]:offs[n]] if n >= 1 else None
        for k in range(1, N + 1):
            R = _shift_rows(C_n, kmaps[k])
            R = R - coeffs.B[n, k].T @ C_n1
            R = R - coeffs.A[n, k].T @ C_n
            if n >= 1:
                R = R - np.conj(coeffs.B[n - 1, k]) @ C_nm1
            worst = max(worst, float(np.max(np.abs(R))))
    return worst


def favard(coeffs: RecurrenceCoeffs, levels: int | None = None,
           cond_bound: float = COND_BOUND) -> tuple[OrthoBasis, MomentFunctional]:
    """Rebuild the orthonormal family and its moment functional from blocks.

    Solving the recurrence for Phi_{l+1} gives

        Phi_{l+1} = sum_j (Y_j Phi_l) D_{l,j} - Phi_l E_l - Phi_{l-1} F_l

    with [D_{l,1}; ...; D_{l,N}] = B_l^{-1}, E_l = A_l B_l^{-1} and
    F_l = [B*_{l-1,1} ... B*_{l-1,N}] B_l^{-1}. The functional is fixed by
    phi(1) = 1 and phi(phi_sigma) = 0, which determines moments through word
    length levels directly and through 2*levels via the kernel factorization
    over the orthonormal expansion of the monomials.
    """
    L = coeffs.levels if levels is None else levels
    if L < 1 or L > coeffs.levels:
        raise ValidationError(f"levels must be in 1..{coeffs.levels}")
    coeffs.validate(cond_bound)
    N = coeffs.n_generators
    ws = words_up_to(L, N)
    W = len(ws)
    offs = _level_offsets(N, L)
    kmaps = _shift_maps(N, L)

    A_full = np.zeros((W, W), dtype=complex)
    A_full[0, 0] = 1.0
    for l in range(L):
        C_l = A_full[offs[l]:offs[l + 1], :]
        Binv = np.linalg.inv(coeffs.b_block(l))
        E = coeffs.a_block(l) @ Binv
        nxt = np.zeros((N ** (l + 1), W), dtype=complex)
        for j in range(1, N + 1):
            D_lj = Binv[(j - 1) * N**l: j * N**l, :]
            nxt += D_lj.T @ _shift_rows(C_l, kmaps[j])
        nxt -= E.T @ C_l
        if l >= 1:
            C_lm1 = A_full[offs[l - 1]:offs[l], :]
            Cstack = np.hstack([coeffs.B[l - 1, j].conj().T for j in range(1, N + 1)])
            F = Cstack @ Binv
            nxt -= F.T @ C_lm1
        A_full[offs[l + 1]:offs[l + 2], :] = nxt

    basis = OrthoBasis(n_generators=N, level=L,
                       coeffs=_coeffs_from_matrix(A_full, ws))
    Binv_full = np.linalg.inv(A_full)  # monomials in the orthonormal family
    idx = {w: i for i, w in enumerate(ws)}

    moments: dict[Word, complex] = {}
    for m in range(2 * L + 1):
        for w in enumerate_level(m, N):
            lv = min(L, m)
            u, v = Word(w.letters[:m - lv]), Word(w.letters[m - lv:])
            bu = Binv_full[idx[involution(u)], :]
            bv = Binv_full[idx[v], :]
            moments[w] = complex(np.dot(bv, np.conj(bu)))
    for w in list(moments):
        rev = involution(w)
        if rev >= w:
            avg = (moments[w] + np.conj(moments[rev])) / 2.0
            moments[w] = avg
            moments[rev] = complex(np.conj(avg))
    moments[EMPTY] = 1.0 + 0.0j
    f = MomentFunctional(n_generators=N, kind="hankel", max_degree=2 * L,
                         moments=moments)
    return basis, f
