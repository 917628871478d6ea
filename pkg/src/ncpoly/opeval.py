"""Matrix-point evaluation: ball and half-space geometry, kernels, CD sums.

Points are tuples of d x d matrices. The row ball is the set with
I - sum Z_k Z_k* positive definite; the half-space is its image under the
Cayley map in the last coordinate,

    W_j = (1 + Z_N)^{-1} Z_j  (j < N),    W_N = i (1 + Z_N)^{-1} (1 - Z_N),

characterized by Im W_N - sum_{k<N} W_k W_k* > 0. Kernel sums of the form
sum_sigma Z_sigma T Z'_sigma* are evaluated by iterating the completely
positive map T -> sum_k Z_k T Z'_k* and truncating once the geometric tail
bound ||T|| r^{L+1} / (1 - r) clears the requested tolerance, where r bounds
the joint row norms. Everything downstream (Szego kernels in both pictures,
reproduction identities, Christoffel-Darboux) reduces to such sandwiches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, MembershipError, ValidationError
from .functional import MomentFunctional, inner_product
from .orthopoly import OrthoBasis, word_product
from .recurrence import RecurrenceCoeffs
from .words import Word, enumerate_level, words_up_to

SANDWICH_CAP = 64


@dataclass
class OperatorTuple:
    """A tuple (Z_1, ..., Z_N) of square matrices of a common size."""

    n_generators: int
    dim: int
    mats: np.ndarray
    region: str = "unchecked"

    def __post_init__(self):
        self.mats = np.asarray(self.mats, dtype=complex)
        if self.mats.shape != (self.n_generators, self.dim, self.dim):
            raise ValidationError(
                f"expected {self.n_generators} matrices of size {self.dim}, "
                f"got array of shape {self.mats.shape}")
        if self.region not in ("ball", "siegel", "unchecked"):
            raise ValidationError(f"unknown region tag {self.region!r}")


@dataclass
class MembershipResult:
    inside: bool
    lambda_min: float
    which: str


def defect(t: OperatorTuple, which: str) -> np.ndarray:
    """The Hermitian matrix whose positivity defines the region."""
    Z = t.mats
    eye = np.eye(t.dim)
    if which == "ball":
        M = eye - sum(Z[k] @ Z[k].conj().T for k in range(t.n_generators))
    elif which == "siegel":
        WN = Z[-1]
        M = (WN - WN.conj().T) / 2j
        for k in range(t.n_generators - 1):
            M = M - Z[k] @ Z[k].conj().T
    else:
        raise ValidationError(f"unknown region {which!r}")
    return (M + M.conj().T) / 2.0


def membership(t: OperatorTuple, which: str, tol: float = 1e-8) -> MembershipResult:
    lam = float(np.linalg.eigvalsh(defect(t, which))[0])
    return MembershipResult(inside=lam > tol, lambda_min=lam, which=which)


def require_membership(t: OperatorTuple, which: str, tol: float = 1e-8) -> None:
    res = membership(t, which, tol)
    if not res.inside:
        raise MembershipError(
            f"tuple is not strictly inside the {which} region "
            f"(lambda_min = {res.lambda_min:.6g})")


def cayley(t: OperatorTuple, tol: float = 1e-8) -> OperatorTuple:
    """Ball tuple to half-space tuple; the last coordinate absorbs the i."""
    require_membership(t, "ball", tol)
    N, d = t.n_generators, t.dim
    eye = np.eye(d)
    A = eye + t.mats[-1]
    out = np.empty_like(t.mats)
    for k in range(N - 1):
        out[k] = np.linalg.solve(A, t.mats[k])
    out[N - 1] = 1j * np.linalg.solve(A, eye - t.mats[-1])
    return OperatorTuple(n_generators=N, dim=d, mats=out, region="siegel")


def cayley_inverse(t: OperatorTuple, tol: float = 1e-8) -> OperatorTuple:
    require_membership(t, "siegel", tol)
    N, d = t.n_generators, t.dim
    eye = np.eye(d)
    A = 1j * eye + t.mats[-1]
    out = np.empty_like(t.mats)
    for k in range(N - 1):
        out[k] = 2j * np.linalg.solve(A, t.mats[k])
    out[N - 1] = np.linalg.solve(A, 1j * eye - t.mats[-1])
    return OperatorTuple(n_generators=N, dim=d, mats=out, region="ball")


@dataclass
class KernelResult:
    value: np.ndarray
    truncation_length: int
    tail_bound: float


def _row_norm(mats: np.ndarray) -> float:
    M = sum(m @ m.conj().T for m in mats)
    return float(np.sqrt(max(0.0, np.linalg.eigvalsh(M)[-1])))


def ball_sandwich(mats: np.ndarray, mats2: np.ndarray, T: np.ndarray,
                  tol: float = 1e-9, cap: int = SANDWICH_CAP) -> KernelResult:
    """sum over all words sigma of Z_sigma T Z'_sigma*, truncated rigorously.

    The truncation length is the smallest L with ||T|| r^{L+1} / (1 - r) <=
    tol, where r is the product of the block-row operator norms of the two
    tuples. Raises once the open ball condition r < 1 fails or the length
    would exceed ``cap``.
    """
    mats = np.asarray(mats, dtype=complex)
    mats2 = np.asarray(mats2, dtype=complex)
    T = np.asarray(T, dtype=complex)
    r = _row_norm(mats) * _row_norm(mats2)
    if r >= 1.0:
        raise ConvergenceError(f"joint row radius r = {r:.6g} >= 1, sum diverges")
    normT = float(np.linalg.norm(T, 2))
    if normT == 0.0:
        return KernelResult(value=np.zeros_like(T), truncation_length=0,
                            tail_bound=0.0)
    L = 0
    while r > 0.0 and normT * r ** (L + 1) / (1.0 - r) > tol:
        L += 1
        if L > cap:
            raise ConvergenceError(
                f"tail bound needs more than {cap} levels at r = {r:.4g}, "
                f"tol = {tol:.2g}")
    tail = 0.0 if r == 0.0 else normT * r ** (L + 1) / (1.0 - r)
    total = T.copy()
    term = T
    for _ in range(L):
        term = sum(mats[k] @ term @ mats2[k].conj().T for k in range(mats.shape[0]))
        total = total + term
    return KernelResult(value=total, truncation_length=L, tail_bound=tail)


def _check_compatible(t: OperatorTuple, t2: OperatorTuple) -> None:
    if t.n_generators != t2.n_generators or t.dim != t2.dim:
        raise ValidationError("operator tuples must share generator count and size")


def szego_ball(t: OperatorTuple, t2: OperatorTuple, tol: float = 1e-9,
               cap: int = SANDWICH_CAP) -> KernelResult:
    """K(Z, Z') = sum_sigma Z_sigma Z'_sigma* for two ball points."""
    _check_compatible(t, t2)
    require_membership(t, "ball")
    require_membership(t2, "ball")
    return ball_sandwich(t.mats, t2.mats, np.eye(t.dim), tol, cap)


def _right_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # X with X A = B
    return np.linalg.solve(A.T, B.T).T


def _siegel_middle(t: OperatorTuple, t2: OperatorTuple, S: np.ndarray) -> np.ndarray:
    eye = np.eye(t.dim)
    X = np.linalg.solve(1j * eye + t.mats[-1], S)
    return _right_solve((1j * eye + t2.mats[-1]).conj().T, X)


def f_sandwich(t: OperatorTuple, t2: OperatorTuple, S: np.ndarray,
               tol: float = 1e-9, cap: int = SANDWICH_CAP) -> KernelResult:
    """Half-space counterpart of the sandwich sum.

    F(W, W')[S] = 4 sum_sigma Z_sigma (i + W_N)^{-1} S (i + W'_N)^{-*}
    Z'_sigma* with Z, Z' the Cayley preimages. Linear in S, and inverse to
    S(T) = (W_N T - T W'_N*)/(2i) - sum_{k<N} W_k T W'_k*.
    """
    _check_compatible(t, t2)
    Z = cayley_inverse(t)
    Z2 = cayley_inverse(t2)
    M = _siegel_middle(t, t2, np.asarray(S, dtype=complex))
    res = ball_sandwich(Z.mats, Z2.mats, M, tol / 4.0, cap)
    return KernelResult(value=4.0 * res.value,
                        truncation_length=res.truncation_length,
                        tail_bound=4.0 * res.tail_bound)


def szego_siegel(t: OperatorTuple, t2: OperatorTuple, tol: float = 1e-9,
                 cap: int = SANDWICH_CAP) -> KernelResult:
    """K(W, W') = F(W, W')[I] for two half-space points."""
    return f_sandwich(t, t2, np.eye(t.dim), tol, cap)


@dataclass
class ReproductionResult:
    residual: float
    truncation_length: int
    tail_bound: float


def _resolve_region(t: OperatorTuple) -> str:
    if t.region in ("ball", "siegel"):
        return t.region
    for which in ("ball", "siegel"):
        if membership(t, which).inside:
            return which
    raise MembershipError("tuple lies in neither region")


def reproduction_check(t: OperatorTuple, t2: OperatorTuple, T: np.ndarray,
                       tol: float = 1e-9, cap: int = SANDWICH_CAP) -> ReproductionResult:
    """Feed T through the defining map and recover it through the kernel sum.

    In the ball the sandwich sum inverts T -> T - sum_k Z_k T Z'_k*; in the
    half-space f_sandwich inverts the map S(T) documented there. The returned
    residual is the max-abs gap between the recovered matrix and T.
    """
    _check_compatible(t, t2)
    T = np.asarray(T, dtype=complex)
    region = _resolve_region(t)
    if _resolve_region(t2) != region:
        raise ValidationError("points lie in different regions")
    N = t.n_generators
    if region == "ball":
        mid = T - sum(t.mats[k] @ T @ t2.mats[k].conj().T for k in range(N))
        out = ball_sandwich(t.mats, t2.mats, mid, tol, cap)
    else:
        S = (t.mats[-1] @ T - T @ t2.mats[-1].conj().T) / 2j
        for k in range(N - 1):
            S = S - t.mats[k] @ T @ t2.mats[k].conj().T
        out = f_sandwich(t, t2, S, tol, cap)
    residual = float(np.max(np.abs(out.value - T)))
    return ReproductionResult(residual=residual,
                              truncation_length=out.truncation_length,
                              tail_bound=out.tail_bound)


def separating_tuples(sigma: Word, unit_dim: int = 1,
                      n_generators: int | None = None) -> list[OperatorTuple]:
    """2|sigma| boundary-norm tuples whose sigma-products hit distinct units.

    For each p the tuple Z^p satisfies (Z^p_sigma)* = 2^{-k/2} E_{p,k+p}
    (first family, p <= k) or 2^{-k/2} E_{p,p-k} (second family, p > k),
    k = |sigma|, while tau-products of other words of the same length miss
    that unit. Every tuple sits inside the ball with defect exactly 1/2.
    """
    k = len(sigma)
    if k == 0:
        raise ValidationError("needs a nonempty word")
    N = n_generators if n_generators is not None else max(sigma.letters)
    if max(sigma.letters) > N:
        raise ValidationError("word uses a letter beyond n_generators")
    d = 2 * k * unit_dim
    eye_u = np.eye(unit_dim)

    def unit(i: int, j: int) -> np.ndarray:
        # E_{ij} in 1-based indexing, inflated by the unit block
        E = np.zeros((2 * k, 2 * k))
        E[i - 1, j - 1] = 1.0
        return np.kron(E, eye_u)

    letters = sigma.letters
    out = []
    for p in range(1, k + 1):
        mats = np.zeros((N, d, d), dtype=complex)
        for s in range(1, N + 1):
            rows = [l for l in range(1, k + 1) if letters[k - l] == s]
            star = sum((unit(r + p - 1, r + p) for r in rows),
                       np.zeros((d, d), dtype=complex))
            mats[s - 1] = (star / np.sqrt(2.0)).conj().T
        out.append(OperatorTuple(n_generators=N, dim=d, mats=mats, region="ball"))
    for p in range(k + 1, 2 * k + 1):
        mats = np.zeros((N, d, d), dtype=complex)
        for s in range(1, N + 1):
            rows = [l for l in range(1, k + 1) if letters[l - 1] == s]
            star = sum((unit(r + p - k, r + p - k - 1) for r in rows),
                       np.zeros((d, d), dtype=complex))
            mats[s - 1] = (star / np.sqrt(2.0)).conj().T
        out.append(OperatorTuple(n_generators=N, dim=d, mats=mats, region="ball"))
    return out


def evaluate_all(basis: OrthoBasis, level: int, t: OperatorTuple) -> dict[Word, np.ndarray]:
    """phi_sigma(Z) for every |sigma| <= level, sharing the word-product cache."""
    if basis.level < level:
        raise ValidationError(f"basis valid to level {basis.level}, need {level}")
    if t.n_generators != basis.n_generators:
        raise ValidationError("generator count mismatch between basis and point")
    cache: dict[Word, np.ndarray] = {}
    prods = {w: word_product(t.mats, w, cache) for w in words_up_to(level, basis.n_generators)}
    out = {}
    for w in words_up_to(level, basis.n_generators):
        acc = np.zeros((t.dim, t.dim), dtype=complex)
        for tau, a in basis.coeffs[w].items():
            acc += a * prods[tau]
        out[w] = acc
    return out


def cd_kernel(basis: OrthoBasis, n: int, t: OperatorTuple,
              t2: OperatorTuple) -> np.ndarray:
    """K_n(W, W') = sum_{|sigma| <= n} phi_sigma(W) phi_sigma(W')*."""
    _check_compatible(t, t2)
    phis = evaluate_all(basis, n, t)
    phis2 = evaluate_all(basis, n, t2)
    K = np.zeros((t.dim, t.dim), dtype=complex)
    for w in phis:
        K += phis[w] @ phis2[w].conj().T
    return K


def _cd_bracket(basis: OrthoBasis, coeffs: RecurrenceCoeffs, n: int,
                phis: dict[Word, np.ndarray],
                phis2: dict[Word, np.ndarray], dim: int) -> np.ndarray:
    """Phi_{n+1}(W) B_{n,N} Phi_n(W')* - Phi_n(W) B_{n,N}* Phi_{n+1}(W')*."""
    N = coeffs.n_generators
    B = coeffs.B[n, N]
    lvl_n = enumerate_level(n, N)
    lvl_n1 = enumerate_level(n + 1, N)
    out = np.zeros((dim, dim), dtype=complex)
    for j, tau in enumerate(lvl_n):
        left = np.zeros((dim, dim), dtype=complex)
        for i, rho in enumerate(lvl_n1):
            if B[i, j] != 0.0:
                left += B[i, j] * phis[rho]
        out += left @ phis2[tau].conj().T
    for i, rho in enumerate(lvl_n1):
        left = np.zeros((dim, dim), dtype=complex)
        for j, tau in enumerate(lvl_n):
            if B[i, j] != 0.0:
                left += np.conj(B[i, j]) * phis[tau]
        out -= left @ phis2[rho].conj().T
    return out


def cd_inner_identity(basis: OrthoBasis, coeffs: RecurrenceCoeffs, n: int,
                      t: OperatorTuple, t2: OperatorTuple) -> float:
    """Residual of W_N K_n - K_n W'_N* against the bracket form; exact identity."""
    _check_compatible(t, t2)
    if coeffs.levels < n + 1:
        raise ValidationError(f"need recurrence blocks to level {n + 1}")
    phis = evaluate_all(basis, n + 1, t)
    phis2 = evaluate_all(basis, n + 1, t2)
    K = np.zeros((t.dim, t.dim), dtype=complex)
    for w in words_up_to(n, basis.n_generators):
        K += phis[w] @ phis2[w].conj().T
    lhs = t.mats[-1] @ K - K @ t2.mats[-1].conj().T
    rhs = _cd_bracket(basis, coeffs, n, phis, phis2, t.dim)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class CDFullResult:
    residual: float
    tail_bound: float
    truncation_length: int
    kernel: np.ndarray = field(repr=False, default=None)


def cd_full_check(basis: OrthoBasis, coeffs: RecurrenceCoeffs, n: int,
                  t: OperatorTuple, t2: OperatorTuple, tol: float = 1e-9,
                  cap: int = SANDWICH_CAP) -> CDFullResult:
    """Recover K_n from the half-space kernel transform of its bracket data.

    K_n(W, W') = F(W, W')[bracket/(2i)] - sum_{k<N} F(W, W')[W_k K_n W'_k*],
    the finite-level Christoffel-Darboux identity. Residual is max-abs.
    """
    _check_compatible(t, t2)
    require_membership(t, "siegel")
    require_membership(t2, "siegel")
    if coeffs.levels < n + 1:
        raise ValidationError(f"need recurrence blocks to level {n + 1}")
    phis = evaluate_all(basis, n + 1, t)
    phis2 = evaluate_all(basis, n + 1, t2)
    K = np.zeros((t.dim, t.dim), dtype=complex)
    for w in words_up_to(n, basis.n_generators):
        K += phis[w] @ phis2[w].conj().T
    bracket = _cd_bracket(basis, coeffs, n, phis, phis2, t.dim)
    first = f_sandwich(t, t2, bracket / 2j, tol, cap)
    recon = first.value
    tail = first.tail_bound
    trunc = first.truncation_length
    for k in range(t.n_generators - 1):
        piece = f_sandwich(t, t2, t.mats[k] @ K @ t2.mats[k].conj().T, tol, cap)
        recon = recon - piece.value
        tail += piece.tail_bound
        trunc = max(trunc, piece.truncation_length)
    residual = float(np.max(np.abs(K - recon)))
    return CDFullResult(residual=residual, tail_bound=tail,
                        truncation_length=trunc, kernel=K)


def reproducing_residual(f: MomentFunctional, basis: OrthoBasis, n: int,
                         p: dict[Word, complex], t: OperatorTuple) -> float:
    """max-abs gap between sum_sigma <P, phi_sigma> phi_sigma(Z) and P(Z).

    Needs deg P <= n; the projection onto the level <= n span is the
    identity there and nowhere else.
    """
    if any(len(w) > n for w in p):
        raise ValidationError("polynomial degree exceeds the projection level")
    phis = evaluate_all(basis, n, t)
    lhs = np.zeros((t.dim, t.dim), dtype=complex)
    for w in words_up_to(n, basis.n_generators):
        a = inner_product(f, p, basis.coeffs[w])
        lhs += a * phis[w]
    cache: dict[Word, np.ndarray] = {}
    rhs = np.zeros((t.dim, t.dim), dtype=complex)
    for w, c in p.items():
        rhs += c * word_product(t.mats, w, cache)
    return float(np.max(np.abs(lhs - rhs)))


def random_ball_tuple(rng: np.random.Generator, n_generators: int, dim: int,
                      margin: float = 0.3) -> OperatorTuple:
    """Random point with I - sum Z_k Z_k* having smallest eigenvalue = margin."""
    if not 0.0 < margin < 1.0:
        raise ValidationError("margin must be in (0, 1)")
    A = rng.standard_normal((n_generators, dim, dim)) \
        + 1j * rng.standard_normal((n_generators, dim, dim))
    M = sum(A[k] @ A[k].conj().T for k in range(n_generators))
    top = float(np.linalg.eigvalsh(M)[-1])
    Z = A * np.sqrt((1.0 - margin) / top)
    return OperatorTuple(n_generators=n_generators, dim=dim, mats=Z, region="ball")


def random_siegel_tuple(rng: np.random.Generator, n_generators: int, dim: int,
                        margin: float = 0.3) -> OperatorTuple:
    return cayley(random_ball_tuple(rng, n_generators, dim, margin))
