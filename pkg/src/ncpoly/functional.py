"""Moment functionals and their kernels.

A functional is determined by its moment data on words. Three kinds are
supported:

* ``hankel``: the real-line analogue. The generators are self-adjoint, so
  the kernel is K(sigma, tau) = s_{I(sigma).tau} where I reverses words,
  and the moments satisfy s_{I(w)} = conj(s_w).
* ``toeplitz``: the circle analogue. The kernel is stationary under common
  left factors, K(u.s, u.t) = K(s, t), vanishes on words that are not
  prefix-comparable, and is determined by c_a = K(e, a).
* ``generic``: an explicitly stored Hermitian kernel on word pairs.

The Gram matrix at a level collects kernel entries over all words of length
up to that level in graded-lex order. Its entry (sigma, tau) pairs F_tau
against F_sigma, conjugate-linearly in sigma; coefficient vectors p, q of
polynomials P, Q therefore have inner product <P, Q> = q^H G p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataIncompleteError, PositivityError, ValidationError
from .words import EMPTY, Word, concat, involution, words_up_to

KINDS = ("hankel", "toeplitz", "generic")

_SYM_TOL = 1e-10


@dataclass
class MomentFunctional:
    """Moment data for a unital positive-candidate functional.

    ``moments`` maps words of length <= max_degree to complex values. For
    hankel and generic kinds these are s_w = phi(Y_w); for toeplitz they are
    the stationary data c_a = K(e, a). Generic kind additionally carries the
    full kernel table keyed by word pairs.
    """

    n_generators: int
    kind: str
    max_degree: int
    moments: dict[Word, complex]
    kernel: dict[tuple[Word, Word], complex] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.n_generators < 1:
            raise ValidationError("n_generators must be >= 1")
        if self.max_degree < 0:
            raise ValidationError("max_degree must be >= 0")
        self.moments = {w: complex(v) for w, v in self.moments.items()}
        s_e = self.moments.get(EMPTY)
        if s_e is None or abs(s_e - 1.0) > 1e-9:
            raise ValidationError("functional must be unital: moment at 'e' must be 1")
        scale = max(1.0, max(abs(v) for v in self.moments.values()))
        if self.kind == "hankel":
            for w, v in self.moments.items():
                rev = involution(w)
                other = self.moments.get(rev)
                if other is None:
                    raise ValidationError(f"moment for {rev} missing (involution partner of {w})")
                if abs(other - np.conj(v)) > _SYM_TOL * scale:
                    raise ValidationError(
                        f"involution symmetry violated at {w}: s_{rev} != conj(s_{w})")
        if self.kind == "generic":
            if self.kernel is None:
                raise ValidationError("generic kind requires a kernel table")
            self.kernel = {k: complex(v) for k, v in self.kernel.items()}
            for (s, t), v in self.kernel.items():
                rv = self.kernel.get((t, s))
                if rv is not None and abs(rv - np.conj(v)) > _SYM_TOL * max(1.0, abs(v)):
                    raise ValidationError(f"kernel not Hermitian at ({s}, {t})")
            for w, v in self.moments.items():
                kv = self._generic_lookup(EMPTY, w)
                if kv is not None and abs(kv - v) > _SYM_TOL * scale:
                    raise ValidationError(
                        f"kernel entry (e, {w}) disagrees with stored moment")

    def _generic_lookup(self, s: Word, t: Word) -> complex | None:
        assert self.kernel is not None
        v = self.kernel.get((s, t))
        if v is not None:
            return v
        v = self.kernel.get((t, s))
        if v is not None:
            return complex(np.conj(v))
        return None

    def moment(self, w: Word) -> complex:
        try:
            return self.moments[w]
        except KeyError:
            raise DataIncompleteError(str(w)) from None


def kernel_entry(f: MomentFunctional, sigma: Word, tau: Word) -> complex:
    """K(sigma, tau), the pairing of F_tau against F_sigma."""
    if f.kind == "hankel":
        return f.moment(concat(involution(sigma), tau))
    if f.kind == "toeplitz":
        ls, lt = len(sigma), len(tau)
        if lt >= ls and tau.letters[:ls] == sigma.letters:
            return f.moment(Word(tau.letters[ls:]))
        if ls > lt and sigma.letters[:lt] == tau.letters:
            return complex(np.conj(f.moment(Word(sigma.letters[lt:]))))
        return 0.0 + 0.0j
    v = f._generic_lookup(sigma, tau)
    if v is None:
        raise DataIncompleteError(f"{sigma}|{tau}")
    return v


@dataclass
class GramMatrix:
    """Kernel entries over all words of length <= level, graded-lex order."""

    level: int
    words: list[Word]
    entries: np.ndarray

    def index(self, w: Word) -> int:
        return self._index[w]

    def __post_init__(self):
        self._index = {w: i for i, w in enumerate(self.words)}

    def entry(self, sigma: Word, tau: Word) -> complex:
        return complex(self.entries[self.index(sigma), self.index(tau)])


def gram(f: MomentFunctional, level: int) -> GramMatrix:
    ws = words_up_to(level, f.n_generators)
    m = len(ws)
    G = np.empty((m, m), dtype=complex)
    for i, s in enumerate(ws):
        for j, t in enumerate(ws):
            if j < i:
                G[i, j] = np.conj(G[j, i])
            else:
                G[i, j] = kernel_entry(f, s, t)
    return GramMatrix(level=level, words=ws, entries=G)


@dataclass
class PositivityResult:
    ok: bool
    min_eigenvalue: float
    threshold: float
    certificate: dict[Word, complex] | None = None


def strict_positivity(f: MomentFunctional, level: int, tol: float = 1e-9) -> PositivityResult:
    """Decide strict positive definiteness of the Gram matrix at a level.

    The test is min eigenvalue > tol * max(1, largest diagonal entry), via a
    symmetric eigensolver. On failure the certificate is the unit eigenvector
    for the minimal eigenvalue, keyed by words: a polynomial of near-zero
    norm against the functional.
    """
    G = gram(f, level)
    vals, vecs = np.linalg.eigh(G.entries)
    threshold = tol * max(1.0, float(np.max(np.real(np.diag(G.entries)))))
    lam = float(vals[0])
    if lam > threshold:
        return PositivityResult(ok=True, min_eigenvalue=lam, threshold=threshold)
    vec = vecs[:, 0]
    cert = {w: complex(vec[i]) for i, w in enumerate(G.words)}
    return PositivityResult(ok=False, min_eigenvalue=lam, threshold=threshold,
                            certificate=cert)


def require_strict_positivity(f: MomentFunctional, level: int, tol: float = 1e-9) -> PositivityResult:
    res = strict_positivity(f, level, tol)
    if not res.ok:
        raise PositivityError(
            f"Gram matrix at level {level} is not strictly positive "
            f"(min eigenvalue {res.min_eigenvalue:.3e})",
            min_eigenvalue=res.min_eigenvalue, certificate=res.certificate)
    return res


def from_representation(mats, v, max_degree: int, atol: float = 1e-12) -> MomentFunctional:
    """Moments s_w = <X_w v, v> of a tuple of Hermitian matrices at a unit vector.

    The resulting hankel functional is positive by construction: its Gram
    matrix is the matrix of inner products of the vectors X_tau v.
    """
    X = np.asarray(mats, dtype=complex)
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise ValidationError("mats must have shape (N, d, d)")
    n, d, _ = X.shape
    for k in range(n):
        dev = np.max(np.abs(X[k] - X[k].conj().T))
        if dev > atol * (1.0 + np.max(np.abs(X[k]))):
            raise ValidationError(f"matrix {k + 1} is not Hermitian (deviation {dev:.3e})")
        X[k] = (X[k] + X[k].conj().T) / 2.0
    v = np.asarray(v, dtype=complex).reshape(d)
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-9:
        raise ValidationError("v must be a unit vector")

    vectors: dict[Word, np.ndarray] = {EMPTY: v}
    moments: dict[Word, complex] = {EMPTY: complex(np.vdot(v, v))}
    frontier = [EMPTY]
    for _ in range(max_degree):
        nxt = []
        for w in frontier:
            base = vectors[w]
            for k in range(1, n + 1):
                kw = Word((k,) + w.letters)
                vec = X[k - 1] @ base
                vectors[kw] = vec
                moments[kw] = complex(np.vdot(v, vec))
                nxt.append(kw)
        frontier = nxt
    # the kernel symmetry holds in exact arithmetic; make it exact in floats
    for w in list(moments):
        rev = involution(w)
        if rev >= w:
            avg = (moments[w] + np.conj(moments[rev])) / 2.0
            moments[w] = avg
            moments[rev] = complex(np.conj(avg))
    moments[EMPTY] = 1.0 + 0.0j
    return MomentFunctional(n_generators=n, kind="hankel", max_degree=max_degree,
                            moments=moments)


def inner_product(f: MomentFunctional, p: dict[Word, complex], q: dict[Word, complex]) -> complex:
    """<P, Q> for coefficient dicts: sum conj(q_d) K(d, b) p_b."""
    total = 0.0 + 0.0j
    for d_word, qc in q.items():
        if qc == 0:
            continue
        for b_word, pc in p.items():
            if pc == 0:
                continue
            total += np.conj(qc) * kernel_entry(f, d_word, b_word) * pc
    return complex(total)
