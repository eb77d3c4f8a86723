"""Transforms that move inner functions around the unit ball.

Frostman shifts compose an inner with a disk automorphism and stay inner;
Crofoot multipliers implement the matching change of model space.  The
Cayley transform turns an inner into a Herglotz-class function whose
exponentials form a semigroup of singular inners.  The idempotent
straightening conjugates a series-valued idempotent to a constant
projection degree by degree.
"""

import numpy as np
import scipy.linalg

from .errors import (
    DiagnosticError,
    NotIdempotentError,
    ShapeMismatchError,
)
from .evaluate import evaluate, random_point
from .fockspace import FockBasis, mult_operator, vec_to_series
from .ncseries import (
    NcSeries,
    max_coeff_diff,
    rescale,
    series_invert,
    series_mul,
)

# Residual gates for the idempotent straightening.
IDEMPOTENT_GATE = 1e-9
STRAIGHTEN_THRESHOLD = 1e-10


def _check_disk(w):
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError(f"shift parameter |w| = {abs(w):.4f} not inside "
                         "the unit disk")
    return w


def frostman(theta, w, N=None):
    """Frostman shift (1 - conj(w) theta)^{-1} (theta - w).

    Composes theta with the disk automorphism moving w to 0; inner inputs
    give inner outputs.  Full multiplicative support in general, so the
    result is an order-N truncation.
    """
    if not theta.is_scalar():
        raise ShapeMismatchError("frostman shift expects a scalar series")
    w = _check_disk(w)
    if N is None:
        N = theta.max_degree
    th = theta.with_max_degree(N) if theta.max_degree != N else theta
    one = NcSeries.constant(1.0, theta.d, N)
    denom = one - th.scale(np.conj(w))
    return series_mul(series_invert(denom, N), th - one.scale(w), N)


def crofoot(theta, w, N=None):
    """Crofoot multiplier sqrt(1 - |w|^2) (1 - conj(w) theta)^{-1}.

    Intertwines the model spaces of theta and of its Frostman shift; the
    kernel identity it satisfies is exercised in the kernel tests.
    """
    if not theta.is_scalar():
        raise ShapeMismatchError("crofoot multiplier expects a scalar "
                                 "series")
    w = _check_disk(w)
    if N is None:
        N = theta.max_degree
    th = theta.with_max_degree(N) if theta.max_degree != N else theta
    one = NcSeries.constant(1.0, theta.d, N)
    denom = one - th.scale(np.conj(w))
    return series_invert(denom, N).scale(np.sqrt(1.0 - abs(w) ** 2))


def homogeneous_degree(V):
    """Common length of the support words, or None if mixed."""
    lengths = {len(w) for w in V.coeffs}
    if len(lengths) == 1:
        return lengths.pop()
    return None


def eigenvector_shift(h, V, w, r, basis=None):
    """Resolvent sum h^{(r)} = sum_k (conj(w)/r^n)^k V(L)^k h.

    For h annihilated by V(L)* and V homogeneous of degree n, the result
    is an eigenvector of V(rL)* with eigenvalue conj(w); the returned
    residual measures exactly that, on the degrees the truncation computes
    faithfully.  Convergence needs |w|^(1/n) < r < 1.
    """
    if not V.is_scalar():
        raise ShapeMismatchError("eigenvector shift expects a scalar "
                                 "symbol")
    n = homogeneous_degree(V)
    if n is None or n < 1:
        raise ValueError("symbol must be homogeneous of positive degree")
    w = complex(w)
    if not abs(w) ** (1.0 / n) < r < 1.0:
        raise ValueError(
            f"radius r = {r} outside the convergence range "
            f"(|w|^(1/{n}), 1)")
    if basis is None:
        basis = FockBasis(V.d, V.max_degree)
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.size != basis.dim:
        raise ShapeMismatchError(
            f"vector length {h.size} does not match basis dimension "
            f"{basis.dim}")
    M = mult_operator(V, basis).mat
    c = np.conj(w) / r ** n
    out = h.copy()
    term = h.copy()
    for _ in range(basis.max_degree // n + 1):
        term = c * (M @ term)
        if not np.any(term):
            break
        out += term
    Mr = mult_operator(rescale(V, r), basis).mat
    res_vec = Mr.conj().T @ out - np.conj(w) * out
    cut = basis.indices_through_degree(basis.max_degree - n)
    residual = float(np.linalg.norm(res_vec[cut]))
    return out, residual


def cayley_herglotz(B, N=None):
    """(1 - B)^{-1} (1 + B): the half-plane side of the Cayley transform.

    Needs 1 - B(0) invertible; inner B with that property map to functions
    of nonnegative real part on the ball (check with herglotz_min_real).
    """
    if B.rows != B.cols:
        raise ShapeMismatchError("cayley transform needs square "
                                 "coefficients")
    if N is None:
        N = B.max_degree
    Bn = B.with_max_degree(N) if B.max_degree != N else B
    one = NcSeries.identity(B.rows, B.d, N) if B.rows > 1 else \
        NcSeries.constant(1.0, B.d, N)
    return series_mul(series_invert(one - Bn, N), one + Bn, N)


def herglotz_min_real(H, samples=None, rng=None, num_samples=50,
                      levels=(1, 2, 3), row_norm=0.6):
    """Smallest eigenvalue of Re H(Z) over sample points (sampling
    evidence for the Herglotz property; nonnegative up to tolerance)."""
    if samples is None:
        if rng is None:
            rng = np.random.default_rng(0)
        samples = [random_point(rng, H.d, levels[i % len(levels)], row_norm)
                   for i in range(num_samples)]
    worst = np.inf
    for Z in samples:
        A = evaluate(H, Z)
        vals = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
        worst = min(worst, float(vals[0]))
    return worst


def semigroup_inner(B, t, N=None):
    """exp(-t H_B) as a series: the singular-inner semigroup through B.

    Computed as the vacuum column of the matrix exponential of the
    multiplication operator of -t H_B.  That operator is block lower
    triangular in the degree grading, so the truncated vacuum column
    agrees with the exact coefficients through degree N.
    """
    if not B.is_scalar():
        raise ShapeMismatchError("semigroup construction expects a scalar "
                                 "inner")
    if t < 0:
        raise ValueError(f"semigroup parameter t = {t} must be >= 0")
    if N is None:
        N = B.max_degree
    H = cayley_herglotz(B, N)
    basis = FockBasis(B.d, N)
    G = mult_operator(H, basis).mat
    E = scipy.linalg.expm(-t * G)
    return vec_to_series(E[:, 0], basis)


class IdempotentSplit:
    """Conjugation straightening an idempotent to a constant projection."""

    def __init__(self, S, P, m, k, residual):
        self.S = S
        self.P = P
        self.m = int(m)
        self.k = int(k)
        self.residual = float(residual)

    def __repr__(self):
        return (f"IdempotentSplit(m={self.m}, k={self.k}, "
                f"residual={self.residual:.3e})")


def idempotent_split(E, N=None, gate=IDEMPOTENT_GATE):
    """Conjugate a series idempotent to diag(I_m, 0_k), degree by degree.

    The constant term is straightened by a basis of its range and kernel;
    at each degree j the idempotency relation forces the remaining
    coefficients off-diagonal, and conjugating by I + [[0, B], [-C, 0]]
    removes them without touching lower degrees.  Exactly idempotent
    inputs come out with machine-precision residuals.
    """
    n = E.rows
    if E.cols != n:
        raise ShapeMismatchError("idempotent must have square coefficients")
    if N is None:
        N = E.max_degree
    En = E.with_max_degree(N) if E.max_degree != N else E
    sq = series_mul(En, En, N)
    idem_res = max_coeff_diff(sq, En, N)
    if idem_res > gate:
        raise NotIdempotentError(
            f"E*E - E has coefficient error {idem_res:.3e} (gate "
            f"{gate:.1e})", residual=idem_res)

    E0 = En.coeff(())
    U, sig, Vh = np.linalg.svd(E0)
    if sig.size and sig[0] > 0:
        m = int(np.sum(sig > 1e-10 * sig[0]))
    else:
        m = 0
    k = n - m
    C0 = np.concatenate([U[:, :m], Vh.conj().T[:, m:]], axis=1)
    smin = np.linalg.svd(C0, compute_uv=False)[-1] if n else 0.0
    if n and smin < 1e-8:
        raise DiagnosticError(
            f"range/kernel basis of the constant term is ill conditioned "
            f"(sigma_min = {smin:.3e})")

    S = NcSeries.constant(np.linalg.inv(C0), E.d, N)
    cur = series_mul(series_mul(S, En, N), NcSeries.constant(C0, E.d, N), N)
    for j in range(1, N + 1):
        U_coeffs = {}
        for w, M in cur.coeffs.items():
            if len(w) != j:
                continue
            Uw = np.zeros((n, n), dtype=complex)
            Uw[:m, m:] = M[:m, m:]
            Uw[m:, :m] = -M[m:, :m]
            if np.any(Uw):
                U_coeffs[w] = Uw
        if not U_coeffs:
            continue
        Sj = NcSeries.identity(n, E.d, N) + NcSeries(E.d, n, n, N, U_coeffs)
        Sj_inv = series_invert(Sj, N)
        cur = series_mul(series_mul(Sj, cur, N), Sj_inv, N)
        S = series_mul(Sj, S, N)

    P = np.zeros((n, n))
    P[:m, :m] = np.eye(m)
    resid = max_coeff_diff(cur, NcSeries.constant(P, E.d, N), N)
    if resid > STRAIGHTEN_THRESHOLD:
        raise DiagnosticError(
            f"straightening stalled at residual {resid:.3e} "
            f"(threshold {STRAIGHTEN_THRESHOLD:.1e})")
    return IdempotentSplit(S, P, m, k, resid)
