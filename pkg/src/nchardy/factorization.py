"""Inner-outer factorization and Blaschke/singular classification.

The range of multiplication by H, closed under the right shifts, has a
wandering part whose orthonormal basis generates the inner factor.  On
truncations the wandering dimension is computed robustly as a rank
difference, but the wandering eigenvectors themselves inherit too much
truncation noise to deliver coefficient-accurate factors.  The factors are
therefore produced by spectral factorization of the autocorrelation data
t_s(H) = sum_m conj(H_m) H_{ms}, which depend only on the outer part; a
damped least-squares solve recovers the outer factor to machine precision
and the inner factor follows by division.  The subspace route remains
available and is what the classification tests are built on.

Classification (Blaschke vs singular) is evidence-based: kernel vectors at
sampled singularity pairs span part of the range orthocomplement, and the
reported defect says how much of it they exhaust at the chosen window.
"""

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import DiagnosticError, ShapeMismatchError, ValidityWindowError
from .evaluate import random_point
from .fockspace import (
    FockBasis,
    RANK_REL,
    WANDER_EIG_TOL,
    mult_operator,
    orthonormal_frame,
    right_shift_matrix,
    smallest_singular_value,
    vec_to_series,
    wandering_dimension,
    wandering_projection,
    wandering_vectors,
)
from .kernels import check_inner, inner_defect, sing_space_complement
from .ncseries import (
    NcSeries,
    h2_norm,
    max_coeff_diff,
    phase_normalize,
    rescale,
    series_invert,
    series_mul,
)

# Classification threshold: a Blaschke defect at or below this counts as
# evidence that the sampled kernels exhaust the orthocomplement.
BLASCHKE_THRESHOLD = 0.25

# sigma_min floor for "pointwise invertible" verdicts.
SINGULAR_SIGMA_TOL = 1e-8


class Subspace:
    """Orthonormal frame in truncated Fock space with bookkeeping."""

    def __init__(self, basis, frame, valid_degree, invariant=False,
                 channels=1):
        self.basis = basis
        self.frame = frame
        self.valid_degree = int(valid_degree)
        self.invariant = bool(invariant)
        self.channels = int(channels)

    @property
    def dim(self):
        return self.frame.shape[1]

    def projection(self):
        return self.frame @ self.frame.conj().T

    def __repr__(self):
        return (f"Subspace(dim={self.dim}, valid_degree={self.valid_degree}, "
                f"invariant={self.invariant})")


class FactorizationResult:
    """Inner and outer factors with their certification data."""

    def __init__(self, inner, outer, wandering_dim, defects, valid_degree):
        self.inner = inner
        self.outer = outer
        self.wandering_dim = int(wandering_dim)
        self.defects = dict(defects)
        self.valid_degree = int(valid_degree)

    def __repr__(self):
        return (f"FactorizationResult(wandering_dim={self.wandering_dim}, "
                f"defects={self.defects})")


def range_closure(H, N=None, col_degree=None):
    """Orthonormal frame for the span of H times monomials.

    Columns run over words of length <= col_degree, by default the validity
    window N - deg(H).  Passing a larger col_degree is allowed for
    full-support symbols (whose window is empty); the frame then contains
    truncated columns and valid_degree records what is actually trusted.
    The result is flagged invariant: the span of {H z^w} is carried into
    itself by the right shifts, up to truncation.
    """
    if all(not np.any(m) for m in H.coeffs.values()) or not H.coeffs:
        raise ValueError("range closure of the zero series")
    if N is None:
        N = H.max_degree
    basis = FockBasis(H.d, N)
    op = mult_operator(H, basis)
    if col_degree is None:
        col_degree = op.valid_degree
    if col_degree > N:
        raise ValidityWindowError(
            f"column degree {col_degree} exceeds truncation order {N}")
    frame = orthonormal_frame(op.restricted(col_degree))
    return Subspace(basis, frame, op.valid_degree, invariant=True,
                    channels=H.rows)


def wandering_subspace(M, tol=WANDER_EIG_TOL):
    """Generating part of an invariant subspace: M minus its shifts.

    Eigenvectors of Q - sum_k R_k Q R_k* with eigenvalue within tol of 1.
    Truncation perturbs the projector, so the tolerance is the contract.
    """
    if not M.invariant:
        raise ValueError("wandering subspace needs an invariant subspace")
    Q = M.projection()
    P = wandering_projection(Q, M.basis, channels=M.channels)
    W, _ = wandering_vectors(P, tol=tol)
    return Subspace(M.basis, W, M.valid_degree, invariant=False,
                    channels=M.channels)


# -- autocorrelation spectral factorization ---------------------------


def autocorrelation(H, m=None):
    """t_s(H) = sum_m coeff(H, m)^H coeff(H, m s) for |s| <= m.

    These matrices are blind to inner factors on the left: if H = B F with
    B inner then t_s(H) = t_s(F), which is what makes them the right data
    for recovering the outer part.
    """
    if m is None:
        m = H.degree()
    words = _words_through(H.d, m)
    out = {}
    for s in words:
        acc = np.zeros((H.cols, H.cols), dtype=complex)
        for mu, Hm in H.coeffs.items():
            if len(mu) + len(s) > m:
                continue
            Hms = H.coeffs.get(mu + s)
            if Hms is not None:
                acc += Hm.conj().T @ Hms
        out[s] = acc
    return out


def _words_through(d, m):
    words = [()]
    level = [()]
    for _ in range(m):
        level = [w + (k,) for w in level for k in range(1, d + 1)]
        words.extend(level)
    return words


def _pack(Fdict, words, n):
    """Real parameter vector: vacuum coefficient Hermitian, rest free."""
    parts = []
    F0 = Fdict[()]
    for i in range(n):
        parts.append(F0[i, i].real)
    for i in range(n):
        for j in range(i + 1, n):
            parts.append(F0[i, j].real)
            parts.append(F0[i, j].imag)
    for w in words:
        if w == ():
            continue
        M = Fdict[w]
        parts.append(M.real.reshape(-1))
        parts.append(M.imag.reshape(-1))
    return np.concatenate([np.atleast_1d(p) for p in parts])


def _unpack(x, words, n):
    Fdict = {}
    F0 = np.zeros((n, n), dtype=complex)
    pos = 0
    for i in range(n):
        F0[i, i] = x[pos]
        pos += 1
    for i in range(n):
        for j in range(i + 1, n):
            F0[i, j] = x[pos] + 1j * x[pos + 1]
            F0[j, i] = x[pos] - 1j * x[pos + 1]
            pos += 2
    Fdict[()] = F0
    nn = n * n
    for w in words:
        if w == ():
            continue
        re = x[pos:pos + nn].reshape(n, n)
        pos += nn
        im = x[pos:pos + nn].reshape(n, n)
        pos += nn
        Fdict[w] = re + 1j * im
    return Fdict


def spectral_outer(H, degree=None, max_retries=4, seed=0):
    """Outer factor of H from its autocorrelation data.

    Solves t_s(F) = t_s(H) for all |s| <= deg(H) over series F of the same
    degree, with the vacuum coefficient gauged Hermitian (scalar: real).
    The initial guess sqrt(t_empty) is the constant of maximal vacuum mass,
    which steers the iteration onto the outer branch; residuals at the
    solution are at machine precision or the solve is declared failed.
    """
    if H.rows != H.cols:
        raise ShapeMismatchError("spectral factorization needs square "
                                 "coefficients")
    n = H.rows
    m = H.degree() if degree is None else int(degree)
    words = _words_through(H.d, m)
    target = autocorrelation(H, m)
    t0 = target[()]
    scale = max(1.0, float(np.linalg.norm(t0)))

    def residual(x):
        Fd = _unpack(x, words, n)
        out = []
        for s in words:
            acc = -target[s]
            ls = len(s)
            for mu, Fm in Fd.items():
                if len(mu) + ls > m:
                    continue
                Fms = Fd.get(mu + s)
                if Fms is not None:
                    acc = acc + Fm.conj().T @ Fms
            out.append(acc.real.reshape(-1))
            out.append(acc.imag.reshape(-1))
        return np.concatenate(out)

    vals, vecs = np.linalg.eigh(0.5 * (t0 + t0.conj().T))
    sqrt0 = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    init = {w: np.zeros((n, n), dtype=complex) for w in words}
    init[()] = sqrt0
    x0 = _pack(init, words, n)
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max_retries):
        res = scipy.optimize.least_squares(
            residual, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        err = float(np.max(np.abs(res.fun))) if res.fun.size else 0.0
        if best is None or err < best[0]:
            best = (err, res.x)
        if err <= 1e-11 * scale:
            break
        x0 = _pack(init, words, n) + 0.1 * np.sqrt(scale) * \
            rng.standard_normal(x0.size)
    err, xbest = best
    if err > 1e-11 * scale:
        raise DiagnosticError(
            f"autocorrelation factorization did not converge "
            f"(residual {err:.3e} after {max_retries} attempts)")
    Fd = _unpack(xbest, words, n)
    if n == 1 and Fd[()][0, 0].real < 0:
        Fd = {w: -M for w, M in Fd.items()}
    coeffs = {w: M for w, M in Fd.items() if np.any(np.abs(M) > 1e-14)}
    if n == 1:
        return NcSeries(H.d, 1, 1, m, coeffs)
    return NcSeries(H.d, n, n, m, coeffs)


def shift_adjoint_apply(omega, H, out_degree=None):
    """Coefficients of omega(L)* applied to H: F_b = sum_a conj(om_a) H_{ab}.

    omega scalar, H scalar or matrix-valued; the result keeps H's shape.
    """
    if not omega.is_scalar():
        raise ShapeMismatchError("adjoint application needs a scalar symbol")
    if out_degree is None:
        out_degree = H.max_degree
    coeffs = {}
    for w, Hm in H.coeffs.items():
        for a, om in omega.coeffs.items():
            la = len(a)
            if la > len(w) or w[:la] != a:
                continue
            b = w[la:]
            if len(b) > out_degree:
                continue
            term = np.conj(om[0, 0]) * Hm
            if b in coeffs:
                coeffs[b] = coeffs[b] + term
            else:
                coeffs[b] = term
    coeffs = {w: m for w, m in coeffs.items() if np.any(m)}
    return NcSeries(H.d, H.rows, H.cols, out_degree, coeffs)


def inner_outer(H, N=None):
    """Factor H into an inner times an outer part.

    Scalar H with wandering dimension 1 (and square matrix H) go through
    the autocorrelation engine; scalar H with a larger wandering dimension
    falls back to the wandering-frame construction, whose defects are
    honestly truncation-limited.  Defects and the wandering dimension are
    always reported.
    """
    Hp = H.prune()
    if not Hp.coeffs:
        raise ValueError("cannot factor the zero series")
    if N is None:
        N = H.max_degree
    m = Hp.degree()
    if m > N:
        raise ValidityWindowError(f"degree {m} exceeds truncation {N}")
    HN = Hp.truncate(N).with_max_degree(N) if Hp.max_degree != N else Hp

    if H.rows != H.cols:
        raise ShapeMismatchError("only scalar or square series supported")

    if m == 0:
        c = HN.coeff(())
        inner = NcSeries.constant(np.eye(H.rows), H.d, N)
        defects = {"inner_defect": 0.0, "outer_defect": 0.0,
                   "reconstruction_error": 0.0}
        return FactorizationResult(inner, HN.copy(), H.rows, defects, N)

    scalar = HN.is_scalar()
    if scalar:
        basis = FockBasis(H.d, N)
        op = mult_operator(HN, basis)
        col = op.valid_degree
        wdim = wandering_dimension(op, col_degree=col) if col >= 0 else 1
    else:
        wdim = H.rows

    if scalar and wdim != 1:
        return _inner_outer_frames(HN, N)

    F = spectral_outer(HN, degree=m)
    B = series_mul(HN, series_invert(F.with_max_degree(N), N), N).prune()
    B, u = phase_normalize(B)
    outer = F.with_max_degree(N).scale(u).prune()
    recon = max_coeff_diff(series_mul(B, outer, N), HN, N)
    defects = {
        "inner_defect": inner_defect(B),
        "outer_defect": outer_defect(outer, N),
        "reconstruction_error": recon,
    }
    return FactorizationResult(B, outer, wdim, defects, N - m)


def _inner_outer_frames(H, N):
    """Wandering-frame construction for wandering dimension > 1."""
    RC = range_closure(H, N)
    W = wandering_subspace(RC)
    mdim = W.dim
    if mdim == 0:
        raise DiagnosticError(
            "wandering rank collapse: no eigenvalue near 1 at this "
            "truncation")
    cols = []
    for i in range(mdim):
        cols.append(vec_to_series(W.frame[:, i], W.basis))
    inner_coeffs = {}
    for i, s in enumerate(cols):
        for w, mcoef in s.coeffs.items():
            block = inner_coeffs.setdefault(
                w, np.zeros((1, mdim), dtype=complex))
            block[0, i] = mcoef[0, 0]
    inner = NcSeries(H.d, 1, mdim, N, inner_coeffs)
    outer_cols = [shift_adjoint_apply(s, H, N) for s in cols]
    outer_coeffs = {}
    for i, s in enumerate(outer_cols):
        for w, mcoef in s.coeffs.items():
            block = outer_coeffs.setdefault(
                w, np.zeros((mdim, 1), dtype=complex))
            block[i, 0] = mcoef[0, 0]
    outer = NcSeries(H.d, mdim, 1, N, outer_coeffs)
    window = max(0, W.valid_degree)
    recon = max_coeff_diff(series_mul(inner, outer, N), H, window)
    defects = {
        "inner_defect": float("nan"),
        "outer_defect": float("nan"),
        "reconstruction_error": recon,
    }
    return FactorizationResult(inner, outer, mdim, defects, window)


def outer_defect(h, N=None):
    """Distance from the vacuum to the span of right translates of h.

    Zero means the constants are reachable: the cyclicity that defines
    outer elements, tested at truncation order N.  Column-valued h reports
    the best vacuum direction; square h has to reach every one, so the
    worst direction is reported instead.
    """
    if N is None:
        N = h.max_degree
    if h.cols != 1 and h.rows != h.cols:
        raise ShapeMismatchError(
            "outer defect expects scalar, column, or square h")
    basis = FockBasis(h.d, N)
    op = mult_operator(h.truncate(N), basis)
    col = max(op.valid_degree, 0)
    Q = orthonormal_frame(op.restricted(col))
    p = h.rows
    E0 = np.zeros((basis.dim * p, p), dtype=complex)
    E0[0:p, 0:p] = np.eye(p)
    Rm = E0 - Q @ (Q.conj().T @ E0)
    G = Rm.conj().T @ Rm
    vals = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    pick = vals[-1] if h.cols == h.rows and h.rows > 1 else vals[0]
    return float(np.sqrt(max(pick, 0.0)))


def solve_vacuum(f, r, N=None):
    """Least-squares residual of (multiplication by f(r.)) x = vacuum.

    A surjectivity proxy: residuals tending to zero with N certify that
    the constants lie in the closed range, the outer property at work.
    """
    if not f.is_scalar():
        raise ShapeMismatchError("solve_vacuum expects a scalar series")
    if not 0.0 <= r < 1.0:
        raise ValueError(f"radius {r} outside [0, 1)")
    if N is None:
        N = f.max_degree
    basis = FockBasis(f.d, N)
    op = mult_operator(rescale(f.truncate(N), r), basis)
    e0 = np.zeros(basis.dim, dtype=complex)
    e0[0] = 1.0
    x, _, _, _ = np.linalg.lstsq(op.mat, e0, rcond=None)
    return float(np.linalg.norm(op.mat @ x - e0))


# -- classification ---------------------------------------------------


def _combined_kernel_frame(pairs, probes, N, extra_frame, d):
    cols = []
    if pairs:
        QK = sing_space_complement(pairs, probes=probes, N=N)
        if QK.shape[1]:
            cols.append(QK)
    if extra_frame is not None and extra_frame.size:
        cols.append(np.asarray(extra_frame, dtype=complex))
    if not cols:
        dim = FockBasis(d, N).dim
        return np.zeros((dim, 0), dtype=complex)
    return orthonormal_frame(np.concatenate(cols, axis=1))


def crofoot_kernel_frame(theta, w, N=None):
    """Orthonormal frame for the model space of the Frostman shift.

    The Crofoot multiplier maps the model space of theta (the kernel of
    theta(L)*) onto the model space of its shift by w; applying its
    multiplication operator to a kernel basis materializes that image at
    the working truncation.  This is the rich frame the classification
    defect needs for full-support shifted inners, where sampled pairs at
    small levels cannot span enough.
    """
    from .transforms import crofoot

    if N is None:
        N = theta.max_degree
    basis = FockBasis(theta.d, N)
    M = mult_operator(theta.with_max_degree(N), basis).mat
    ker = scipy.linalg.null_space(M.conj().T)
    C = mult_operator(crofoot(theta, w, N), basis).mat
    return orthonormal_frame(C @ ker)


def blaschke_defect(theta, pairs, N=None, probes=None, col_degree=None,
                    window=None, extra_frame=None):
    """How much of the range orthocomplement the sampled kernels miss.

    Compares the projection onto range_closure(theta)-orthocomplement with
    the projection onto the span of kernel vectors at the given singularity
    pairs (plus any extra frame columns), both cut to words of length <=
    window.  Zero is Blaschke evidence; 1 with no pairs just restates that
    the orthocomplement is nontrivial.  Genuine kernel data can only fill
    more of the orthocomplement, but thin sampling reports large defects
    honestly rather than guessing.
    """
    if not theta.is_scalar():
        raise ShapeMismatchError("classification expects a scalar inner")
    if N is None:
        N = theta.max_degree
    deg = theta.degree()
    valid = N - deg
    if col_degree is None:
        col_degree = valid if valid >= 1 else min(3, N)
    if window is None:
        window = col_degree if valid >= 1 else max(col_degree - 1, 0)
    RC = range_closure(theta, N, col_degree=col_degree)
    basis = RC.basis
    Pperp = np.eye(basis.dim, dtype=complex) - RC.projection()
    QK = _combined_kernel_frame(pairs, probes, N, extra_frame, theta.d)
    PK = QK @ QK.conj().T
    cut = basis.indices_through_degree(window)
    Dmat = (Pperp - PK)[np.ix_(cut, cut)]
    return float(np.linalg.norm(Dmat, 2))


def singular_test(S, samples=None, rng=None, num_samples=200,
                  levels=(1, 2, 3), row_norm=0.7, tol=SINGULAR_SIGMA_TOL,
                  r_grid=(0.5, 0.9), inner_tol=None):
    """Evidence that an inner S is pointwise invertible on the ball.

    Checks S at the origin first (a necessary condition), then the minimum
    of sigma_min(S(Z)) over the sample points, then sigma_min of the
    multiplication operator at rescaled radii on its validity window.  The
    verdict "singular" means every minimum stayed above tol; it is sampling
    evidence, not a proof.
    """
    from .evaluate import evaluate

    check_inner(S, tol=inner_tol)
    report = {"tol": tol, "r_grid": {}, "num_samples": 0}
    c0 = S.coeff(())
    s0 = float(np.linalg.svd(np.atleast_2d(c0), compute_uv=False)[-1])
    report["constant_sigma"] = s0
    if samples is None:
        if rng is None:
            rng = np.random.default_rng(0)
        samples = []
        for i in range(num_samples):
            n = levels[i % len(levels)]
            samples.append(random_point(rng, S.d, n, row_norm))
    min_sigma = np.inf
    for Z in samples:
        A = evaluate(S, Z)
        sv = np.linalg.svd(A, compute_uv=False)
        min_sigma = min(min_sigma, float(sv[-1]))
    report["num_samples"] = len(samples)
    report["min_sample_sigma"] = float(min_sigma)
    basis = FockBasis(S.d, S.max_degree)
    for r in r_grid:
        op = mult_operator(rescale(S, r), basis)
        report["r_grid"][r] = smallest_singular_value(op, op.valid_degree)
    report["singular"] = bool(
        s0 > tol and min_sigma > tol
        and all(v > tol for v in report["r_grid"].values()))
    return report


class SplitResult:
    """Blaschke and singular parts with defects and diagnostic flags."""

    def __init__(self, blaschke, singular, wandering_dim, defects, flags):
        self.blaschke = blaschke
        self.singular = singular
        self.wandering_dim = wandering_dim
        self.defects = dict(defects)
        self.flags = list(flags)

    @property
    def diagnostic(self):
        if "sampling-insufficient" in self.flags:
            return True
        return ("no-pairs" in self.flags
                and "consistent-with-singular" not in self.flags)

    def __repr__(self):
        return (f"SplitResult(wandering_dim={self.wandering_dim}, "
                f"flags={self.flags})")


def blaschke_singular_split(theta, pairs, N=None, probes=None,
                            extra_frame=None, threshold=BLASCHKE_THRESHOLD,
                            col_degree=None, window=None, wander_tol=1e-6,
                            rng=None, inner_tol=None):
    """Split an inner into Blaschke and singular parts, evidence-based.

    With no singularity data at all the split cannot be better than the
    singular verdict of sampling, so it returns (1, theta) flagged
    "no-pairs".  When the kernel span exhausts the orthocomplement within
    the threshold, theta itself is Blaschke and the singular part is the
    phase constant.  Otherwise the orthocomplement of the kernel span is
    taken as the singularity space, its wandering vector (when unique)
    gives the Blaschke part, and the adjoint application recovers the
    singular part.
    """
    check_inner(theta, tol=inner_tol)
    if not theta.is_scalar():
        raise ShapeMismatchError("split expects a scalar inner")
    if N is None:
        N = theta.max_degree
    one = NcSeries.constant(1.0, theta.d, N)
    has_data = bool(pairs) or (extra_frame is not None
                               and np.asarray(extra_frame).size > 0)
    if not has_data:
        st = singular_test(theta, rng=rng, inner_tol=inner_tol)
        flags = ["no-pairs"]
        if st["singular"]:
            flags.append("consistent-with-singular")
        defects = {"blaschke_defect": 1.0, "singular_report": st,
                   "reconstruction_error": 0.0}
        return SplitResult(one, theta.copy(), 0, defects, flags)

    defect = blaschke_defect(theta, pairs, N, probes=probes,
                             col_degree=col_degree, window=window,
                             extra_frame=extra_frame)
    if defect <= threshold:
        B, u = phase_normalize(theta)
        S = NcSeries.constant(u, theta.d, N)
        defects = {"blaschke_defect": defect,
                   "reconstruction_error": 0.0,
                   "blaschke_inner_defect": inner_defect(B)}
        return SplitResult(B, S, 1, defects, [])

    QK = _combined_kernel_frame(pairs, probes, N, extra_frame, theta.d)
    basis = FockBasis(theta.d, N)
    comp = scipy.linalg.null_space(QK.conj().T)
    Q = comp @ comp.conj().T
    P = wandering_projection(Q, basis)
    W, _ = wandering_vectors(P, tol=wander_tol)
    if W.shape[1] != 1:
        defects = {"blaschke_defect": defect,
                   "wandering_count": W.shape[1]}
        return SplitResult(one, theta.copy(), W.shape[1], defects,
                           ["sampling-insufficient"])
    B = vec_to_series(W[:, 0], basis)
    B, _ = phase_normalize(B)
    degB = B.degree()
    S = shift_adjoint_apply(B, theta, N)
    window = max(0, N - degB)
    recon = max_coeff_diff(series_mul(B, S, N), theta, window)
    defects = {
        "blaschke_defect": defect,
        "reconstruction_error": recon,
        "blaschke_inner_defect": inner_defect(B),
        "singular_inner_defect": inner_defect(S),
    }
    return SplitResult(B, S, 1, defects, [])


class BsoResult:
    """Blaschke, singular, and outer factors of a full factorization."""

    def __init__(self, blaschke, singular, outer, wandering_dim, defects,
                 flags):
        self.blaschke = blaschke
        self.singular = singular
        self.outer = outer
        self.wandering_dim = wandering_dim
        self.defects = dict(defects)
        self.flags = list(flags)

    @property
    def diagnostic(self):
        return "sampling-insufficient" in self.flags

    def __repr__(self):
        return (f"BsoResult(wandering_dim={self.wandering_dim}, "
                f"flags={self.flags})")


def bso_factor(H, N=None, pairs=(), probes=None, extra_frame=None,
               threshold=BLASCHKE_THRESHOLD, rng=None, inner_tol=None):
    """Full Blaschke - singular - outer factorization pipeline.

    inner_outer first, then the Blaschke/singular split of the inner part.
    All defects propagate into one report; diagnostic flags are never
    silent.
    """
    io = inner_outer(H, N)
    if io.wandering_dim != 1 or not io.inner.is_scalar():
        defects = dict(io.defects)
        defects["note"] = "wandering dimension != 1; split not attempted"
        return BsoResult(io.inner, None, io.outer, io.wandering_dim,
                         defects, ["sampling-insufficient"])
    if io.inner.degree() == 0 and len(io.inner.coeffs) <= 1:
        # constant inner: nothing to split
        defects = dict(io.defects)
        one = NcSeries.constant(1.0, H.d, io.inner.max_degree)
        return BsoResult(io.inner, one, io.outer, 1, defects, [])
    split = blaschke_singular_split(
        io.inner, pairs, N=io.inner.max_degree, probes=probes,
        extra_frame=extra_frame, threshold=threshold, rng=rng,
        inner_tol=inner_tol)
    defects = dict(io.defects)
    for key, val in split.defects.items():
        defects[f"split_{key}"] = val
    return BsoResult(split.blaschke, split.singular, io.outer,
                     split.wandering_dim or io.wandering_dim, defects,
                     split.flags)
