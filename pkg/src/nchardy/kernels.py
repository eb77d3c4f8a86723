"""Szego kernels, model-space kernels, and singularity loci.

The kernel vector K{Z, y, v} is the element of the Hardy space whose
coefficient pairing against any polynomial f recovers y* f(Z) v.  Pairings
between two kernel vectors have a closed form: a Sylvester-type equation
whose solution sums the geometric series exactly, with no truncation at
all.  Truncated materializations are kept alongside for anything that needs
actual coefficients.

The singularity locus of a square series H collects pairs (Z, y) with
y* H(Z) = 0.  Membership is a residual test; the search helper scans random
directions and finds exact scale factors by locating the roots of
t -> det(H(tZ)) inside the disk.
"""

import numpy as np
import scipy.linalg

from .errors import (
    InadmissiblePointError,
    NotInnerError,
    ShapeMismatchError,
)
from .evaluate import MatrixPoint, direct_sum_points, evaluate, random_point
from .fockspace import FockBasis, RANK_REL, isometry_defect, mult_operator
from .ncseries import NcSeries, series_mul

# Default residual tolerance for singularity membership.
SING_TOL = 1e-8

# Isometry-defect gate for calling a series inner.  Polynomial symbols get
# at least one valid column degree, where this is a true test.
INNER_TOL = 1e-8

# Full-support symbols only ever expose column degree 0, where the defect
# mixes truncation with geometry; the gate is correspondingly loose.
INNER_TOL_WINDOW0 = 0.25


def inner_defect(theta, degree_limit=None):
    """Isometry defect of multiplication by theta, at the largest column
    degree its truncation supports (or a smaller requested one)."""
    op = mult_operator(theta)
    if degree_limit is None:
        degree_limit = op.valid_degree
    return isometry_defect(op, degree_limit)


def check_inner(theta, tol=None):
    """Raise NotInnerError unless multiplication by theta looks isometric.

    Polynomial symbols are held to INNER_TOL on their validity window.
    Symbols supported up to the truncation order only admit the window-0
    test, which cannot separate truncation error from a genuine defect, so
    the gate widens to INNER_TOL_WINDOW0 there.
    """
    op = mult_operator(theta)
    if tol is None:
        tol = INNER_TOL if op.valid_degree >= 1 else INNER_TOL_WINDOW0
    defect = isometry_defect(op, op.valid_degree)
    if defect > tol:
        raise NotInnerError(
            f"isometry defect {defect:.3e} exceeds {tol:.1e} at column "
            f"degree {op.valid_degree}", defect=defect)
    return defect


class KernelVector:
    """Truncated Szego kernel with its provenance (Z, y, v) attached."""

    def __init__(self, series, Z, y, v):
        self.series = series
        self.Z = Z
        self.y = np.asarray(y, dtype=complex).reshape(-1)
        self.v = np.asarray(v, dtype=complex).reshape(-1)

    @property
    def max_degree(self):
        return self.series.max_degree

    def coeff(self, word):
        return self.series.scalar_coeff(word)

    def __repr__(self):
        return (f"KernelVector(level={self.Z.n}, "
                f"N={self.series.max_degree})")


def szego_kernel(Z, y, v, N):
    """K{Z, y, v} truncated at degree N.

    The coefficient at word w is (Z^w v)* y, so that the pairing against a
    polynomial f of degree <= N gives y* f(Z) v exactly.
    """
    if not isinstance(Z, MatrixPoint):
        Z = MatrixPoint(Z)
    y = np.asarray(y, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if y.size != Z.n or v.size != Z.n:
        raise ShapeMismatchError(
            f"vectors must have length {Z.n}, got {y.size} and {v.size}")
    coeffs = {}
    level = {(): v.copy()}
    c0 = complex(v.conj() @ y)
    if c0 != 0.0:
        coeffs[()] = c0
    for _ in range(N):
        nxt = {}
        for w, vec in level.items():
            for k in range(1, Z.d + 1):
                nw = (k,) + w
                nvec = Z[k - 1] @ vec
                nxt[nw] = nvec
                c = complex(nvec.conj() @ y)
                if c != 0.0:
                    coeffs[nw] = c
        level = nxt
    return KernelVector(NcSeries(Z.d, 1, 1, N, coeffs), Z, y, v)


def szego_gram(Z, W, v, u):
    """G = sum_w Z^w (v u*) (W^w)*, summed in closed form.

    Solves the displacement equation G - sum_k Z_k G W_k* = v u*, which is
    uniquely solvable inside the row ball.  Pairing y* G x gives the exact
    (untruncated) inner product of K{Z,y,v} against K{W,x,u}.
    """
    if not isinstance(Z, MatrixPoint):
        Z = MatrixPoint(Z)
    if not isinstance(W, MatrixPoint):
        W = MatrixPoint(W)
    if Z.d != W.d:
        raise ShapeMismatchError(f"points over d={Z.d} and d={W.d}")
    v = np.asarray(v, dtype=complex).reshape(-1)
    u = np.asarray(u, dtype=complex).reshape(-1)
    n1, n2 = Z.n, W.n
    A = np.eye(n1 * n2, dtype=complex)
    for k in range(Z.d):
        A -= np.kron(W[k].conj(), Z[k])
    rhs = np.outer(v, u.conj()).reshape(-1, order="F")
    g = np.linalg.solve(A, rhs)
    return g.reshape(n1, n2, order="F")


def kernel_inner(k1, k2):
    """Exact inner product <K1, K2>, conjugate-linear in the first slot."""
    G = szego_gram(k1.Z, k2.Z, k1.v, k2.v)
    return complex(k1.y.conj() @ G @ k2.y)


def model_gram(theta, Z, W, v, u):
    """Gram matrix of model-space kernels for a scalar inner theta.

    G_theta = G - theta(Z) G theta(W)*: subtracting the part of each kernel
    that lives in the range of multiplication by theta.  Exact (no
    truncation); theta itself must be polynomial for the evaluations to be
    exact too.
    """
    if not theta.is_scalar():
        raise ShapeMismatchError("model_gram expects a scalar inner")
    G = szego_gram(Z, W, v, u)
    TZ = evaluate(theta, Z)
    TW = evaluate(theta, W)
    return G - TZ @ G @ TW.conj().T


def model_kernel(theta, Z, y, v, N, inner_tol=None):
    """K_theta{Z,y,v} = K{Z,y,v} - theta * K{Z, theta(Z)* y, v}, truncated.

    Refuses symbols that fail the inner gate: the subtraction only projects
    correctly when multiplication by theta is an isometry.
    """
    if not theta.is_scalar():
        raise ShapeMismatchError("model_kernel expects a scalar inner")
    check_inner(theta, tol=inner_tol)
    if not isinstance(Z, MatrixPoint):
        Z = MatrixPoint(Z)
    K = szego_kernel(Z, y, v, N)
    y_shift = evaluate(theta, Z).conj().T @ np.asarray(y, complex).reshape(-1)
    K_shift = szego_kernel(Z, y_shift, v, N)
    proj = series_mul(theta.with_max_degree(N)
                      if theta.max_degree < N else theta.truncate(N),
                      K_shift.series, max_degree=N)
    return KernelVector(K.series - proj, Z, y, v)


def kernel_direct_sum(k1, k2, c=1.0):
    """Representation of K1 + c K2 as a single kernel on the direct sum.

    K{Z,y,v} + c K{W,x,u} = K{Z+W, y+(c x), v+u} coefficient-exactly: the
    weight rides on the y-slot, which the pairing touches linearly.
    """
    if k1.max_degree != k2.max_degree:
        raise ShapeMismatchError("kernels truncated at different degrees")
    Z = direct_sum_points([k1.Z, k2.Z])
    y = np.concatenate([k1.y, complex(c) * k2.y])
    v = np.concatenate([k1.v, k2.v])
    return szego_kernel(Z, y, v, k1.max_degree)


# -- singularity loci -------------------------------------------------


class SingularityPair:
    """A point Z and a nonzero vector y with y* H(Z) = 0 for some H."""

    def __init__(self, Z, y):
        if not isinstance(Z, MatrixPoint):
            Z = MatrixPoint(Z)
        y = np.asarray(y, dtype=complex).reshape(-1)
        if y.size != Z.n:
            raise ShapeMismatchError(
                f"vector length {y.size} != level {Z.n}")
        if np.linalg.norm(y) == 0.0:
            raise ValueError("singularity pair needs a nonzero vector")
        self.Z = Z
        self.y = y

    @property
    def level(self):
        return self.Z.n

    def __repr__(self):
        return f"SingularityPair(level={self.level})"


def sing_residual(H, Z, y):
    """The raw quantity ||y* H(Z)|| driving the membership test."""
    y = np.asarray(y, dtype=complex).reshape(-1)
    A = evaluate(H, Z)
    num = float(np.linalg.norm(y.conj() @ A))
    scale = float(np.linalg.norm(y)) * (1.0 + float(np.linalg.norm(A, 2)))
    return num, scale


def sing_membership(H, Z, y, tol=SING_TOL):
    """(is_member, residual): residual test ||y* H(Z)|| against
    tol * ||y|| * (1 + ||H(Z)||)."""
    num, scale = sing_residual(H, Z, y)
    return num <= tol * scale, num


def sing_closure_direct_sum(p1, p2, c=1.0):
    """(Z+W, y + c x): direct sums with weighted stacking stay singular."""
    if p1.Z.d != p2.Z.d:
        raise ShapeMismatchError("pairs over different alphabets")
    Z = direct_sum_points([p1.Z, p2.Z])
    y = np.concatenate([p1.y, complex(c) * p2.y])
    if np.linalg.norm(y) == 0.0:
        raise ValueError("weighted stack collapsed to zero")
    return SingularityPair(Z, y)


def sing_closure_similarity(pair, S):
    """Conjugated pair (S^{-1} Z S, S* y).

    y* H(Z) = 0 gives (S* y)* H(S^{-1} Z S) = y* S H(S^{-1} Z S)
    = y* H(Z) S = 0, since evaluation intertwines similarities.  The
    conjugated point must stay admissible.
    """
    S = np.asarray(S, dtype=complex)
    n = pair.level
    if S.shape != (n, n):
        raise ShapeMismatchError(f"similarity must be {n} x {n}")
    Sinv = np.linalg.inv(S)
    Z_new = MatrixPoint([Sinv @ M @ S for M in pair.Z.mats])
    rn = Z_new.row_norm()
    if rn >= 1.0:
        raise InadmissiblePointError(
            f"conjugated point has row norm {rn:.6f}", row_norm=rn)
    return SingularityPair(Z_new, S.conj().T @ pair.y)


def standard_probes(n):
    """Standard basis vectors of C^n, the default probe set."""
    return [np.eye(n, dtype=complex)[:, j] for j in range(n)]


def sing_space_complement(pairs, probes=None, N=8, rel=RANK_REL):
    """Orthonormal frame spanning the kernel vectors of the given pairs.

    Columns are stacked coefficient vectors of szego_kernel(Z, y, v, N)
    over every pair and probe (standard basis probes by default, per
    level).  Rank-revealing QR with a relative threshold trims the span.
    The result approximates the orthocomplement of the singularity space
    from below; more pairs can only grow it.
    """
    if not pairs:
        raise ValueError("need at least one singularity pair")
    d = pairs[0].Z.d
    basis = FockBasis(d, N)
    cols = []
    for pair in pairs:
        vs = probes if probes is not None else standard_probes(pair.level)
        for v in vs:
            K = szego_kernel(pair.Z, pair.y, v, N)
            vec = np.zeros(basis.dim, dtype=complex)
            for w, m in K.series.coeffs.items():
                vec[basis.index[w]] = m[0, 0]
            cols.append(vec)
    A = np.array(cols).T
    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros((basis.dim, 0), dtype=complex)
    r = int(np.sum(diag > rel * diag[0]))
    return Q[:, :r]


def compress_to_finite(Z, y, p):
    """Compress a singular pair to the finite-dimensional subspace that a
    polynomial p actually sees.

    K = span{(Z^w)* y : |w| <= deg p} is invariant enough: with
    X_j = Q* Z_j Q and x = Q* y, every adjoint word of length <= deg p
    satisfies (X^w)* x = Q* (Z^w)* y, so p(X)* x = Q* (p(Z)* y).  A member
    of the singularity locus stays a member, now at level dim K.
    """
    if not isinstance(Z, MatrixPoint):
        Z = MatrixPoint(Z)
    y = np.asarray(y, dtype=complex).reshape(-1)
    if np.linalg.norm(y) == 0.0:
        raise ValueError("cannot compress the zero vector")
    m = p.degree()
    cols = []
    level = [y.copy()]
    cols.append(y.copy())
    for _ in range(m):
        nxt = []
        for vec in level:
            for k in range(Z.d):
                w = Z[k].conj().T @ vec
                nxt.append(w)
                cols.append(w)
        level = nxt
    A = np.array(cols).T
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > RANK_REL * s[0])) if s.size and s[0] > 0 else 0
    Q = U[:, :r]
    X = MatrixPoint([Q.conj().T @ M @ Q for M in Z.mats])
    x = Q.conj().T @ y
    return X, x


def _det_poly_roots(H, Z, degree_bound):
    """Roots of t -> det(H(tZ)) via DFT interpolation on the unit circle."""
    K = degree_bound + 1
    ts = np.exp(2j * np.pi * np.arange(K) / K)
    vals = np.array([np.linalg.det(evaluate(H, Z.scale(t),
                                            check_admissible=False))
                     for t in ts])
    # vals[j] = p(omega^j) with omega = exp(2 pi i / K); the forward FFT
    # against exp(-2 pi i j m / K) inverts that evaluation map
    coeffs = np.fft.fft(vals) / K
    # strip negligible leading coefficients before forming the companion
    mags = np.abs(coeffs)
    top = mags.max()
    if top == 0.0:
        return np.array([])
    deg = K - 1
    while deg > 0 and mags[deg] < 1e-12 * top:
        deg -= 1
    if deg == 0:
        return np.array([])
    return np.roots(coeffs[:deg + 1][::-1])


def _triangular_direction(rng, d, n, row_cap):
    """Tuple of strictly triangular matrices with random orientations.

    Concentrating each letter above or below the diagonal lets word
    products reach much larger eigenvalues than Ginibre draws at the same
    row norm, which is where singular points hide for commutator-type
    symbols.
    """
    mats = []
    for _ in range(d):
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        M = np.triu(M, 1) if rng.random() < 0.5 else np.tril(M, -1)
        mats.append(M)
    Z = MatrixPoint(mats)
    rn = Z.row_norm()
    if rn == 0.0:
        return random_point(rng, d, n, row_cap)
    return Z.scale(row_cap / rn)


def _harvest_members(H, Z, degree_bound, tol, members, max_members):
    """Verify every in-disk det root of the direction Z as a member."""
    for t in _det_poly_roots(H, Z, degree_bound):
        if abs(t) >= 1.0:
            continue
        Zt = Z.scale(t)
        if Zt.row_norm() >= 1.0:
            continue
        A = evaluate(H, Zt)
        _, _, Vh = np.linalg.svd(A.conj().T)
        y = Vh[-1].conj()
        ok, _ = sing_membership(H, Zt, y, tol)
        if ok:
            members.append(SingularityPair(Zt, y))
            if len(members) >= max_members:
                return True
    return False


def _point_to_params(Z):
    out = []
    for M in Z.mats:
        out.append(M.real.ravel())
        out.append(M.imag.ravel())
    return np.concatenate(out)


def _params_to_point(x, d, n, row_cap):
    m = n * n
    mats = []
    for k in range(d):
        re = x[2 * k * m:(2 * k + 1) * m].reshape(n, n)
        im = x[(2 * k + 1) * m:(2 * k + 2) * m].reshape(n, n)
        mats.append(re + 1j * im)
    Z = MatrixPoint(mats)
    rn = Z.row_norm()
    return Z.scale(row_cap / rn) if rn > 0 else Z


def search_singularities(H, level, trials=50, rng=None, row_cap=0.995,
                         tol=SING_TOL, max_members=10, polish=True,
                         polish_starts=2, polish_budget=4000):
    """Random-direction search for members of the singularity locus.

    Trials alternate between strictly triangular and Ginibre draws; for
    each direction Z at the row-norm cap the exact scalings t with
    det(H(tZ)) = 0 are found by polynomial root extraction, and each root
    inside the disk gives a candidate point tZ whose left null vector is
    re-verified through sing_membership.  When the scan alone comes up
    short, a local descent polishes the most promising directions, driving
    the smallest root modulus below 1 if it can.  Returns verified
    SingularityPair objects (possibly empty: polynomial symbols can be
    pointwise invertible on the whole ball at a given level).
    """
    if H.rows != H.cols:
        raise ShapeMismatchError("singularity search needs a square series")
    if rng is None:
        rng = np.random.default_rng(0)
    members = []
    degree_bound = H.degree() * H.rows * level + 1
    scored = []
    for trial in range(trials):
        if trial % 2 == 0:
            Z = _triangular_direction(rng, H.d, level, row_cap)
        else:
            Z = random_point(rng, H.d, level, row_cap)
        roots = _det_poly_roots(H, Z, degree_bound)
        score = float(min(np.abs(roots))) if roots.size else np.inf
        scored.append((score, Z))
        if score < 1.0:
            if _harvest_members(H, Z, degree_bound, tol, members,
                                max_members):
                return members
    if members or not polish:
        return members

    # local descent on the direction sphere: push the smallest root
    # modulus below 1, then harvest as before
    import scipy.optimize

    def objective(x):
        Zx = _params_to_point(x, H.d, level, row_cap)
        roots = _det_poly_roots(H, Zx, degree_bound)
        return float(min(np.abs(roots))) if roots.size else 10.0

    scored.sort(key=lambda sv: sv[0])
    for score, Z0 in scored[:polish_starts]:
        if not np.isfinite(score):
            continue
        res = scipy.optimize.minimize(
            objective, _point_to_params(Z0), method="Nelder-Mead",
            options={"maxfev": polish_budget, "xatol": 1e-8,
                     "fatol": 1e-12})
        if res.fun < 1.0:
            Z = _params_to_point(res.x, H.d, level, row_cap)
            if _harvest_members(H, Z, degree_bound, tol, members,
                                max_members):
                return members
        if members:
            break
    return members
