"""Evaluation of NC series at matrix points of the row ball.

A point is a d-tuple of complex n x n matrices Z = (Z_1, ..., Z_d); it is
admissible when the row norm ||[Z_1 ... Z_d]|| is below 1.  A p x q series
evaluates to the pn x qn matrix sum_w fhat_w (x) Z^w, with Z^w the product
of the letters of w taken left to right.  Truncation error at row norm s
is controlled by tail_bound.
"""

import warnings

import numpy as np

from .errors import (
    AdmissibilityWarning,
    InadmissiblePointError,
    SchemaError,
    ShapeMismatchError,
)
from .ncseries import h2_norm

# Row norms above this trigger an AdmissibilityWarning: still inside the
# ball, but close enough to the boundary that truncation tails decay slowly.
ADMISSIBLE_WARN = 0.99


class MatrixPoint:
    """A tuple of d square matrices of a common size n."""

    def __init__(self, mats):
        mats = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in mats]
        if not mats:
            raise ValueError("a point needs at least one matrix")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ShapeMismatchError(
                    f"point matrices must share a square size, got shapes "
                    f"{[m.shape for m in mats]}")
        self.mats = mats
        self.d = len(mats)
        self.n = n

    def __getitem__(self, k):
        return self.mats[k]

    def row_norm(self):
        """Operator norm of the row [Z_1 ... Z_d]."""
        S = sum(m @ m.conj().T for m in self.mats)
        vals = np.linalg.eigvalsh(S)
        return float(np.sqrt(max(vals[-1], 0.0)))

    def scale(self, r):
        return MatrixPoint([r * m for m in self.mats])

    def word_product(self, word):
        """Z^w, multiplying letters left to right; the empty word gives I."""
        P = np.eye(self.n, dtype=complex)
        for a in word:
            P = P @ self.mats[a - 1]
        return P

    def __repr__(self):
        return f"MatrixPoint(d={self.d}, n={self.n})"


def direct_sum_points(points):
    """Letterwise block-diagonal sum of points over the same alphabet."""
    d = points[0].d
    for Z in points:
        if Z.d != d:
            raise ShapeMismatchError("points over different alphabets")
    n_total = sum(Z.n for Z in points)
    mats = []
    for k in range(d):
        M = np.zeros((n_total, n_total), dtype=complex)
        off = 0
        for Z in points:
            M[off:off + Z.n, off:off + Z.n] = Z[k]
            off += Z.n
        mats.append(M)
    return MatrixPoint(mats)


def random_point(rng, d, n, row_norm):
    """Ginibre tuple scaled to a prescribed row norm."""
    mats = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for _ in range(d)]
    Z = MatrixPoint(mats)
    current = Z.row_norm()
    if current == 0.0:
        raise ValueError("degenerate random draw")
    return Z.scale(row_norm / current)


def _word_powers(Z, words):
    """Products Z^w for a collection of words, sharing suffix work."""
    cache = {(): np.eye(Z.n, dtype=complex)}

    def power(w):
        P = cache.get(w)
        if P is None:
            P = Z[w[0] - 1] @ power(w[1:])
            cache[w] = P
        return P

    return {w: power(w) for w in words}


def evaluate(f, Z, check_admissible=True):
    """f(Z) = sum_w fhat_w (x) Z^w as a (rows*n) x (cols*n) matrix.

    Raises InadmissiblePointError outside the closed unit row ball and
    warns when the row norm exceeds ADMISSIBLE_WARN.
    """
    if not isinstance(Z, MatrixPoint):
        Z = MatrixPoint(Z)
    if Z.d != f.d:
        raise ShapeMismatchError(
            f"point has d={Z.d}, series has d={f.d}")
    if check_admissible:
        rn = Z.row_norm()
        if rn >= 1.0:
            raise InadmissiblePointError(
                f"row norm {rn:.6f} is not below 1", row_norm=rn)
        if rn > ADMISSIBLE_WARN:
            warnings.warn(
                f"row norm {rn:.6f} close to the boundary; truncation "
                f"tails decay slowly", AdmissibilityWarning)
    n = Z.n
    out = np.zeros((f.rows * n, f.cols * n), dtype=complex)
    powers = _word_powers(Z, list(f.coeffs))
    for w, m in f.coeffs.items():
        out += np.kron(m, powers[w])
    return out


def tail_bound(f, s):
    """Upper bound on the norm of the dropped tail of f past its truncation
    order, at any point of row norm <= s < 1.

    Cauchy-Schwarz against the geometric growth of the homogeneous pieces
    gives h2_norm(f) * s^(N+1) / sqrt(1 - s^2).
    """
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise ValueError(f"row norm bound {s} must lie in [0, 1)")
    N = f.max_degree
    return h2_norm(f) * s ** (N + 1) / np.sqrt(1.0 - s * s)


# -- JSON interchange -------------------------------------------------

def _matrix_from_json(obj, path):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("matrix must be a nested [re, im] array", path)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError(
            f"matrix must have shape n x n x 2, got {arr.shape}", path)
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def point_to_json_dict(Z):
    return {
        "d": Z.d,
        "n": Z.n,
        "Z": [[[[float(x.real), float(x.imag)] for x in row] for row in m]
              for m in Z.mats],
    }


def point_from_json_dict(obj, path="point"):
    if not isinstance(obj, dict):
        raise SchemaError("point document must be an object", path)
    if set(obj) != {"d", "n", "Z"}:
        raise SchemaError("point must have exactly keys d, n, Z", path)
    d, n = obj["d"], obj["n"]
    for name, val in (("d", d), ("n", n)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise SchemaError(f"{name} must be a positive integer",
                              f"{path}.{name}")
    if not isinstance(obj["Z"], list) or len(obj["Z"]) != d:
        raise SchemaError(f"Z must be a list of {d} matrices", f"{path}.Z")
    mats = []
    for k, mj in enumerate(obj["Z"]):
        m = _matrix_from_json(mj, f"{path}.Z[{k}]")
        if m.shape != (n, n):
            raise SchemaError(f"matrix shape {m.shape} != ({n}, {n})",
                              f"{path}.Z[{k}]")
        mats.append(m)
    return MatrixPoint(mats)


def vector_from_json(obj, n, path):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("vector must be a list of [re, im] pairs", path)
    if arr.ndim != 2 or arr.shape != (n, 2):
        raise SchemaError(
            f"vector must have shape {n} x 2, got {arr.shape}", path)
    return arr[:, 0] + 1j * arr[:, 1]


def vector_to_json(y):
    return [[float(x.real), float(x.imag)] for x in np.asarray(y).reshape(-1)]


def pair_from_json_dict(obj, path="pair"):
    """A (point, vector) pair: {"Z": <point>, "y": [[re, im], ...]}."""
    if not isinstance(obj, dict):
        raise SchemaError("pair document must be an object", path)
    if set(obj) != {"Z", "y"}:
        raise SchemaError("pair must have exactly keys Z, y", path)
    Z = point_from_json_dict(obj["Z"], f"{path}.Z")
    y = vector_from_json(obj["y"], Z.n, f"{path}.y")
    return Z, y


def pair_to_json_dict(Z, y):
    return {"Z": point_to_json_dict(Z), "y": vector_to_json(y)}
