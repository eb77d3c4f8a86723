"""Words in a free monoid and truncated NC power series.

A word is a finite tuple of letters from {1..d}; the empty tuple is the
monoid unit.  An :class:`NcSeries` stores complex p x q matrix coefficients
indexed by words of length <= max_degree in a sparse map.  Words are ordered
degree-then-lexicographically everywhere (storage, JSON output, phase
conventions), so results are reproducible.

Internally coefficients are keyed by plain tuples of ints for speed; the
:class:`Word` wrapper carries the alphabet size and is the public face of the
monoid operations.
"""

import json
import math

import numpy as np

from .errors import (
    AlphabetMismatchError,
    NotInvertibleError,
    SchemaError,
    ShapeMismatchError,
)

# Relative Frobenius-norm threshold below which a coefficient is dropped by
# prune().  Keeps round-off from inflating sparse storage.
PRUNE_REL = 1e-15

# Singular-value floor (relative) for inverting a constant term.
INVERT_REL = 1e-12


def word_key(w):
    """Sort key implementing the degree-then-lex order on letter tuples."""
    return (len(w), w)


def _check_letters(letters, d):
    for a in letters:
        if not isinstance(a, (int, np.integer)) or not 1 <= a <= d:
            raise ValueError(f"letter {a!r} outside alphabet 1..{d}")


class Word:
    """A word in the letters {1..d}.  Immutable; the unit is Word((), d)."""

    __slots__ = ("letters", "d")

    def __init__(self, letters, d):
        letters = tuple(int(a) for a in letters)
        if d < 1:
            raise ValueError("alphabet size must be >= 1")
        _check_letters(letters, d)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, Word)
            and self.d == other.d
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.d, self.letters))

    def __repr__(self):
        return f"Word({self.letters}, d={self.d})"

    def __mul__(self, other):
        return word_concat(self, other)


def word_concat(a, b):
    """Concatenation a.b; unit law holds with the empty word."""
    if a.d != b.d:
        raise AlphabetMismatchError(
            f"cannot concatenate words over alphabets d={a.d} and d={b.d}"
        )
    return Word(a.letters + b.letters, a.d)


def word_reverse(a):
    """The transpose involution: reverse the letters."""
    return Word(a.letters[::-1], a.d)


def _as_matrix(value, rows, cols):
    m = np.array(value, dtype=complex)
    if m.shape == () and rows == 1 and cols == 1:
        m = m.reshape(1, 1)
    if m.shape != (rows, cols):
        raise ShapeMismatchError(
            f"coefficient shape {m.shape} != ({rows}, {cols})"
        )
    return m


class NcSeries:
    """Degree-truncated formal power series with matrix coefficients.

    Parameters
    ----------
    d : alphabet size.
    rows, cols : coefficient shape p x q.
    max_degree : truncation order N; stored words have length <= N.
    coeffs : optional map {letter-tuple: array-like (p, q)}.  Missing words
        are zero.  Scalars are accepted for 1x1 series.
    """

    __slots__ = ("d", "rows", "cols", "max_degree", "coeffs")

    def __init__(self, d, rows, cols, max_degree, coeffs=None):
        if d < 1:
            raise ValueError("alphabet size must be >= 1")
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        self.d = int(d)
        self.rows = int(rows)
        self.cols = int(cols)
        self.max_degree = int(max_degree)
        store = {}
        if coeffs:
            for w, m in coeffs.items():
                w = tuple(int(a) for a in w)
                _check_letters(w, self.d)
                if len(w) > self.max_degree:
                    raise ValueError(
                        f"word {w} longer than max_degree {self.max_degree}"
                    )
                store[w] = _as_matrix(m, self.rows, self.cols)
        self.coeffs = store

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, d, rows=1, cols=1, max_degree=0):
        return cls(d, rows, cols, max_degree)

    @classmethod
    def constant(cls, value, d, max_degree=0):
        """Constant series; value may be a scalar or a square/rect matrix."""
        m = np.atleast_2d(np.array(value, dtype=complex))
        return cls(d, m.shape[0], m.shape[1], max_degree, {(): m})

    @classmethod
    def monomial(cls, word, d, max_degree=None, value=1.0):
        """Scalar series value * z^word."""
        word = tuple(int(a) for a in word)
        if max_degree is None:
            max_degree = len(word)
        return cls(d, 1, 1, max_degree, {word: value})

    @classmethod
    def identity(cls, n, d, max_degree=0):
        return cls.constant(np.eye(n), d, max_degree)

    # -- basic accessors ----------------------------------------------

    def coeff(self, word):
        """Coefficient matrix at word (zeros if absent).  Returns a copy."""
        w = tuple(int(a) for a in word)
        m = self.coeffs.get(w)
        if m is None:
            return np.zeros((self.rows, self.cols), dtype=complex)
        return m.copy()

    def scalar_coeff(self, word):
        """Coefficient of a 1x1 series as a python complex."""
        if self.rows != 1 or self.cols != 1:
            raise ShapeMismatchError("scalar_coeff needs a 1x1 series")
        m = self.coeffs.get(tuple(int(a) for a in word))
        return complex(0.0) if m is None else complex(m[0, 0])

    def support(self):
        """Stored words in degree-then-lex order."""
        return sorted(self.coeffs, key=word_key)

    def degree(self):
        """Largest word length carrying a stored coefficient (0 if none)."""
        return max((len(w) for w in self.coeffs), default=0)

    def is_scalar(self):
        return self.rows == 1 and self.cols == 1

    def copy(self):
        return NcSeries(self.d, self.rows, self.cols, self.max_degree,
                        self.coeffs)

    def truncate(self, n):
        """Drop words longer than n and clamp max_degree to n."""
        kept = {w: m for w, m in self.coeffs.items() if len(w) <= n}
        return NcSeries(self.d, self.rows, self.cols, min(self.max_degree, n),
                        kept)

    def with_max_degree(self, n):
        """Same coefficients, larger truncation bound."""
        if n < self.degree():
            raise ValueError("requested bound below the stored degree")
        return NcSeries(self.d, self.rows, self.cols, n, self.coeffs)

    def prune(self, rel=PRUNE_REL):
        """Drop coefficients with Frobenius norm <= rel * (largest norm)."""
        if not self.coeffs:
            return self.copy()
        norms = {w: np.linalg.norm(m) for w, m in self.coeffs.items()}
        top = max(norms.values())
        kept = {w: m for w, m in self.coeffs.items() if norms[w] > rel * top}
        return NcSeries(self.d, self.rows, self.cols, self.max_degree, kept)

    def __repr__(self):
        return (f"NcSeries(d={self.d}, shape=({self.rows},{self.cols}), "
                f"N={self.max_degree}, terms={len(self.coeffs)})")

    # -- arithmetic ---------------------------------------------------

    def _check_compatible(self, other):
        if self.d != other.d:
            raise AlphabetMismatchError(
                f"series over d={self.d} combined with d={other.d}")

    def _promote(self, other):
        """Lift a scalar to a constant series at this truncation order."""
        value = other * np.eye(self.rows) if self.rows == self.cols \
            else other
        return NcSeries.constant(value, self.d, self.max_degree)

    def __add__(self, other):
        if np.isscalar(other):
            other = self._promote(other)
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, NcSeries):
            other = self._promote(other)
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, NcSeries):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def scale(self, scalar):
        scalar = complex(scalar)
        out = {w: scalar * m for w, m in self.coeffs.items()}
        return NcSeries(self.d, self.rows, self.cols, self.max_degree, out)

    def adjoint_coeffs(self):
        """Coefficient-wise conjugate transpose with word reversal.

        This is the formal transpose-adjoint at the symbol level; it is not
        the Hilbert-space adjoint of the multiplication operator.
        """
        out = {w[::-1]: m.conj().T for w, m in self.coeffs.items()}
        return NcSeries(self.d, self.cols, self.rows, self.max_degree, out)


def series_add(f, g):
    """Coefficientwise sum; result truncated at min(N_f, N_g)."""
    f._check_compatible(g)
    if (f.rows, f.cols) != (g.rows, g.cols):
        raise ShapeMismatchError(
            f"shapes ({f.rows},{f.cols}) and ({g.rows},{g.cols}) differ")
    n = min(f.max_degree, g.max_degree)
    out = {}
    for w, m in f.coeffs.items():
        if len(w) <= n:
            out[w] = m.copy()
    for w, m in g.coeffs.items():
        if len(w) > n:
            continue
        if w in out:
            out[w] = out[w] + m
        else:
            out[w] = m.copy()
    # exact-zero sums are dropped so f + (-f) is the empty series
    out = {w: m for w, m in out.items() if np.any(m)}
    return NcSeries(f.d, f.rows, f.cols, n, out)


def series_mul(f, g, max_degree=None):
    """Cauchy-concatenation product (fg)_w = sum_{uv=w} f_u g_v.

    Matrix coefficients multiply; cols(f) must equal rows(g).  Words beyond
    the truncation bound (default min(N_f, N_g)) are silently dropped, which
    is exactly the information a validity window tracks downstream.
    """
    f._check_compatible(g)
    if f.cols != g.rows:
        raise ShapeMismatchError(
            f"inner dims differ: cols(f)={f.cols}, rows(g)={g.rows}")
    if max_degree is None:
        max_degree = min(f.max_degree, g.max_degree)
    out = {}
    for u, fu in f.coeffs.items():
        lu = len(u)
        if lu > max_degree:
            continue
        for v, gv in g.coeffs.items():
            if lu + len(v) > max_degree:
                continue
            w = u + v
            prod = fu @ gv
            if w in out:
                out[w] += prod
            else:
                out[w] = prod
    out = {w: m for w, m in out.items() if np.any(m)}
    return NcSeries(f.d, f.rows, g.cols, max_degree, out)


def rescale(f, r):
    """Argument rescaling: coefficient at w is multiplied by r^|w|.

    Only r in [0, 1] is meaningful here (the map is a complete contraction
    there), so anything else is rejected.
    """
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"rescale parameter {r} outside [0, 1]")
    if r == 1.0:
        return f.copy()
    if r == 0.0:
        c = f.coeffs.get(())
        out = {} if c is None else {(): c.copy()}
        return NcSeries(f.d, f.rows, f.cols, f.max_degree, out)
    out = {w: (r ** len(w)) * m for w, m in f.coeffs.items()}
    return NcSeries(f.d, f.rows, f.cols, f.max_degree, out)


def h2_norm(f):
    """Root sum of squared Frobenius norms of the coefficients."""
    return math.sqrt(sum(float(np.sum(np.abs(m) ** 2))
                         for m in f.coeffs.values()))


def series_inner(f, g):
    """Coefficient pairing sum_w <f_w, g_w>_Frobenius, conjugate-linear in
    the first argument.  Words outside the common support contribute zero."""
    f._check_compatible(g)
    if (f.rows, f.cols) != (g.rows, g.cols):
        raise ShapeMismatchError(
            f"shapes ({f.rows},{f.cols}) and ({g.rows},{g.cols}) differ")
    acc = 0.0 + 0.0j
    fc, gc = f.coeffs, g.coeffs
    if len(fc) <= len(gc):
        for w, fm in fc.items():
            gm = gc.get(w)
            if gm is not None:
                acc += np.sum(np.conj(fm) * gm)
    else:
        for w, gm in gc.items():
            fm = fc.get(w)
            if fm is not None:
                acc += np.sum(np.conj(fm) * gm)
    return complex(acc)


def series_invert(f, max_degree=None):
    """Multiplicative inverse of f up to degree max_degree (default N_f).

    Requires an invertible square constant term; the recursion
    g_w = -f_0^{-1} sum_{uv=w, u != empty} f_u g_v
    walks degrees upward over the support closure (the monoid generated by
    the nonconstant support of f), so sparse inputs stay sparse.
    """
    if f.rows != f.cols:
        raise ShapeMismatchError("only square series can be inverted")
    if max_degree is None:
        max_degree = f.max_degree
    f0 = f.coeffs.get(())
    if f0 is None:
        raise NotInvertibleError("constant term is zero", smallest_sigma=0.0)
    svals = np.linalg.svd(f0, compute_uv=False)
    smin = float(svals[-1]) if len(svals) else 0.0
    smax = float(svals[0]) if len(svals) else 0.0
    if smin <= INVERT_REL * max(smax, 1.0):
        raise NotInvertibleError(
            f"constant term numerically singular (sigma_min={smin:.3e})",
            smallest_sigma=smin)
    f0inv = np.linalg.inv(f0)
    supp_plus = [(w, m) for w, m in f.coeffs.items() if len(w) > 0]
    g = {(): f0inv}
    # words reachable at each degree: products u.v with u in supp_plus and
    # v already present in g
    by_degree = {0: [()]}
    for deg in range(1, max_degree + 1):
        candidates = set()
        for u, _ in supp_plus:
            lu = len(u)
            if lu > deg:
                continue
            for v in by_degree.get(deg - lu, ()):
                candidates.add(u + v)
        level = []
        for w in sorted(candidates):
            acc = None
            for u, fu in supp_plus:
                lu = len(u)
                if lu > len(w) or w[:lu] != u:
                    continue
                gv = g.get(w[lu:])
                if gv is None:
                    continue
                term = fu @ gv
                acc = term if acc is None else acc + term
            if acc is None:
                continue
            gw = -(f0inv @ acc)
            if np.any(gw):
                g[w] = gw
                level.append(w)
        if level:
            by_degree[deg] = level
    return NcSeries(f.d, f.rows, f.cols, max_degree, g)


def phase_normalize(f, floor_rel=1e-13):
    """Rotate f by a unimodular scalar so its leading coefficient entry
    (degree-then-lex first word, row-major first entry above threshold) is
    real and positive.

    Returns (g, u) with f = u * g and |u| = 1.
    """
    top = max((np.max(np.abs(m)) for m in f.coeffs.values()), default=0.0)
    if top == 0.0:
        return f.copy(), complex(1.0)
    for w in f.support():
        m = f.coeffs[w]
        flat = m.reshape(-1)
        idx = np.where(np.abs(flat) > floor_rel * top)[0]
        if idx.size:
            entry = complex(flat[idx[0]])
            u = entry / abs(entry)
            return f.scale(1.0 / u), u
    return f.copy(), complex(1.0)


def max_coeff_diff(f, g, through_degree=None):
    """Largest entrywise coefficient deviation |f_w - g_w| over words of
    length <= through_degree (default: the smaller truncation bound)."""
    if through_degree is None:
        through_degree = min(f.max_degree, g.max_degree)
    words = set()
    for w in f.coeffs:
        if len(w) <= through_degree:
            words.add(w)
    for w in g.coeffs:
        if len(w) <= through_degree:
            words.add(w)
    err = 0.0
    for w in words:
        diff = f.coeff(w) - g.coeff(w)
        if diff.size:
            err = max(err, float(np.max(np.abs(diff))))
    return err


# -- JSON interchange -------------------------------------------------

def _matrix_to_json(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_json(obj, path):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("matrix must be a nested [re, im] array", path)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError(
            f"matrix must have shape rows x cols x 2, got {arr.shape}", path)
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def to_json_dict(f):
    """Series as a JSON-ready dict; coefficients sorted degree-then-lex."""
    return {
        "d": f.d,
        "rows": f.rows,
        "cols": f.cols,
        "max_degree": f.max_degree,
        "coeffs": [
            {"word": list(w), "matrix": _matrix_to_json(f.coeffs[w])}
            for w in f.support()
        ],
    }


_SERIES_KEYS = {"d", "rows", "cols", "max_degree", "coeffs"}


def from_json_dict(obj, path="series"):
    if not isinstance(obj, dict):
        raise SchemaError("series document must be an object", path)
    unknown = set(obj) - _SERIES_KEYS
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}", path)
    missing = _SERIES_KEYS - set(obj)
    if missing:
        raise SchemaError(f"missing keys {sorted(missing)}", path)
    d, rows, cols, n = obj["d"], obj["rows"], obj["cols"], obj["max_degree"]
    for name, val in (("d", d), ("rows", rows), ("cols", cols),
                      ("max_degree", n)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise SchemaError(f"{name} must be an integer", f"{path}.{name}")
    if not isinstance(obj["coeffs"], list):
        raise SchemaError("coeffs must be a list", f"{path}.coeffs")
    coeffs = {}
    for i, item in enumerate(obj["coeffs"]):
        here = f"{path}.coeffs[{i}]"
        if not isinstance(item, dict) or set(item) != {"word", "matrix"}:
            raise SchemaError("entry must have keys word, matrix", here)
        word = item["word"]
        if (not isinstance(word, list)
                or any(not isinstance(a, int) or isinstance(a, bool)
                       for a in word)):
            raise SchemaError("word must be a list of integers",
                              f"{here}.word")
        w = tuple(word)
        if any(not 1 <= a <= d for a in w):
            raise SchemaError(f"letters outside 1..{d}", f"{here}.word")
        if len(w) > n:
            raise SchemaError("word longer than max_degree", f"{here}.word")
        if w in coeffs:
            raise SchemaError(f"duplicate word {list(w)}", f"{here}.word")
        m = _matrix_from_json(item["matrix"], f"{here}.matrix")
        if m.shape != (rows, cols):
            raise SchemaError(
                f"matrix shape {m.shape} != ({rows}, {cols})",
                f"{here}.matrix")
        coeffs[w] = m
    try:
        return NcSeries(d, rows, cols, n, coeffs)
    except (ValueError, ShapeMismatchError) as exc:
        raise SchemaError(str(exc), path)


def save_series(f, fileobj_or_path):
    obj = to_json_dict(f)
    if hasattr(fileobj_or_path, "write"):
        json.dump(obj, fileobj_or_path, sort_keys=True, indent=2)
    else:
        with open(fileobj_or_path, "w") as fh:
            json.dump(obj, fh, sort_keys=True, indent=2)


def load_series(fileobj_or_path):
    if hasattr(fileobj_or_path, "read"):
        obj = json.load(fileobj_or_path)
    else:
        with open(fileobj_or_path) as fh:
            obj = json.load(fh)
    return from_json_dict(obj)


# -- small constructors used throughout the test corpus ----------------

def commutator_inner(d=2, max_degree=2):
    """(z1 z2 - z2 z1)/sqrt(2): the degree-2 homogeneous inner workhorse."""
    if d < 2:
        raise ValueError("needs at least two letters")
    s = 1.0 / math.sqrt(2.0)
    return NcSeries(d, 1, 1, max_degree, {(1, 2): s, (2, 1): -s})
