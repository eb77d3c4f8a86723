"""Truncated full Fock space over d letters and multiplication operators.

The basis enumerates all words of length <= N in degree-then-lex order, so
the truncated space has dimension D = 1 + d + ... + d^N.  Left and right
creation operators act by prepending/appending a letter and annihilate the
top degree.  Multiplying by a series f compresses f applied to the left
creation tuple; the resulting matrix is exact on columns whose degree stays
within the validity window N - deg(f), and meaningless beyond it.  Every
defect-style question therefore carries an explicit degree limit, checked
against that window.
"""

import numpy as np

from .errors import ShapeMismatchError, ValidityWindowError
from .ncseries import NcSeries, rescale

# Relative singular-value threshold for numerical rank decisions.
RANK_REL = 1e-10

# |eigenvalue - 1| tolerance for reading wandering vectors off the
# wandering projection.
WANDER_EIG_TOL = 1e-8


class FockBasis:
    """Degree-then-lex enumeration of words of length <= max_degree."""

    def __init__(self, d, max_degree):
        if d < 1:
            raise ValueError("alphabet size must be >= 1")
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        self.d = int(d)
        self.max_degree = int(max_degree)
        words = [()]
        level = [()]
        for _ in range(self.max_degree):
            level = [w + (k,) for w in level for k in range(1, self.d + 1)]
            words.extend(level)
        # built degree by degree with lex order inside each degree
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}
        self.dim = len(words)
        starts = [0]
        for k in range(self.max_degree + 1):
            starts.append(starts[-1] + self.d ** k)
        self._starts = starts

    def index_of(self, word):
        w = tuple(int(a) for a in word)
        i = self.index.get(w)
        if i is None:
            raise KeyError(f"word {w} not in basis (d={self.d}, "
                           f"N={self.max_degree})")
        return i

    def word_at(self, i):
        return self.words[i]

    def degree_start(self, k):
        """Index of the first word of length k."""
        return self._starts[k]

    def degree_slice(self, k):
        return slice(self._starts[k], self._starts[k + 1])

    def indices_through_degree(self, k):
        """All indices for words of length <= k."""
        return np.arange(self._starts[min(k, self.max_degree) + 1])

    def __repr__(self):
        return f"FockBasis(d={self.d}, N={self.max_degree}, dim={self.dim})"


def left_shift_matrix(basis, k):
    """L_k: e_w -> e_{kw}, zero on the top degree."""
    if not 1 <= k <= basis.d:
        raise ValueError(f"letter {k} outside alphabet 1..{basis.d}")
    L = np.zeros((basis.dim, basis.dim))
    for j, w in enumerate(basis.words):
        if len(w) < basis.max_degree:
            L[basis.index[(k,) + w], j] = 1.0
    return L


def right_shift_matrix(basis, k):
    """R_k: e_w -> e_{wk}, zero on the top degree."""
    if not 1 <= k <= basis.d:
        raise ValueError(f"letter {k} outside alphabet 1..{basis.d}")
    R = np.zeros((basis.dim, basis.dim))
    for j, w in enumerate(basis.words):
        if len(w) < basis.max_degree:
            R[basis.index[w + (k,)], j] = 1.0
    return R


def series_to_vec(f, basis):
    """Stack the coefficients of f into a (dim * rows, cols) array.

    Layout is word-major: the block at rows [i*p, (i+1)*p) is the
    coefficient at basis word i.
    """
    if f.d != basis.d:
        raise ShapeMismatchError(
            f"series alphabet d={f.d} != basis alphabet d={basis.d}")
    p, q = f.rows, f.cols
    v = np.zeros((basis.dim * p, q), dtype=complex)
    for w, m in f.coeffs.items():
        i = basis.index.get(w)
        if i is None:
            raise ValueError(
                f"series word {w} exceeds basis degree {basis.max_degree}")
        v[i * p:(i + 1) * p, :] = m
    return v


def vec_to_series(v, basis, rows=1, cols=None):
    """Inverse of series_to_vec; zero blocks are dropped."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v.reshape(-1, 1)
    if cols is None:
        cols = v.shape[1]
    if v.shape != (basis.dim * rows, cols):
        raise ShapeMismatchError(
            f"vector shape {v.shape} != ({basis.dim * rows}, {cols})")
    coeffs = {}
    for i, w in enumerate(basis.words):
        block = v[i * rows:(i + 1) * rows, :]
        if np.any(block):
            coeffs[w] = block.copy()
    return NcSeries(basis.d, rows, cols, basis.max_degree, coeffs)


class OperatorMatrix:
    """A dense matrix on truncated Fock space with bookkeeping.

    mat has shape (dim * rows, dim * cols) in word-major block layout.
    valid_degree is the largest column degree on which the matrix agrees
    with the untruncated operator it approximates.
    """

    def __init__(self, mat, basis, rows, cols, valid_degree):
        self.mat = mat
        self.basis = basis
        self.rows = int(rows)
        self.cols = int(cols)
        self.valid_degree = int(valid_degree)

    @property
    def shape(self):
        return self.mat.shape

    def column_indices(self, degree_limit):
        """Flat column indices belonging to words of length <= degree_limit."""
        word_idx = self.basis.indices_through_degree(degree_limit)
        q = self.cols
        return (word_idx[:, None] * q + np.arange(q)[None, :]).reshape(-1)

    def restricted(self, degree_limit):
        """Columns for words of length <= degree_limit."""
        return self.mat[:, self.column_indices(degree_limit)]

    def apply_series(self, g):
        """Apply to a series (cols must match), returning a series."""
        if g.rows != self.cols:
            raise ShapeMismatchError(
                f"operator expects {self.cols} rows, series has {g.rows}")
        v = series_to_vec(g, self.basis)
        return vec_to_series(self.mat @ v, self.basis, rows=self.rows)

    def symbol(self):
        """The series whose multiplication this matrix truncates.

        Reads the vacuum column block, which holds the coefficients of f
        exactly (multiplying the constant 1 reproduces f up to degree N).
        """
        q = self.cols
        return vec_to_series(self.mat[:, 0:q], self.basis, rows=self.rows,
                             cols=q)

    def __repr__(self):
        return (f"OperatorMatrix(shape={self.mat.shape}, "
                f"valid_degree={self.valid_degree})")


def mult_operator(f, basis=None, max_degree=None):
    """Compressed left-multiplication by f on the truncated Fock space.

    Maps the word-major stacking of g (with cols(f) channels) to that of
    f * g.  Exact on columns of degree <= valid_degree = N - deg(f); beyond
    that, products spill past the truncation and rows are missing.
    """
    if basis is None:
        if max_degree is None:
            max_degree = f.max_degree
        basis = FockBasis(f.d, max_degree)
    if f.d != basis.d:
        raise ShapeMismatchError(
            f"series alphabet d={f.d} != basis alphabet d={basis.d}")
    p, q = f.rows, f.cols
    N = basis.max_degree
    M = np.zeros((basis.dim * p, basis.dim * q), dtype=complex)
    for alpha, m in f.coeffs.items():
        la = len(alpha)
        if la > N:
            continue
        for j, beta in enumerate(basis.words):
            if la + len(beta) > N:
                continue
            i = basis.index[alpha + beta]
            M[i * p:(i + 1) * p, j * q:(j + 1) * q] += m
    valid = N - min(f.degree(), N)
    return OperatorMatrix(M, basis, p, q, valid)


def isometry_defect(op, degree_limit):
    """Spectral-norm deviation of the column Gram from the identity.

    Only columns of degree <= degree_limit enter.  Asking past the validity
    window would measure truncation, not the operator, so that is an error.
    """
    if degree_limit > op.valid_degree:
        raise ValidityWindowError(
            f"degree limit {degree_limit} exceeds validity window "
            f"{op.valid_degree}")
    C = op.restricted(degree_limit)
    G = C.conj().T @ C
    return float(np.linalg.norm(G - np.eye(G.shape[0]), 2))


def smallest_singular_value(op, degree_limit):
    """Least singular value of the matrix restricted to low-degree columns.

    Restriction is on the domain side only; the range keeps every row, so
    norm growth out of the window is still seen.
    """
    if degree_limit > op.valid_degree:
        raise ValidityWindowError(
            f"degree limit {degree_limit} exceeds validity window "
            f"{op.valid_degree}")
    C = op.restricted(degree_limit)
    s = np.linalg.svd(C, compute_uv=False)
    return float(s[-1])


def numerical_rank(A, rel=RANK_REL):
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel * s[0]))


def orthonormal_frame(columns, rel=RANK_REL):
    """Orthonormal basis for the column span, via SVD with relative cutoff."""
    A = np.asarray(columns, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    r = int(np.sum(s > rel * s[0]))
    return U[:, :r]


def principal_cosines(A, B):
    """Cosines of the principal angles between the column spans of two
    orthonormal frames, padded with zeros when dimensions differ."""
    m = max(A.shape[1], B.shape[1])
    if m == 0:
        return np.zeros(0)
    s = np.linalg.svd(A.conj().T @ B, compute_uv=False)
    out = np.zeros(m)
    out[:s.size] = np.clip(s, 0.0, 1.0)
    return out


def invariant_projection(frame):
    """Orthogonal projection onto the span of an orthonormal frame."""
    return frame @ frame.conj().T


def wandering_projection(Q, basis, channels=1):
    """Q - sum_k R_k Q R_k^* for a right-shift invariant projection Q.

    On an invariant subspace this is the projection onto the generating
    (wandering) part: what remains after removing every right translate.
    channels is the number of vector components per basis word.
    """
    p = channels
    if Q.shape != (basis.dim * p, basis.dim * p):
        raise ShapeMismatchError(
            f"projection shape {Q.shape} incompatible with basis dim "
            f"{basis.dim} x {p} channels")
    P = Q.copy()
    Ip = np.eye(p)
    for k in range(1, basis.d + 1):
        R = right_shift_matrix(basis, k)
        Rp = np.kron(R, Ip) if p > 1 else R
        P -= Rp @ Q @ Rp.conj().T
    return P


def wandering_vectors(P, tol=WANDER_EIG_TOL):
    """Eigenvectors of the wandering projection with eigenvalue near 1.

    Returns (vectors, eigenvalues) with vectors as columns.  Truncation
    perturbs the projection, so eigenvalues sit near rather than at 1; the
    tolerance bounds |eigenvalue - 1|.
    """
    H = 0.5 * (P + P.conj().T)
    vals, vecs = np.linalg.eigh(H)
    keep = np.abs(vals - 1.0) <= tol
    return vecs[:, keep], vals[keep]


def wandering_dimension(op, col_degree=None, rel=RANK_REL):
    """Number of generators of the right-invariant subspace spanned by the
    operator columns.

    Computed as a rank difference: columns over all words of length
    <= col_degree, minus columns over words of length in [1, col_degree].
    Both ranks use the same relative cutoff so the truncation bias cancels;
    this is exact for polynomial symbols once col_degree covers the
    generators.
    """
    if col_degree is None:
        col_degree = op.valid_degree
    if col_degree > op.valid_degree:
        raise ValidityWindowError(
            f"column degree {col_degree} exceeds validity window "
            f"{op.valid_degree}")
    C_all = op.restricted(col_degree)
    q = op.cols
    start = op.basis.degree_start(1) * q
    C_shifted = C_all[:, start:]
    return numerical_rank(C_all, rel) - numerical_rank(C_shifted, rel)


def wandering_dimension_profile(f, r_grid, max_degree=None, col_degree=None,
                                rel=RANK_REL):
    """wandering_dimension of mult_operator(rescale(f, r)) over a grid."""
    if max_degree is None:
        max_degree = f.max_degree
    basis = FockBasis(f.d, max_degree)
    out = []
    for r in r_grid:
        op = mult_operator(rescale(f, r), basis)
        out.append(wandering_dimension(op, col_degree=col_degree, rel=rel))
    return out
