"""Exact subspace and endomorphism calculus over a generic scalar field.

Vectors are coordinate tuples, endomorphisms act on column vectors, and
subspaces are stored as reduced row-echelon bases so equality of canonical
forms decides subspace equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import EXACT, FieldOps


class LinAlgError(Exception):
    pass


class DimensionMismatch(LinAlgError):
    pass


class NotNilpotent(LinAlgError):
    pass


class NotSemisimple(LinAlgError):
    pass


class NotHermitian(LinAlgError):
    pass


class NoSolution(LinAlgError):
    pass


def rref(rows, field: FieldOps):
    """Reduced row echelon form; returns (rows_without_zero_rows, pivot_cols)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        # pivot selection: largest magnitude for inexact fields, first
        # nonzero for exact/symbolic ones
        best = None
        for i in range(r, len(rows)):
            if not field.is_zero(rows[i][c]):
                if best is None or (not field.exact and field.mag(rows[i][c]) > field.mag(rows[best][c])):
                    best = i
                    if field.exact:
                        break
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows[:r]], pivots


class Matrix:
    """Immutable dense matrix over a FieldOps scalar type."""

    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows: Sequence[Sequence], field: FieldOps):
        rows = tuple(tuple(r) for r in rows)
        if rows:
            n = len(rows[0])
            if any(len(r) != n for r in rows):
                raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", len(rows[0]) if rows else 0)
        object.__setattr__(self, "field", field)

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(m: int, n: int, field: FieldOps = EXACT) -> "Matrix":
        z = field.zero
        return Matrix([[z] * n for _ in range(m)], field)

    @staticmethod
    def identity(n: int, field: FieldOps = EXACT) -> "Matrix":
        z, o = field.zero, field.one
        return Matrix([[o if i == j else z for j in range(n)] for i in range(n)], field)

    @staticmethod
    def from_rows(rows, field: FieldOps = EXACT) -> "Matrix":
        return Matrix(rows, field)

    @staticmethod
    def from_cols(cols, field: FieldOps = EXACT) -> "Matrix":
        return Matrix(list(zip(*cols)), field)

    @staticmethod
    def unit(n: int, i: int, j: int, field: FieldOps = EXACT) -> "Matrix":
        """Matrix unit E_ij mapping e_j to e_i."""
        z, o = field.zero, field.one
        return Matrix(
            [[o if (r == i and c == j) else z for c in range(n)] for r in range(n)],
            field,
        )

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.field is not other.field and self.field.name != other.field.name:
            raise DimensionMismatch("field mismatch")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shape mismatch in add")
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            self.field,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows], self.field)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            if self.ncols != other.nrows:
                raise DimensionMismatch("shape mismatch in mul")
            cols = list(zip(*other.rows))
            return Matrix(
                [[_dot(r, c, self.field) for c in cols] for r in self.rows],
                self.field,
            )
        return self.scale(other)

    def scale(self, s) -> "Matrix":
        return Matrix([[s * a for a in r] for r in self.rows], self.field)

    def apply(self, vec: Sequence) -> tuple:
        """Matrix acting on a column vector."""
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length mismatch")
        return tuple(_dot(r, vec, self.field) for r in self.rows)

    def power(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of non-square matrix")
        out = Matrix.identity(self.nrows, self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- structure ----------------------------------------------------------

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.rows)), self.field)

    def conj(self) -> "Matrix":
        c = self.field.conj
        return Matrix([[c(a) for a in r] for r in self.rows], self.field)

    def conj_transpose(self) -> "Matrix":
        return self.conj().transpose()

    def trace(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch("trace of non-square matrix")
        t = self.field.zero
        for i in range(self.nrows):
            t = t + self.rows[i][i]
        return t

    def is_zero(self) -> bool:
        return all(self.field.is_zero(a) for r in self.rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Matrix is not hashable")

    def flatten(self) -> tuple:
        """Row-major flattening; used to treat endomorphisms as vectors."""
        return tuple(a for r in self.rows for a in r)

    @staticmethod
    def unflatten(vec: Sequence, n: int, field: FieldOps = EXACT) -> "Matrix":
        if len(vec) != n * n:
            raise DimensionMismatch("unflatten length mismatch")
        return Matrix([vec[i * n : (i + 1) * n] for i in range(n)], field)

    def rank(self) -> int:
        rows, _ = rref(self.rows, self.field)
        return len(rows)

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.nrows
        ident = Matrix.identity(n, self.field)
        aug = [list(r) + list(i) for r, i in zip(self.rows, ident.rows)]
        red, piv = rref(aug, self.field)
        if piv[:n] != list(range(n)):
            raise NoSolution("matrix is singular")
        return Matrix([r[n:] for r in red], self.field)

    def map_convert(self, field: FieldOps, convert) -> "Matrix":
        return Matrix([[convert(a) for a in r] for r in self.rows], field)

    def __repr__(self):
        body = "; ".join(", ".join(str(a) for a in r) for r in self.rows)
        return f"Matrix[{body}]"


def _dot(r, c, field: FieldOps):
    t = field.zero
    for a, b in zip(r, c):
        t = t + a * b
    return t


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a * b - b * a


class Subspace:
    """A subspace of the ambient coordinate space, stored as an RREF basis."""

    __slots__ = ("ambient_dim", "basis", "pivots", "field")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence], field: FieldOps = EXACT):
        vectors = [tuple(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch("vector length != ambient dimension")
        basis, pivots = rref(vectors, field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "pivots", tuple(pivots))
        object.__setattr__(self, "field", field)

    def __setattr__(self, *a):
        raise AttributeError("Subspace is immutable")

    @staticmethod
    def zero(n: int, field: FieldOps = EXACT) -> "Subspace":
        return Subspace(n, [], field)

    @staticmethod
    def full(n: int, field: FieldOps = EXACT) -> "Subspace":
        return Subspace(n, Matrix.identity(n, field).rows, field)

    @staticmethod
    def span(vectors, field: FieldOps = EXACT) -> "Subspace":
        vectors = [tuple(v) for v in vectors]
        if not vectors:
            raise ValueError("span() needs at least one vector (use Subspace.zero)")
        return Subspace(len(vectors[0]), vectors, field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimension mismatch")

    def reduce(self, vec: Sequence) -> tuple:
        """Residual of vec after elimination against the basis; zero iff member."""
        v = list(vec)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if not self.field.is_zero(c):
                v = [a - c * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vec: Sequence) -> bool:
        vec = list(vec)
        if not self.field.exact:
            # scale down so the tolerance in is_zero acts relatively; RREF
            # normalization can blow entries up by the inverse of a tiny pivot
            m = 0.0
            for x in vec:
                s = self.field.mag(x)
                if isinstance(s, float) and s > m:
                    m = s
            if m > 1.0:
                inv = 1.0 / m
                vec = [x * inv for x in vec]
        return all(self.field.is_zero(a) for a in self.reduce(vec))

    def coordinates(self, vec: Sequence) -> tuple:
        """Coefficients of vec in the canonical basis; raises if not a member."""
        v = list(vec)
        coords = []
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            coords.append(c)
            if not self.field.is_zero(c):
                v = [a - c * b for a, b in zip(v, row)]
        if not all(self.field.is_zero(a) for a in v):
            raise NoSolution("vector not in subspace")
        return tuple(coords)

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains(v) for v in other.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        self._check(other)
        if self.dim != other.dim:
            return False
        if self.field.exact:
            return self.basis == other.basis
        return self.contains_subspace(other) and other.contains_subspace(self)

    def __hash__(self):
        raise TypeError("Subspace is not hashable")

    # -- lattice operations -------------------------------------------------

    def add(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.ambient_dim, list(self.basis) + list(other.basis), self.field)

    __or__ = add

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.field)
        # solve sum a_i u_i = sum b_j w_j: nullspace in the coefficients
        cols = [list(v) for v in self.basis] + [[-x for x in v] for v in other.basis]
        coeffs = nullspace(Matrix.from_cols(cols, self.field))
        vecs = []
        for c in coeffs.basis:
            v = [self.field.zero] * self.ambient_dim
            for a, u in zip(c[: self.dim], self.basis):
                v = [x + a * y for x, y in zip(v, u)]
            vecs.append(v)
        return Subspace(self.ambient_dim, vecs, self.field)

    __and__ = intersect

    def image(self, endo: Matrix) -> "Subspace":
        if endo.ncols != self.ambient_dim:
            raise DimensionMismatch("endomorphism/subspace dimension mismatch")
        return Subspace(endo.nrows, [endo.apply(v) for v in self.basis], self.field)

    def preimage(self, endo: Matrix) -> "Subspace":
        """{v : endo(v) in self}."""
        if endo.nrows != self.ambient_dim:
            raise DimensionMismatch("endomorphism/subspace dimension mismatch")
        # residual map of self is linear; compose with endo and take the kernel
        res_rows = []
        n = endo.ncols
        for j in range(n):
            e = [self.field.zero] * n
            e[j] = self.field.one
            res_rows.append(self.reduce(endo.apply(e)))
        return nullspace(Matrix.from_cols(res_rows, self.field))

    def conjugate(self) -> "Subspace":
        c = self.field.conj
        return Subspace(self.ambient_dim, [[c(a) for a in v] for v in self.basis], self.field)

    def residual_matrix(self) -> Matrix:
        """Matrix R with R v = self.reduce(v); kernel of R is this subspace."""
        n = self.ambient_dim
        cols = []
        for j in range(n):
            e = [self.field.zero] * n
            e[j] = self.field.one
            cols.append(self.reduce(e))
        return Matrix.from_cols(cols, self.field)

    def basis_matrix(self) -> Matrix:
        return Matrix(self.basis, self.field)

    def __repr__(self):
        return f"Subspace(dim={self.dim}/{self.ambient_dim})"


def nullspace(m: Matrix) -> Subspace:
    """{x : m x = 0} as a subspace of the domain."""
    field = m.field
    n = m.ncols
    red, pivots = rref(m.rows, field)
    free = [c for c in range(n) if c not in pivots]
    vecs = []
    for fc in free:
        v = [field.zero] * n
        v[fc] = field.one
        for row, p in zip(red, pivots):
            v[p] = -row[fc]
        vecs.append(v)
    return Subspace(n, vecs, field)


def solve(m: Matrix, rhs: Sequence) -> tuple:
    """One solution x of m x = rhs; raises NoSolution if inconsistent."""
    field = m.field
    aug = [list(r) + [b] for r, b in zip(m.rows, rhs)]
    red, pivots = rref(aug, field)
    if m.ncols in pivots:
        raise NoSolution("inconsistent linear system")
    x = [field.zero] * m.ncols
    for row, p in zip(red, pivots):
        x[p] = row[-1]
    return tuple(x)


def eig_split(y: Matrix, eigenvalues: Sequence) -> list[Subspace]:
    """Eigenspaces of a semisimple endomorphism with the given eigenvalues."""
    field = y.field
    n = y.nrows
    spaces = []
    total = 0
    for a in eigenvalues:
        av = field.from_rational(Fraction(a)) if isinstance(a, (int, Fraction)) else a
        shifted = y - Matrix.identity(n, field).scale(av)
        es = nullspace(shifted)
        spaces.append(es)
        total += es.dim
    if total != n:
        raise NotSemisimple(
            f"eigenspaces span dimension {total} < {n}; not semisimple with the listed eigenvalues"
        )
    return spaces


def eig_projectors(y: Matrix, eigenvalues: Sequence) -> dict:
    """Projectors onto the eigenspaces of a semisimple endomorphism."""
    field = y.field
    n = y.nrows
    spaces = eig_split(y, eigenvalues)
    cols = []
    for s in spaces:
        cols.extend(list(v) for v in s.basis)
    change = Matrix.from_cols(cols, field)
    inv = change.inverse()
    projectors = {}
    offset = 0
    for a, s in zip(eigenvalues, spaces):
        d = Matrix.zero(n, n, field)
        rows = [list(r) for r in d.rows]
        for i in range(offset, offset + s.dim):
            rows[i][i] = field.one
        projectors[a] = change * Matrix(rows, field) * inv
        offset += s.dim
    return projectors


def grading_eigenvalue_candidates(y: Matrix, bound: int | None = None) -> list[int]:
    """Integer eigenvalues of a semisimple integer-spectrum endomorphism.

    Scans kernel ranks of (y - a) for |a| <= bound (default: ambient dim * max
    entry heuristic replaced by a generous fixed window).
    """
    n = y.nrows
    if bound is None:
        bound = 4 * n
    found = []
    total = 0
    for a in range(-bound, bound + 1):
        shifted = y - Matrix.identity(n, y.field).scale(y.field.from_int(a))
        d = nullspace(shifted).dim
        if d > 0:
            found.append(a)
            total += d
        if total == n:
            break
    if total != n:
        raise NotSemisimple("could not locate an integer eigenbasis")
    return found


def ad_eig_split(y: Matrix, a: Matrix, eigenvalues: Sequence[int] | None = None) -> dict[int, Matrix]:
    """Decompose a = sum_l a_l with [y, a_l] = l * a_l, for semisimple integer y.

    Returns the nonzero components keyed by the integer ad-eigenvalue.
    """
    if eigenvalues is None:
        eigenvalues = grading_eigenvalue_candidates(y)
    projectors = eig_projectors(y, list(eigenvalues))
    out: dict[int, Matrix] = {}
    for av in eigenvalues:
        for bv in eigenvalues:
            piece = projectors[av] * a * projectors[bv]
            if not piece.is_zero():
                out.setdefault(av - bv, Matrix.zero(y.nrows, y.nrows, y.field))
                out[av - bv] = out[av - bv] + piece
    return {k: v for k, v in out.items() if not v.is_zero()}


def is_nilpotent(u: Matrix) -> bool:
    if u.nrows != u.ncols:
        return False
    p = u
    for _ in range(u.nrows):
        if p.is_zero():
            return True
        p = p * u
    return p.is_zero()


def nilpotent_exp(u: Matrix) -> Matrix:
    """Finite-series exponential of a nilpotent endomorphism."""
    if not is_nilpotent(u):
        raise NotNilpotent("exp of a non-nilpotent endomorphism")
    n = u.nrows
    out = Matrix.identity(n, u.field)
    term = Matrix.identity(n, u.field)
    for k in range(1, n + 1):
        term = term * u
        if term.is_zero():
            break
        out = out + term.scale(u.field.from_rational(Fraction(1, _factorial(k))))
    return out


def nilpotent_log(g: Matrix) -> Matrix:
    """Finite-series logarithm of a unipotent endomorphism."""
    n = g.nrows
    u = g - Matrix.identity(n, g.field)
    if not is_nilpotent(u):
        raise NotNilpotent("log of a non-unipotent endomorphism")
    out = Matrix.zero(n, n, g.field)
    term = Matrix.identity(n, g.field)
    for k in range(1, n + 1):
        term = term * u
        if term.is_zero():
            break
        out = out + term.scale(g.field.from_rational(Fraction((-1) ** (k + 1), k)))
    return out


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def hermitian_definite(g: Matrix):
    """Decide positive-definiteness of a hermitian matrix by LDL* pivots.

    Returns (True, None) or (False, witness) where witness is the first
    non-positive pivot.  Pivots of a hermitian matrix are real; for the exact
    field they are rational.
    """
    field = g.field
    if g.nrows != g.ncols:
        raise DimensionMismatch("definiteness of a non-square matrix")
    if g != g.conj_transpose():
        raise NotHermitian("matrix is not equal to its conjugate transpose")
    rows = [list(r) for r in g.rows]
    n = g.nrows
    for k in range(n):
        d = rows[k][k]
        if not field.is_real(d):
            raise NotHermitian("non-real diagonal pivot")
        if not _positive(d, field):
            return False, d
        for i in range(k + 1, n):
            f = rows[i][k] / d
            for j in range(k, n):
                rows[i][j] = rows[i][j] - f * rows[k][j]
    return True, None


def _positive(d, field: FieldOps) -> bool:
    if field.is_zero(d):
        return False
    if field.exact:
        return d.re > 0
    try:
        return field.to_complex(d).real > 0
    except TypeError:
        # symbolic pivot with free parameters: rely on declared assumptions
        if hasattr(d, "simplify"):
            d = d.simplify()
        verdict = getattr(d, "is_positive", None)
        if verdict is None:
            raise NotHermitian(f"cannot decide the sign of symbolic pivot {d}")
        return bool(verdict)
