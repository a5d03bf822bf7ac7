"""Mixed Hodge structures as filtration pairs.

A mixed Hodge structure is presented as a pair (F, W) of a decreasing and an
increasing filtration on the same ambient space.  This module computes the
canonical bigrading V = ⊕ I^{p,q}, the associated grading operator, the
graded-polarized metric, stratified membership tests for the classifying
space, the induced bigrading on endomorphisms, and the real-splitting
operator δ.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .filtrations import DecFiltration, IncFiltration
from .linalg import (
    DimensionMismatch,
    Matrix,
    Subspace,
    ad_eig_split,
    commutator,
    hermitian_definite,
    nilpotent_exp,
    nullspace,
)
from .scalars import EXACT, FieldOps


class MHSError(Exception):
    pass


class NotMHS(MHSError):
    """The filtration pair does not admit the canonical bigrading."""


class NotGradedPolarized(MHSError):
    """Polarization data is inconsistent or the induced metric is indefinite."""


class HodgeNumberMismatch(MHSError):
    pass


class NotDefinite(MHSError):
    pass


class SplitSolveFailed(MHSError):
    """The real-splitting solve did not verify (input or implementation defect)."""


class Stratum(Enum):
    NOT_IN_FLAG_CHECK = "NotInFlagCheck"
    IN_CHECK_FW = "InCheckF_W"
    IN_CHECK_M = "InCheckM"
    IN_M = "InM"


class GroupStratum(Enum):
    NOT_IN_GC = "NotInG_C"
    IN_GC = "InG_C"
    IN_G = "InG"
    IN_GR = "InG_R"


def _i_power(field: FieldOps, e: int):
    """i**e for a possibly negative integer e."""
    return field.imag ** (e % 4)


# ---------------------------------------------------------------------------
# polarization data


class PolarizationSystem:
    """Graded bilinear forms S_k on user-supplied graded lifts, plus h^{p,q}.

    ``graded_lifts[k]`` is a list of vectors in W_k whose classes are a basis
    of the weight-k graded piece; ``forms[k]`` is the Gram matrix of S_k in
    that basis.  Lifts are always explicit input — the library never picks
    them silently.
    """

    def __init__(
        self,
        hodge_numbers: Mapping[tuple[int, int], int],
        graded_lifts: Mapping[int, Sequence[Sequence]],
        forms: Mapping[int, Matrix],
        field: FieldOps = EXACT,
    ):
        self.hodge_numbers = {k: int(v) for k, v in hodge_numbers.items() if v}
        self.graded_lifts = {k: [tuple(v) for v in vs] for k, vs in graded_lifts.items()}
        self.forms = dict(forms)
        self.field = field
        if set(self.graded_lifts) != set(self.forms):
            raise NotGradedPolarized("weights of graded lifts and forms differ")
        for k, s in self.forms.items():
            g = len(self.graded_lifts[k])
            if (s.nrows, s.ncols) != (g, g):
                raise NotGradedPolarized(f"form at weight {k} is not {g}x{g}")
            if any(not field.is_real(a) for r in s.rows for a in r):
                raise NotGradedPolarized(f"form at weight {k} has non-real entries")
            sign = field.one if k % 2 == 0 else -field.one
            if s.transpose() != s.scale(sign):
                kind = "symmetric" if k % 2 == 0 else "antisymmetric"
                raise NotGradedPolarized(f"form at weight {k} is not {kind}")
            if s.rank() != g:
                raise NotGradedPolarized(f"form at weight {k} is degenerate")

    @property
    def weights(self) -> list[int]:
        return sorted(self.graded_lifts)

    def validate_against(self, w: IncFiltration) -> None:
        field = self.field
        n = w.ambient_dim
        for k in w.support:
            gd = w.graded_dim(k)
            if gd == 0:
                continue
            if k not in self.graded_lifts:
                raise NotGradedPolarized(f"no graded lifts supplied at weight {k}")
            lifts = self.graded_lifts[k]
            if len(lifts) != gd:
                raise NotGradedPolarized(
                    f"{len(lifts)} lifts at weight {k}, graded dimension is {gd}"
                )
            wk, wk1 = w.at(k), w.at(k - 1)
            for v in lifts:
                if len(v) != n or not wk.contains(v):
                    raise NotGradedPolarized(f"lift at weight {k} is not in the filtration step")
            if (wk1 | Subspace(n, lifts, field)).dim != wk.dim:
                raise NotGradedPolarized(f"lift classes at weight {k} are dependent")
            hs = sum(c for (p, q), c in self.hodge_numbers.items() if p + q == k)
            if hs != gd:
                raise HodgeNumberMismatch(
                    f"hodge numbers at weight {k} sum to {hs}, graded dimension is {gd}"
                )
        for (p, q), c in self.hodge_numbers.items():
            if c and w.graded_dim(p + q) == 0:
                raise HodgeNumberMismatch(f"h^{{{p},{q}}} nonzero but weight {p+q} is empty")

    def class_maps(self, w: IncFiltration) -> dict[int, Matrix]:
        """Per weight k, the matrix computing graded-class coordinates.

        Row space: coordinates in the lift basis; only meaningful on W_k.
        """
        field = self.field
        n = w.ambient_dim
        out = {}
        for k in self.weights:
            cols = [list(v) for v in self.graded_lifts[k]]
            cols += [list(v) for v in w.at(k - 1).basis]
            span = Subspace(n, cols, field)
            for j in range(n):
                if span.dim == n:
                    break
                e = [field.zero] * n
                e[j] = field.one
                if not span.contains(e):
                    cols.append(e)
                    span = span | Subspace(n, [e], field)
            inv = Matrix.from_cols(cols, field).inverse()
            out[k] = Matrix(inv.rows[: len(self.graded_lifts[k])], field)
        return out


# ---------------------------------------------------------------------------
# the canonical bigrading


class Bigrading:
    """Direct sum decomposition V = ⊕ I^{p,q} attached to a filtration pair."""

    def __init__(self, pieces: Mapping[tuple[int, int], Subspace], ambient_dim: int, field: FieldOps = EXACT):
        self.pieces = {k: s for k, s in pieces.items() if s.dim > 0}
        self.ambient_dim = ambient_dim
        self.field = field
        self._cache: dict = {}

    def keys(self) -> list[tuple[int, int]]:
        return sorted(self.pieces)

    @property
    def weights(self) -> list[int]:
        return sorted({p + q for p, q in self.pieces})

    def weight_space(self, k: int) -> Subspace:
        out = Subspace.zero(self.ambient_dim, self.field)
        for (p, q), s in self.pieces.items():
            if p + q == k:
                out = out | s
        return out

    def adapted_columns(self) -> list[tuple[tuple[int, int], tuple]]:
        """A basis of V listed piece by piece, tagged with the (p,q) index."""
        cols = []
        for key in self.keys():
            for v in self.pieces[key].basis:
                cols.append((key, v))
        return cols

    def _change_of_basis(self) -> tuple[Matrix, Matrix]:
        if "cob" not in self._cache:
            cols = [list(v) for _, v in self.adapted_columns()]
            c = Matrix.from_cols(cols, self.field)
            self._cache["cob"] = (c, c.inverse())
        return self._cache["cob"]

    def projectors(self) -> dict[tuple[int, int], Matrix]:
        if "proj" not in self._cache:
            c, cinv = self._change_of_basis()
            n = self.ambient_dim
            tags = [key for key, _ in self.adapted_columns()]
            out = {}
            for key in self.keys():
                rows = [
                    [self.field.one if (i == j and tags[i] == key) else self.field.zero for j in range(n)]
                    for i in range(n)
                ]
                out[key] = c * Matrix(rows, self.field) * cinv
            self._cache["proj"] = out
        return self._cache["proj"]

    def grading(self) -> Matrix:
        """The operator acting as p+q on I^{p,q}."""
        if "grading" not in self._cache:
            n = self.ambient_dim
            y = Matrix.zero(n, n, self.field)
            for (p, q), pr in self.projectors().items():
                y = y + pr.scale(self.field.from_int(p + q))
            self._cache["grading"] = y
        return self._cache["grading"]

    def is_split_real(self) -> bool:
        for (p, q), s in self.pieces.items():
            other = self.pieces.get((q, p))
            if other is None or s.conjugate() != other:
                return False
        return True


def deligne_bigrading(f: DecFiltration, w: IncFiltration) -> Bigrading:
    """Compute the canonical bigrading of (F, W), verifying its properties.

    The candidate pieces come from the closed formula
        I^{p,q} = F^p ∩ W_{p+q} ∩ (conj(F^q) ∩ W_{p+q} + Σ_{j≥1} conj(F^{q-j}) ∩ W_{p+q-j-1})
    and the result is accepted only if the direct-sum and compatibility
    properties verify; otherwise NotMHS is raised.
    """
    if f.ambient_dim != w.ambient_dim:
        raise DimensionMismatch("filtration ambient dimensions differ")
    n = f.ambient_dim
    field = f.field
    fc = f.conjugate()
    kmin, kmax = w.support[0], w.support[-1]
    pmax = f.support[-1] - 1  # F vanishes at its last jump index
    plo = min(kmin - pmax, pmax)
    pieces = {}
    for p in range(plo, pmax + 1):
        for q in range(plo, pmax + 1):
            k = p + q
            if k < kmin or k > kmax:
                continue
            first = f.at(p) & w.at(k)
            if first.dim == 0:
                continue
            second = fc.at(q) & w.at(k)
            j = 1
            while w.at(k - j - 1).dim > 0:
                second = second | (fc.at(q - j) & w.at(k - j - 1))
                j += 1
            piece = first & second
            if piece.dim > 0:
                pieces[(p, q)] = piece

    big = Bigrading(pieces, n, field)
    ok, reason = verify_bigrading(big, f, w)
    if not ok:
        raise NotMHS(reason)
    return big


def verify_bigrading(big: Bigrading, f: DecFiltration, w: IncFiltration) -> tuple[bool, str | None]:
    """Exact check that candidate pieces decompose (F, W); first failure named."""
    n = f.ambient_dim
    field = f.field
    kmin, kmax = w.support[0], w.support[-1]
    pmax = f.support[-1] - 1
    plo = min([kmin - pmax, pmax] + [min(p, q) for p, q in big.pieces])
    # direct sum of the whole space
    total = sum(s.dim for s in big.pieces.values())
    stacked = [v for s in big.pieces.values() for v in s.basis]
    rank = Matrix(stacked, field).rank() if stacked else 0
    if total != n or rank != n:
        return False, f"candidate pieces span dimension {rank} of {n}"
    # F^p = ⊕_{a >= p}
    for p in range(plo, pmax + 2):
        want = f.at(p).dim
        got = sum(s.dim for (a, _), s in big.pieces.items() if a >= p)
        if got != want:
            return False, f"Hodge filtration step {p} has dimension {want}, pieces give {got}"
        for (a, b), s in big.pieces.items():
            if a >= p and not f.at(p).contains_subspace(s):
                return False, f"piece ({a},{b}) escapes Hodge filtration step {p}"
    # W_k = ⊕_{a+b <= k}
    for k in range(kmin - 1, kmax + 1):
        want = w.at(k).dim
        got = sum(s.dim for (a, b), s in big.pieces.items() if a + b <= k)
        if got != want:
            return False, f"weight step {k} has dimension {want}, pieces give {got}"
        for (a, b), s in big.pieces.items():
            if a + b <= k and not w.at(k).contains_subspace(s):
                return False, f"piece ({a},{b}) escapes weight step {k}"
    # conj(I^{p,q}) = I^{q,p} modulo lower-index pieces
    for (p, q), s in big.pieces.items():
        target = big.pieces.get((q, p), Subspace.zero(n, field))
        for (r, t), lower in big.pieces.items():
            if r < q and t < p:
                target = target | lower
        if not target.contains_subspace(s.conjugate()):
            return False, f"conjugation symmetry fails at piece ({p},{q})"
    return True, None


def grading_of(f: DecFiltration, w: IncFiltration) -> Matrix:
    return deligne_bigrading(f, w).grading()


def is_split_real(f: DecFiltration, w: IncFiltration) -> bool:
    return deligne_bigrading(f, w).is_split_real()


# ---------------------------------------------------------------------------
# the graded-polarized metric


def _metric_gram(
    f: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem,
    basis: Sequence[Sequence] | None = None,
    bigrading: Bigrading | None = None,
) -> Matrix:
    field = f.field
    n = f.ambient_dim
    pol.validate_against(w)
    big = bigrading if bigrading is not None else deligne_bigrading(f, w)
    for (p, q), s in big.pieces.items():
        if s.dim != pol.hodge_numbers.get((p, q), 0):
            raise HodgeNumberMismatch(
                f"piece ({p},{q}) has dimension {s.dim}, declared h = {pol.hodge_numbers.get((p, q), 0)}"
            )
    for key, c in pol.hodge_numbers.items():
        if c and key not in big.pieces:
            raise HodgeNumberMismatch(f"declared h^{{{key[0]},{key[1]}}} = {c} but piece is zero")
    cls = pol.class_maps(w)
    proj = big.projectors()
    if basis is None:
        basis = Matrix.identity(n, field).transpose().rows
    vecs = [tuple(v) for v in basis]
    # per basis vector, its graded classes piece by piece (and conjugated ones)
    comp = {}
    comp_bar = {}
    for a, v in enumerate(vecs):
        for key, pr in proj.items():
            u = pr.apply(v)
            comp[(a, key)] = cls[key[0] + key[1]].apply(u)
            comp_bar[(a, key)] = cls[key[0] + key[1]].apply(tuple(field.conj(x) for x in u))
    m = len(vecs)
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            t = field.zero
            for (p, q) in big.pieces:
                s = pol.forms[p + q]
                left = comp[(a, (p, q))]
                right = comp_bar[(b, (p, q))]
                val = field.zero
                for i, li in enumerate(left):
                    if field.is_zero(li):
                        continue
                    for j, rj in enumerate(right):
                        val = val + li * s.rows[i][j] * rj
                t = t + _i_power(field, p - q) * val
            row.append(t)
        rows.append(row)
    return Matrix(rows, field)


def mixed_hodge_metric(
    f: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem,
    basis: Sequence[Sequence] | None = None,
    bigrading: Bigrading | None = None,
) -> Matrix:
    """Gram matrix of the metric with orthogonal I^{p,q} pieces.

    On each piece the metric is i^{p-q} S_{p+q} on graded classes, with the
    second argument conjugated.  Raises NotGradedPolarized if the form fails
    to be positive definite (the filtration then sits outside the polarized
    classifying space).
    """
    g = _metric_gram(f, w, pol, basis=basis, bigrading=bigrading)
    ok, witness = hermitian_definite(g)
    if not ok:
        raise NotGradedPolarized(f"metric is not positive definite (pivot {witness})")
    return g


def adjoint_endo(t: Matrix, gram: Matrix) -> Matrix:
    """Adjoint of an endomorphism for the (conjugate-linear second slot) Gram."""
    gt = gram.transpose()
    return gt.inverse() * t.conj_transpose() * gt


def endo_norm_sq(t: Matrix, gram: Matrix):
    """Squared metric norm Tr(t ∘ adjoint(t)) of an endomorphism."""
    return (t * adjoint_endo(t, gram)).trace()


def metric_grading(w: IncFiltration, gram: Matrix) -> Matrix:
    """Grading of W with weight spaces the Gram-orthocomplements of W_{k-1} in W_k."""
    field = w.field
    n = w.ambient_dim
    ok, witness = hermitian_definite(gram)
    if not ok:
        raise NotDefinite(f"grading metric is not positive definite (pivot {witness})")
    cols = []
    tags = []
    for k, wk in w.jumps:
        prev = w.at(k - 1)
        if prev.dim == 0:
            ek = wk
        else:
            # h(v, u) = v^T G conj(u) = 0 for all u in the previous step
            rows = [gram.apply(tuple(field.conj(x) for x in u)) for u in prev.basis]
            ek = wk & nullspace(Matrix(rows, field))
        for v in ek.basis:
            cols.append(list(v))
            tags.append(k)
    if len(cols) != n:
        raise NotDefinite("orthocomplements do not assemble to a grading")
    c = Matrix.from_cols(cols, field)
    d = Matrix(
        [[field.from_int(tags[i]) if i == j else field.zero for j in range(n)] for i in range(n)],
        field,
    )
    return c * d * c.inverse()


# ---------------------------------------------------------------------------
# classifying space membership


def classify_membership(f: DecFiltration, w: IncFiltration, pol: PolarizationSystem) -> Stratum:
    """Deepest stratum of the flag: graded dimensions, graded isotropy, full MHS + definite metric."""
    field = f.field
    pol.validate_against(w)
    # graded dimension check
    pvals = sorted({p for (p, _) in pol.hodge_numbers})
    for k in w.support:
        if w.graded_dim(k) == 0:
            continue
        wk, wk1 = w.at(k), w.at(k - 1)
        for p in range(min(pvals), max(pvals) + 2):
            want = sum(c for (r, s), c in pol.hodge_numbers.items() if r + s == k and r >= p)
            got = ((f.at(p) & wk) | wk1).dim - wk1.dim
            if got != want:
                return Stratum.NOT_IN_FLAG_CHECK
    # graded first bilinear relation
    cls = pol.class_maps(w)
    for k in pol.weights:
        s = pol.forms[k]
        wk = w.at(k)
        for p in sorted({r for (r, t) in pol.hodge_numbers if r + t == k}):
            left = (f.at(p) & wk).basis
            right = (f.at(k - p + 1) & wk).basis
            for u in left:
                cu = cls[k].apply(u)
                for v in right:
                    cv = cls[k].apply(v)
                    val = field.zero
                    for i, a in enumerate(cu):
                        for j, b in enumerate(cv):
                            val = val + a * s.rows[i][j] * b
                    if not field.is_zero(val):
                        return Stratum.IN_CHECK_FW
    try:
        big = deligne_bigrading(f, w)
        gram = _metric_gram(f, w, pol, bigrading=big)
    except (NotMHS, HodgeNumberMismatch):
        return Stratum.IN_CHECK_M
    ok, _ = hermitian_definite(gram)
    return Stratum.IN_M if ok else Stratum.IN_CHECK_M


def group_membership(g: Matrix, w: IncFiltration, pol: PolarizationSystem) -> GroupStratum:
    """Locate an invertible endomorphism among the symmetry groups of (W, S)."""
    field = g.field
    pol.validate_against(w)
    if not w.preserved_by(g):
        return GroupStratum.NOT_IN_GC
    cls = pol.class_maps(w)
    graded = {}
    for k in pol.weights:
        cols = [cls[k].apply(g.apply(v)) for v in pol.graded_lifts[k]]
        a = Matrix.from_cols(cols, field)
        s = pol.forms[k]
        if a.transpose() * s * a != s:
            return GroupStratum.NOT_IN_GC
        graded[k] = a
    if any(not field.is_real(x) for a in graded.values() for r in a.rows for x in r):
        return GroupStratum.IN_GC
    if g.conj() == g:
        return GroupStratum.IN_GR
    return GroupStratum.IN_G


# ---------------------------------------------------------------------------
# endomorphism-space bigradings


class LieBigrading:
    """Bigrading of an endomorphism space: piece (r,s) maps I^{p,q} into I^{p+r,q+s}.

    Subspaces live in the row-major flattening of the endomorphism space.
    """

    def __init__(self, pieces: Mapping[tuple[int, int], Subspace], n: int, field: FieldOps = EXACT):
        self.pieces = {k: s for k, s in pieces.items() if s.dim > 0}
        self.n = n
        self.field = field

    def keys(self) -> list[tuple[int, int]]:
        return sorted(self.pieces)

    @property
    def total_dim(self) -> int:
        return sum(s.dim for s in self.pieces.values())

    def piece_sum(self, pred) -> Subspace:
        """Span of all pieces whose (r,s) index satisfies the predicate."""
        out = Subspace.zero(self.n * self.n, self.field)
        for (r, s), sp in self.pieces.items():
            if pred(r, s):
                out = out | sp
        return out


def endo_bigrading(big: Bigrading) -> LieBigrading:
    """Bigrading of the full endomorphism algebra induced by a bigrading of V."""
    field = big.field
    n = big.ambient_dim
    c, cinv = big._change_of_basis()
    tags = [key for key, _ in big.adapted_columns()]
    buckets: dict[tuple[int, int], list] = {}
    for i, (pi, qi) in enumerate(tags):
        for j, (pj, qj) in enumerate(tags):
            m = c * Matrix.unit(n, i, j, field) * cinv
            buckets.setdefault((pi - pj, qi - qj), []).append(m.flatten())
    pieces = {key: Subspace(n * n, vecs, field) for key, vecs in buckets.items()}
    return LieBigrading(pieces, n, field)


def isometry_algebra(w: IncFiltration, pol: PolarizationSystem) -> Subspace:
    """Endomorphisms preserving W whose graded action is an infinitesimal isometry.

    Returned as a subspace of the row-major-flattened endomorphism space.
    """
    field = w.field
    n = w.ambient_dim
    pol.validate_against(w)
    rows = []
    for k, s in w.jumps:
        if s.dim == n:
            continue
        res = s.residual_matrix()
        for v in s.basis:
            for i in range(n):
                row = [field.zero] * (n * n)
                nontrivial = False
                for a in range(n):
                    ria = res.rows[i][a]
                    if field.is_zero(ria):
                        continue
                    for b in range(n):
                        if not field.is_zero(v[b]):
                            row[a * n + b] = row[a * n + b] + ria * v[b]
                            nontrivial = True
                if nontrivial:
                    rows.append(row)
    cls = pol.class_maps(w)
    for k in pol.weights:
        s = pol.forms[k]
        cl = cls[k]
        lifts = pol.graded_lifts[k]
        u = s.transpose() * cl
        t = s * cl
        gk = len(lifts)
        for i in range(gk):
            for j in range(gk):
                row = [field.zero] * (n * n)
                for a in range(n):
                    c1 = u.rows[j][a]
                    c2 = t.rows[i][a]
                    for b in range(n):
                        val = c1 * lifts[i][b] + c2 * lifts[j][b]
                        if not field.is_zero(val):
                            row[a * n + b] = row[a * n + b] + val
                rows.append(row)
    if not rows:
        return Subspace.full(n * n, field)
    return nullspace(Matrix(rows, field))


def lie_bigrading(
    f: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem | None = None,
    bigrading: Bigrading | None = None,
) -> LieBigrading:
    """Bigrading of the endomorphism space adapted to (F, W).

    With a polarization system, pieces are cut inside the isometry algebra of
    (W, S); without one, the full endomorphism algebra is decomposed.
    """
    big = bigrading if bigrading is not None else deligne_bigrading(f, w)
    full = endo_bigrading(big)
    if pol is None:
        return full
    field = big.field
    n = big.ambient_dim
    alg = isometry_algebra(w, pol)
    proj = big.projectors()
    keys = big.keys()
    buckets: dict[tuple[int, int], list] = {}
    for vec in alg.basis:
        a = Matrix.unflatten(vec, n, field)
        for (p, q) in keys:
            for (pp, qq) in keys:
                piece = proj[(pp, qq)] * a * proj[(p, q)]
                if not piece.is_zero():
                    buckets.setdefault((pp - p, qq - q), []).append(piece.flatten())
    pieces = {key: Subspace(n * n, vecs, field) for key, vecs in buckets.items()}
    lb = LieBigrading(pieces, n, field)
    if lb.total_dim != alg.dim:
        raise NotMHS(
            "isometry algebra is not bigrading-stable "
            f"(pieces span {lb.total_dim}, algebra has dimension {alg.dim})"
        )
    for key, sp in lb.pieces.items():
        for vec in sp.basis:
            if not alg.contains(vec):
                raise NotMHS(f"endomorphism piece {key} leaves the isometry algebra")
    return lb


def chart_complement(
    f: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem | None = None,
    bigrading: Bigrading | None = None,
) -> Subspace:
    """The nilpotent complement ⊕_{r<0, r+s≤0} of the flag stabilizer."""
    lb = lie_bigrading(f, w, pol, bigrading=bigrading)
    return lb.piece_sum(lambda r, s: r < 0 and r + s <= 0)


def lambda_space(
    f: DecFiltration,
    w: IncFiltration,
    bigrading: Bigrading | None = None,
) -> Subspace:
    """The strictly-negative block ⊕_{r≤-1, s≤-1} of the endomorphism bigrading."""
    lb = lie_bigrading(f, w, None, bigrading=bigrading)
    return lb.piece_sum(lambda r, s: r <= -1 and s <= -1)


# ---------------------------------------------------------------------------
# the real-splitting operator


def delta_split(f: DecFiltration, w: IncFiltration) -> tuple[Matrix, DecFiltration]:
    """Real operator δ with e^{-iδ}·F split over ℝ; returns (δ, e^{-iδ}·F).

    δ is found degree by degree in the grading-eigenvalue decomposition by
    matching the conjugate of the grading operator; the exact split check on
    the result is the acceptance gate.
    """
    field = f.field
    n = f.ambient_dim
    big = deligne_bigrading(f, w)
    y = big.grading()
    ybar = y.conj()
    weights = big.weights
    span = weights[-1] - weights[0] if len(weights) > 1 else 0
    delta = Matrix.zero(n, n, field)
    converged = False
    for _ in range(span + 2):
        g = nilpotent_exp(delta.scale(field.imag * field.from_int(-2)))
        r = g * y * g.inverse() - ybar
        if r.is_zero():
            converged = True
            break
        parts = ad_eig_split(y, r, weights)
        m = max(parts)
        if m > -2:
            raise SplitSolveFailed(f"conjugate-grading mismatch at degree {m}")
        delta = delta + parts[m].scale(field.imag * field.from_rational(Fraction(1, 2 * m)))
    if not converged:
        raise SplitSolveFailed("degree-by-degree solve did not converge")
    if delta.conj() != delta:
        raise SplitSolveFailed("splitting operator is not real")
    if not delta.is_zero() and not lambda_space(f, w, bigrading=big).contains(delta.flatten()):
        raise SplitSolveFailed("splitting operator escapes the strictly-negative block")
    f_hat = f.apply(nilpotent_exp(delta.scale(-field.imag)))
    if not is_split_real(f_hat, w):
        raise SplitSolveFailed("twisted filtration is not split over the reals")
    return delta, f_hat
