"""Weight filtration machinery.

Monodromy weight filtrations of nilpotent endomorphisms, relative weight
filtrations over a base filtration, sl(2)-triples, the canonical grading
associated to a compatible pair of gradings, and the admissibility pipeline
that ties it all to a limiting Hodge filtration.
"""

from __future__ import annotations

from typing import Sequence

from .filtrations import DecFiltration, IncFiltration
from .linalg import (
    Matrix,
    NoSolution,
    NotNilpotent,
    Subspace,
    ad_eig_split,
    commutator,
    grading_eigenvalue_candidates,
    is_nilpotent,
    nullspace,
    rref,
    solve,
)
from .mhs import Bigrading, PolarizationSystem, deligne_bigrading, grading_of
from .scalars import FieldOps


class WeightError(Exception):
    pass


class DoesNotExist(WeightError):
    """Proven obstruction: no filtration can satisfy the defining constraints."""


class ConstructionFailed(WeightError):
    """The constructor gave up without proving non-existence."""


class NonUnique(WeightError):
    pass


class NotAdmissible(WeightError):
    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"not admissible ({clause})" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# graded helpers


def graded_maps(w: IncFiltration, k: int) -> tuple[list[tuple], Matrix]:
    """Default lifts for the weight-k graded piece and its class-coordinate map."""
    field = w.field
    n = w.ambient_dim
    prev = w.at(k - 1)
    lifts = []
    span = prev
    for v in w.at(k).basis:
        if not span.contains(v):
            lifts.append(v)
            span = span | Subspace(n, [v], field)
    cols = [list(v) for v in lifts] + [list(v) for v in prev.basis]
    full = Subspace(n, cols, field) if cols else Subspace.zero(n, field)
    for j in range(n):
        if full.dim == n:
            break
        e = [field.zero] * n
        e[j] = field.one
        if not full.contains(e):
            cols.append(e)
            full = full | Subspace(n, [e], field)
    inv = Matrix.from_cols(cols, field).inverse()
    return lifts, Matrix(inv.rows[: len(lifts)], field)


def graded_action(a: Matrix, w: IncFiltration, k: int) -> Matrix:
    """Matrix of the action induced on the weight-k graded piece."""
    lifts, cl = graded_maps(w, k)
    return Matrix.from_cols([cl.apply(a.apply(v)) for v in lifts], a.field)


def endo_op_matrix(op, n: int, field: FieldOps) -> Matrix:
    """Matrix of a linear operator on endomorphisms, in row-major flattening."""
    cols = []
    for i in range(n):
        for j in range(n):
            cols.append(op(Matrix.unit(n, i, j, field)).flatten())
    return Matrix.from_cols(cols, field)


# ---------------------------------------------------------------------------
# monodromy weight filtration


def monodromy_filtration(n_op: Matrix) -> IncFiltration:
    """The unique filtration centered at 0 shifted by N with N^j: Gr_j ≅ Gr_{-j}.

    Built by the closed formula W_k = Σ_{j≥0} N^j(ker N^{k+2j+1}); both
    defining properties are verified exactly before returning.
    """
    field = n_op.field
    n = n_op.nrows
    if not is_nilpotent(n_op):
        raise NotNilpotent("monodromy filtration of a non-nilpotent operator")
    d = 0
    p = n_op
    while not p.is_zero():
        d += 1
        p = p * n_op
    # d = nilpotency index - 1: N^d != 0 = N^{d+1}
    kernels = {m: nullspace(n_op.power(m)) for m in range(0, d + 2)}
    powers = {j: n_op.power(j) for j in range(0, d + 1)}
    steps = {}
    for k in range(-d, d + 1):
        acc = Subspace.zero(n, field)
        for j in range(0, d + 1):
            m = k + 2 * j + 1
            if m <= 0:
                continue
            ker = kernels[min(m, d + 1)]
            acc = acc | ker.image(powers[j])
        steps[k] = acc
    steps[d] = Subspace.full(n, field)
    w = IncFiltration(n, steps, field)
    # verification of the defining properties
    for k in range(-d, d + 1):
        if not w.at(k - 2).contains_subspace(w.at(k).image(n_op)):
            raise WeightError(f"operator does not shift the filtration by -2 at {k}")
    for j in range(1, d + 1):
        if w.graded_dim(j) != w.graded_dim(-j):
            raise WeightError(f"graded dimensions at ±{j} differ")
        # injectivity of the induced map Gr_j -> Gr_{-j}
        pre = w.at(-j - 1).preimage(powers[j]) & w.at(j)
        if pre != w.at(j - 1):
            raise WeightError(f"induced power map at {j} is not injective on the graded piece")
    return w


# ---------------------------------------------------------------------------
# sl(2) triples


class Sl2Triple:
    """A triple (n_minus, y, n_plus) with the standard commutator identities."""

    def __init__(self, n_minus: Matrix, y: Matrix, n_plus: Matrix):
        self.n_minus = n_minus
        self.y = y
        self.n_plus = n_plus
        if not self.verify():
            raise WeightError("commutator identities fail for the triple")

    def verify(self) -> bool:
        two = self.y.field.from_int(2)
        return (
            commutator(self.y, self.n_minus) == self.n_minus.scale(-two)
            and commutator(self.y, self.n_plus) == self.n_plus.scale(two)
            and commutator(self.n_plus, self.n_minus) == self.y
        )


def sl2_complete(n_minus: Matrix, h: Matrix) -> Sl2Triple:
    """The unique raising operator completing (n_minus, h) to an sl(2) triple.

    Requires [h, n_minus] = -2 n_minus; the raising operator is found by an
    exact linear solve of [h, X] = 2X, [X, n_minus] = h.
    """
    field = n_minus.field
    n = n_minus.nrows
    two = field.from_int(2)
    if commutator(h, n_minus) != n_minus.scale(-two):
        raise NoSolution("grading operator does not lower the given nilpotent by 2")
    raise_deg = endo_op_matrix(lambda x: commutator(h, x) - x.scale(two), n, field)
    pair_down = endo_op_matrix(lambda x: commutator(x, n_minus), n, field)
    stacked = Matrix(list(raise_deg.rows) + list(pair_down.rows), field)
    rhs = tuple([field.zero] * (n * n)) + h.flatten()
    try:
        x = solve(stacked, rhs)
    except NoSolution:
        raise NoSolution("no raising operator exists; preconditions are violated")
    if nullspace(stacked).dim > 0:
        raise NonUnique("raising operator is not unique; grading does not match the nilpotent")
    return Sl2Triple(n_minus, h, Matrix.unflatten(x, n, field))


def triple_from_gradings(n_op: Matrix, rel_y: Matrix, y: Matrix, w: IncFiltration) -> Sl2Triple:
    """Triple (N₀, relY−Y, N₀⁺) with N₀ the grading-degree-0 part of N."""
    field = n_op.field
    two = field.from_int(2)
    if commutator(rel_y, n_op) != n_op.scale(-two):
        raise WeightError("first grading does not lower the nilpotent by 2")
    if not w.graded_by(y):
        raise WeightError("second operator does not grade the base filtration")
    if not w.preserved_by(rel_y):
        raise WeightError("first grading does not preserve the base filtration")
    parts = ad_eig_split(y, n_op)
    n0 = parts.get(0, Matrix.zero(n_op.nrows, n_op.nrows, field))
    return sl2_complete(n0, rel_y - y)


# ---------------------------------------------------------------------------
# relative weight filtrations


def _restrict(a: Matrix, s: Subspace) -> Matrix:
    """Matrix of an endomorphism restricted to an invariant subspace, in its basis."""
    return Matrix.from_cols([s.coordinates(a.apply(v)) for v in s.basis], a.field)


def relative_weight_filtration(n_op: Matrix, w: IncFiltration) -> IncFiltration:
    """The unique filtration M with N·M_j ⊆ M_{j-2} inducing shifted monodromy
    filtrations on every graded piece of W; DoesNotExist if obstructed.

    Strategy: the base cases (single weight, or N = 0) are closed formulas.
    Otherwise the restriction to the penultimate step and the induced
    filtration on the top graded quotient are both forced by uniqueness, and
    the remaining freedom is a choice of lifts of quotient classes, solved as
    one exact linear system.  Infeasibility of that system is a proven
    obstruction.
    """
    field = n_op.field
    n = n_op.nrows
    if not is_nilpotent(n_op):
        raise NotNilpotent("relative weight filtration of a non-nilpotent operator")
    if not w.preserved_by(n_op):
        raise WeightError("operator does not preserve the base filtration")
    if n_op.is_zero():
        return w
    support = [k for k in w.support if w.graded_dim(k) > 0]
    if len(support) == 1:
        m = monodromy_filtration(n_op).shift(-support[0])
        ok, report = verify_relative_weight_filtration(m, n_op, w)
        if not ok:
            raise ConstructionFailed(f"pure-weight candidate failed verification: {report}")
        return m

    k_top = support[-1]
    s = w.at(k_top - 1)
    sb = Matrix.from_cols([list(v) for v in s.basis], field)

    # forced restriction to the penultimate step
    n_sub = _restrict(n_op, s)
    w_sub = IncFiltration(
        s.dim,
        {k: Subspace(s.dim, [s.coordinates(v) for v in w.at(k).basis], field) for k in support[:-1]},
        field,
    )
    m_sub = relative_weight_filtration(n_sub, w_sub)
    a_steps = {
        j: Subspace(n, [sb.apply(c) for c in m_sub.at(j).basis] or [], field)
        for j in range(m_sub.support[0] - 1, m_sub.support[-1] + 1)
    }
    a_lo, a_hi = m_sub.support[0], m_sub.support[-1]

    # forced filtration on the top graded quotient
    lifts, cl = graded_maps(w, k_top)
    n_q = Matrix.from_cols([cl.apply(n_op.apply(v)) for v in lifts], field)
    m_q = monodromy_filtration(n_q).shift(-k_top)

    # unknown lifts: one representative per quotient class, with a correction in S
    reps = []  # (level j, representative in V, class coordinates)
    for j in m_q.support:
        prev = m_q.at(j - 1)
        for c in m_q.at(j).basis:
            if prev.contains(c):
                continue
            v = [field.zero] * n
            for coeff, lift in zip(c, lifts):
                v = [x + coeff * y for x, y in zip(v, lift)]
            reps.append((j, tuple(v), tuple(c)))
            prev = prev | Subspace(m_q.at(j).ambient_dim, [c], field)
    r = len(reps)
    sdim = s.dim

    def a_at(j):
        if j < a_lo:
            return Subspace.zero(n, field)
        return a_steps[min(j, a_hi)]

    # constraint per representative: N(c_i + x_i) - sum_l a_il (c_l + x_l) in A_{j_i-2},
    # with the coefficients a_il determined on the quotient.
    rows = []
    rhs = []
    for i, (ji, ci, _) in enumerate(reps):
        nci = n_op.apply(ci)
        cls_coords = cl.apply(nci)
        # express the class of N c_i in the classes of deeper representatives
        deeper = [l for l, (jl, _, _) in enumerate(reps) if jl <= ji - 2]
        if deeper:
            basis_mat = Matrix.from_cols([list(reps[l][2]) for l in deeper], field)
            coeffs = solve(basis_mat, cls_coords)
        else:
            coeffs = ()
            if any(not field.is_zero(x) for x in cls_coords):
                raise DoesNotExist(
                    f"class of the shifted representative at level {ji} has no home at level {ji - 2}"
                )
        d_i = list(nci)
        for l, cf in zip(deeper, coeffs):
            d_i = [x - cf * y for x, y in zip(d_i, reps[l][1])]
        res = a_at(ji - 2).residual_matrix()
        # rows over the unknown corrections x_1..x_r (each sdim coordinates in S)
        for out in range(n):
            row = [field.zero] * (r * sdim)
            for col in range(sdim):
                base = sb.transpose().rows[col]  # basis vector of S
                # + N x_i term
                nv = n_op.apply(base)
                coeff = field.zero
                for t in range(n):
                    coeff = coeff + res.rows[out][t] * nv[t]
                row[i * sdim + col] = row[i * sdim + col] + coeff
                # - a_il x_l terms
                for l, cf in zip(deeper, coeffs):
                    coeff2 = field.zero
                    for t in range(n):
                        coeff2 = coeff2 + res.rows[out][t] * base[t]
                    row[l * sdim + col] = row[l * sdim + col] - cf * coeff2
            rows.append(row)
            acc = field.zero
            for t in range(n):
                acc = acc + res.rows[out][t] * d_i[t]
            rhs.append(-acc)
    if rows:
        try:
            x = solve(Matrix(rows, field), tuple(rhs))
        except NoSolution:
            raise DoesNotExist("lift constraints are infeasible; the filtration cannot exist")
    else:
        x = tuple()

    corrected = []
    for i, (ji, ci, _) in enumerate(reps):
        xi = [field.zero] * n
        for col in range(sdim):
            c = x[i * sdim + col] if x else field.zero
            base = sb.transpose().rows[col]
            xi = [a + c * b for a, b in zip(xi, base)]
        corrected.append((ji, tuple(a + b for a, b in zip(ci, xi))))

    lo = min(a_lo, m_q.support[0])
    hi = max(a_hi, m_q.support[-1])
    steps = {}
    for j in range(lo, hi + 1):
        acc = a_at(j)
        for jl, v in corrected:
            if jl <= j:
                acc = acc | Subspace(n, [v], field)
        steps[j] = acc
    m = IncFiltration(n, steps, field)
    ok, report = verify_relative_weight_filtration(m, n_op, w)
    if not ok:
        raise ConstructionFailed(f"assembled candidate failed verification: {report}")
    return m


def verify_relative_weight_filtration(
    m: IncFiltration, n_op: Matrix, w: IncFiltration
) -> tuple[bool, str | None]:
    """Exact check of the two defining properties; reports the first failure."""
    if not m.preserved_by(n_op) or not w.preserved_by(n_op):
        return False, "operator does not preserve the filtrations"
    lo, hi = m.support[0], m.support[-1]
    for j in range(lo, hi + 1):
        if not m.at(j - 2).contains_subspace(m.at(j).image(n_op)):
            return False, f"shift-by-two fails at level {j}"
    for k in w.support:
        if w.graded_dim(k) == 0:
            continue
        lifts, cl = graded_maps(w, k)
        gk = len(lifts)
        n_gr = Matrix.from_cols([cl.apply(n_op.apply(v)) for v in lifts], m.field)
        expected = monodromy_filtration(n_gr).shift(-k)
        for j in range(lo - 1, hi + 1):
            induced = (m.at(j) & w.at(k)).basis
            got = (
                Subspace(gk, [cl.apply(v) for v in induced], m.field)
                if induced
                else Subspace.zero(gk, m.field)
            )
            if got != expected.at(j):
                return False, f"graded piece at weight {k}, level {j} is not the shifted centered filtration"
    return True, None


# ---------------------------------------------------------------------------
# the canonical grading


def _initial_grading(rel_y: Matrix, w: IncFiltration) -> Matrix:
    """A grading of W commuting with rel_y, from eigenspace-compatible complements."""
    field = rel_y.field
    n = rel_y.nrows
    eigs = grading_eigenvalue_candidates(rel_y)
    eig_spaces = {
        mu: nullspace(rel_y - Matrix.identity(n, field).scale(field.from_int(mu))) for mu in eigs
    }
    cols, tags = [], []
    for k, wk in w.jumps:
        prev = w.at(k - 1)
        for mu, emu in eig_spaces.items():
            inside = emu & wk
            span = emu & prev
            for v in inside.basis:
                if not (span | prev).contains(v):
                    cols.append(list(v))
                    tags.append(k)
                    span = span | Subspace(n, [v], field)
    if len(cols) != n:
        raise WeightError("grading does not preserve the base filtration")
    c = Matrix.from_cols(cols, field)
    d = Matrix(
        [[field.from_int(tags[i]) if i == j else field.zero for j in range(n)] for i in range(n)],
        field,
    )
    return c * d * c.inverse()


def deligne_grading(
    rel_y: Matrix,
    n_op: Matrix,
    w: IncFiltration,
    initial: Matrix | None = None,
    relw: IncFiltration | None = None,
) -> tuple[Matrix, Sl2Triple]:
    """The unique grading Y of W commuting with rel_y whose residual nilpotent
    part commutes with the triple's raising operator.

    Iterates from an initial grading, at each step removing the deepest
    obstruction [N_{-k}, N₀⁺] ≠ 0 by an exact linear solve for a degree
    (-k, 0) correction.
    """
    field = rel_y.field
    n = rel_y.nrows
    two = field.from_int(2)
    if commutator(rel_y, n_op) != n_op.scale(-two):
        raise WeightError("grading does not lower the nilpotent by 2")
    if not w.preserved_by(rel_y):
        raise WeightError("grading does not preserve the base filtration")
    if relw is None:
        relw = relative_weight_filtration(n_op, w)
    if not relw.graded_by(rel_y):
        raise WeightError("operator does not grade the relative weight filtration")
    if initial is not None:
        if not w.graded_by(initial) or not commutator(initial, rel_y).is_zero():
            raise WeightError("initial grading must grade the base filtration and commute")
        y = initial
    else:
        y = _initial_grading(rel_y, w)

    span = w.support[-1] - w.support[0]
    for _ in range(span + 2):
        parts = ad_eig_split(y, n_op)
        zero = Matrix.zero(n, n, field)
        n0 = parts.get(0, zero)
        triple = sl2_complete(n0, rel_y - y)
        np_ = triple.n_plus
        bad = sorted(
            k for k, comp in parts.items() if k < 0 and not commutator(comp, np_).is_zero()
        )
        if not bad:
            if not commutator(n_op - n0, np_).is_zero():
                raise WeightError("residual obstruction outside the graded pieces")
            return y, triple
        k = -max(bad)  # smallest depth first
        obstruction = commutator(parts[-k], np_)
        m1 = endo_op_matrix(lambda x: commutator(y, x) + x.scale(field.from_int(k)), n, field)
        m2 = endo_op_matrix(lambda x: commutator(rel_y, x), n, field)
        m3 = endo_op_matrix(lambda x: commutator(commutator(n0, x), np_), n, field)
        stacked = Matrix(list(m1.rows) + list(m2.rows) + list(m3.rows), field)
        rhs = (
            tuple([field.zero] * (2 * n * n))
            + tuple(-v for v in obstruction.flatten())
        )
        try:
            gvec = solve(stacked, rhs)
        except NoSolution:
            raise WeightError(f"no correction exists at depth {k}; preconditions are violated")
        gamma = Matrix.unflatten(gvec, n, field)
        g = Matrix.identity(n, field) + gamma
        y = g * y * g.inverse()
    raise WeightError("grading iteration did not terminate")


# ---------------------------------------------------------------------------
# admissibility


class AdmissibleTriple:
    """A filtration pair with a compatible nilpotent operator and its derived data."""

    def __init__(self, f, w, n_op, relw, rel_y, y, triple, bigrading):
        self.f: DecFiltration = f
        self.w: IncFiltration = w
        self.n_op: Matrix = n_op
        self.relw: IncFiltration = relw
        self.rel_y: Matrix = rel_y
        self.y: Matrix = y
        self.triple: Sl2Triple = triple
        self.bigrading: Bigrading = bigrading


def admissible_pipeline(f: DecFiltration, w: IncFiltration, n_op: Matrix) -> AdmissibleTriple:
    """Full admissibility check and derived-data computation.

    Clauses, in order: nilpotency and weight preservation, existence of the
    relative weight filtration, the mixed Hodge structure condition of
    (F, relW) on every weight step, and the (-1,-1) pairing of N with the
    resulting bigrading.  On success the canonical grading and triple are
    attached.
    """
    from .mhs import NotMHS

    field = f.field
    n = f.ambient_dim
    if not is_nilpotent(n_op):
        raise NotAdmissible("nilpotent", "operator is not nilpotent")
    if not w.preserved_by(n_op):
        raise NotAdmissible("weight-preservation", "operator moves the weight filtration")
    try:
        relw = relative_weight_filtration(n_op, w)
    except DoesNotExist as e:
        raise NotAdmissible("relative-weight-filtration", str(e))
    try:
        big = deligne_bigrading(f, relw)
    except NotMHS as e:
        raise NotAdmissible("mhs", str(e))
    # the pair must induce a mixed Hodge structure on every weight step
    for k, s in w.jumps:
        if s.dim in (0, n):
            continue
        f_sub = DecFiltration(
            s.dim,
            {p: Subspace(s.dim, [s.coordinates(v) for v in (f.at(p) & s).basis], field)
             for p, _ in f.jumps},
            field,
        )
        relw_sub = IncFiltration(
            s.dim,
            {j: Subspace(s.dim, [s.coordinates(v) for v in (relw.at(j) & s).basis], field)
             for j, _ in relw.jumps},
            field,
        )
        try:
            deligne_bigrading(f_sub, relw_sub)
        except NotMHS as e:
            raise NotAdmissible("mhs", f"on the weight-{k} step: {e}")
    for (p, q), piece in big.pieces.items():
        target = big.pieces.get((p - 1, q - 1))
        img = piece.image(n_op)
        if img.dim == 0:
            continue
        if target is None or not target.contains_subspace(img):
            raise NotAdmissible("pairing", f"operator is not of type (-1,-1) on piece ({p},{q})")
    rel_y = big.grading()
    y, triple = deligne_grading(rel_y, n_op, w, relw=relw)
    return AdmissibleTriple(f, w, n_op, relw, rel_y, y, triple, big)


# ---------------------------------------------------------------------------
# isometry checks


def isometry_checks(h: Matrix, pol: PolarizationSystem, w: IncFiltration) -> bool:
    """Whether the graded action of h is an infinitesimal isometry of each form."""
    field = h.field
    if not w.preserved_by(h):
        return False
    cls = pol.class_maps(w)
    for k in pol.weights:
        s = pol.forms[k]
        a = Matrix.from_cols([cls[k].apply(h.apply(v)) for v in pol.graded_lifts[k]], field)
        if not (a.transpose() * s + s * a).is_zero():
            return False
    return True


def weight_selfdual(wf: IncFiltration, q: Matrix) -> bool:
    """Whether W_j is the Q-orthocomplement of W_{-j-1} for all j (centered at 0)."""
    field = wf.field
    lo, hi = wf.support[0], wf.support[-1]
    for j in range(min(lo, -hi - 1) - 1, max(hi, -lo - 1) + 1):
        other = wf.at(-j - 1)
        if other.dim == 0:
            perp = Subspace.full(wf.ambient_dim, field)
        else:
            perp = nullspace(Matrix([q.transpose().apply(u) for u in other.basis], field))
        if wf.at(j) != perp:
            return False
    return True
