"""Generated instance corpus: building blocks, combinators, and random data.

Everything here is deterministic given a seed, dimension-bounded, and exact.
The blocks are small graded-polarized structures; the combinators (direct sum,
tensor, dual, twist) build the mixed instances the verification suites run on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .filtrations import DecFiltration, IncFiltration
from .linalg import Matrix, Subspace, commutator, nilpotent_exp, nullspace
from .mhs import PolarizationSystem, lambda_space
from .scalars import EXACT, QI
from .weights import Sl2Triple, endo_op_matrix


@dataclass
class Instance:
    """One corpus member: filtration pair, nilpotent operator, optional forms."""

    name: str
    f: DecFiltration
    w: IncFiltration
    n_op: Matrix
    pol: PolarizationSystem | None = None

    @property
    def dim(self) -> int:
        return self.f.ambient_dim


def _e(n, i):
    v = [QI(0)] * n
    v[i] = QI(1)
    return tuple(v)


# ---------------------------------------------------------------------------
# building blocks


def ladder(length: int, lam=QI(0)) -> Instance:
    """Hodge–Tate ladder: one line in each even weight 0..2(length-1), the
    nilpotent operator stepping each line down onto the previous one.

    ``lam`` shears the top flag line over the bottom one (length 2 only).
    """
    n = length
    w_steps = {2 * j: Subspace(n, [_e(n, i) for i in range(j + 1)], EXACT) for j in range(n)}
    f_steps = {}
    for p in range(1, n):
        vecs = [_e(n, i) for i in range(p, n)]
        if p == n - 1 and n == 2:
            shear = lam if isinstance(lam, QI) else QI(lam)
            vecs = [(shear, QI(1))]
        f_steps[p] = Subspace(n, vecs, EXACT)
    rows = [[QI(1) if j == i + 1 else QI(0) for j in range(n)] for i in range(n)]
    n_op = Matrix(rows, EXACT)  # e_j -> e_{j-1}
    pol = PolarizationSystem(
        {(j, j): 1 for j in range(n)},
        {2 * j: [_e(n, j)] for j in range(n)},
        {2 * j: Matrix([[QI(1)]], EXACT) for j in range(n)},
    )
    return Instance(f"ladder{n}", DecFiltration(n, f_steps), IncFiltration(n, w_steps), n_op, pol)


def tate(k: int) -> Instance:
    """One-dimensional pure piece of type (k, k)."""
    w = IncFiltration(1, {2 * k: Subspace.full(1)})
    f = DecFiltration(1, {k: Subspace.full(1), k + 1: Subspace.zero(1)})
    pol = PolarizationSystem(
        {(k, k): 1}, {2 * k: [_e(1, 0)]}, {2 * k: Matrix([[QI(1)]], EXACT)}
    )
    return Instance(f"tate{k}", f, w, Matrix.zero(1, 1), pol)


def elliptic(tau=QI(0, 1)) -> Instance:
    """Weight-one pure structure h^{1,0} = h^{0,1} = 1, parameter in the upper half plane."""
    if tau.im <= 0:
        raise ValueError("parameter must have positive imaginary part")
    w = IncFiltration(2, {1: Subspace.full(2)})
    f = DecFiltration(2, {1: Subspace.span([(QI(1), tau)])})
    pol = PolarizationSystem(
        {(1, 0): 1, (0, 1): 1},
        {1: [_e(2, 0), _e(2, 1)]},
        {1: Matrix([[QI(0), QI(1)], [QI(-1), QI(0)]], EXACT)},
    )
    return Instance("elliptic", f, w, Matrix.zero(2, 2), pol)


# ---------------------------------------------------------------------------
# combinators


def _embed(v, offset, total):
    out = [QI(0)] * total
    for i, x in enumerate(v):
        out[offset + i] = x
    return tuple(out)


def direct_sum(a: Instance, b: Instance) -> Instance:
    na, nb = a.dim, b.dim
    n = na + nb
    w_steps = {}
    for k in sorted(set(a.w.support) | set(b.w.support)):
        vecs = [_embed(v, 0, n) for v in a.w.at(k).basis]
        vecs += [_embed(v, na, n) for v in b.w.at(k).basis]
        w_steps[k] = Subspace(n, vecs, EXACT)
    f_steps = {}
    ps = sorted(set(a.f.support) | set(b.f.support))
    for p in ps:
        vecs = [_embed(v, 0, n) for v in a.f.at(p).basis]
        vecs += [_embed(v, na, n) for v in b.f.at(p).basis]
        f_steps[p] = Subspace(n, vecs, EXACT)
    rows = [
        [a.n_op.rows[i][j] if j < na else QI(0) for j in range(n)] for i in range(na)
    ] + [
        [b.n_op.rows[i][j - na] if j >= na else QI(0) for j in range(n)] for i in range(nb)
    ]
    pol = None
    if a.pol is not None and b.pol is not None:
        numbers = dict(a.pol.hodge_numbers)
        for key, c in b.pol.hodge_numbers.items():
            numbers[key] = numbers.get(key, 0) + c
        lifts, forms = {}, {}
        for k in sorted(set(a.pol.weights) | set(b.pol.weights)):
            la = [_embed(v, 0, n) for v in a.pol.graded_lifts.get(k, [])]
            lb = [_embed(v, na, n) for v in b.pol.graded_lifts.get(k, [])]
            lifts[k] = la + lb
            da, db = len(la), len(lb)
            block = [[QI(0)] * (da + db) for _ in range(da + db)]
            if da:
                for i in range(da):
                    for j in range(da):
                        block[i][j] = a.pol.forms[k].rows[i][j]
            if db:
                for i in range(db):
                    for j in range(db):
                        block[da + i][da + j] = b.pol.forms[k].rows[i][j]
            forms[k] = Matrix(block, EXACT)
        pol = PolarizationSystem(numbers, lifts, forms)
    return Instance(
        f"({a.name})+({b.name})",
        DecFiltration(n, f_steps),
        IncFiltration(n, w_steps),
        Matrix(rows, EXACT),
        pol,
    )


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for i in range(a.nrows):
        for k in range(b.nrows):
            rows.append(
                [a.rows[i][j] * b.rows[k][l] for j in range(a.ncols) for l in range(b.ncols)]
            )
    return Matrix(rows, EXACT)


def _tensor_vec(u, v):
    return tuple(x * y for x in u for y in v)


def tensor(a: Instance, b: Instance) -> Instance:
    na, nb = a.dim, b.dim
    n = na * nb
    w_steps = {}
    kas, kbs = a.w.support, b.w.support
    for k in sorted({ka + kb for ka in kas for kb in kbs}):
        vecs = []
        for ka in kas:
            for kb in kbs:
                if ka + kb <= k:
                    for u in a.w.at(ka).basis:
                        for v in b.w.at(kb).basis:
                            vecs.append(_tensor_vec(u, v))
        w_steps[k] = Subspace(n, vecs, EXACT)
    f_steps = {}
    pas = [p for p, _ in a.f.jumps]
    pbs = [p for p, _ in b.f.jumps]
    lows = (min(pas) - 1, min(pbs) - 1)
    for p in sorted({pa + pb for pa in pas + [lows[0]] for pb in pbs + [lows[1]]}):
        vecs = []
        for pa in pas + [lows[0]]:
            pb = p - pa
            for u in a.f.at(pa).basis:
                for v in b.f.at(pb).basis:
                    vecs.append(_tensor_vec(u, v))
        f_steps[p] = Subspace(n, vecs, EXACT)
    ia, ib = Matrix.identity(na), Matrix.identity(nb)
    n_op = kron(a.n_op, ib) + kron(ia, b.n_op)
    pol = None
    if a.pol is not None and b.pol is not None:
        numbers = {}
        for (p1, q1), c1 in a.pol.hodge_numbers.items():
            for (p2, q2), c2 in b.pol.hodge_numbers.items():
                key = (p1 + p2, q1 + q2)
                numbers[key] = numbers.get(key, 0) + c1 * c2
        lifts, forms = {}, {}
        for ka in a.pol.weights:
            for kb in b.pol.weights:
                k = ka + kb
                pairs = [
                    _tensor_vec(u, v)
                    for u in a.pol.graded_lifts[ka]
                    for v in b.pol.graded_lifts[kb]
                ]
                block = kron(a.pol.forms[ka], b.pol.forms[kb])
                if k not in lifts:
                    lifts[k] = pairs
                    forms[k] = block
                else:
                    old = len(lifts[k])
                    new = len(pairs)
                    merged = [[QI(0)] * (old + new) for _ in range(old + new)]
                    for i in range(old):
                        for j in range(old):
                            merged[i][j] = forms[k].rows[i][j]
                    for i in range(new):
                        for j in range(new):
                            merged[old + i][old + j] = block.rows[i][j]
                    lifts[k] = lifts[k] + pairs
                    forms[k] = Matrix(merged, EXACT)
        pol = PolarizationSystem(numbers, lifts, forms)
    return Instance(
        f"({a.name})x({b.name})",
        DecFiltration(n, f_steps),
        IncFiltration(n, w_steps),
        n_op,
        pol,
    )


def annihilator(s: Subspace) -> Subspace:
    """Functionals vanishing on a subspace, in dual coordinates."""
    n = s.ambient_dim
    if s.dim == 0:
        return Subspace.full(n)
    return nullspace(Matrix([list(v) for v in s.basis], EXACT))


def dual(a: Instance) -> Instance:
    """Dual structure: negated weights and Hodge indices; forms are dropped."""
    n = a.dim
    w_steps = {}
    ks = sorted({-k - 1 for k in a.w.support} | {-k + 1 for k in a.w.support} | {0})
    for k in range(min(ks) - 1, max(ks) + 1):
        w_steps[k] = annihilator(a.w.at(-k - 1))
    f_steps = {}
    ps = {1 - p for p, _ in a.f.jumps} | {1 - min(p for p, _ in a.f.jumps) + 1}
    for p in sorted(ps):
        f_steps[p] = annihilator(a.f.at(1 - p))
    return Instance(
        f"dual({a.name})",
        DecFiltration(n, f_steps),
        IncFiltration(n, w_steps),
        -a.n_op.transpose(),
        None,
    )


# ---------------------------------------------------------------------------
# twisting split instances into non-split ones


def commutant_lambda(inst: Instance) -> Subspace:
    """Strictly-negative-block endomorphisms commuting with the nilpotent operator."""
    lam = lambda_space(inst.f, inst.w)
    n = inst.dim
    ad_n = endo_op_matrix(lambda x: commutator(inst.n_op, x), n, EXACT)
    return lam & nullspace(ad_n)


def real_basis(space: Subspace):
    """Conjugation-fixed vectors spanning the real points of a conjugation-stable space."""
    n = space.ambient_dim
    cand = []
    for v in space.basis:
        cand.append(tuple(x + x.conjugate() for x in v))
        cand.append(tuple((x - x.conjugate()) * QI(0, -1) for x in v))
    reals = Subspace(n, cand, EXACT)
    return [v for v in reals.basis]


def twist(inst: Instance, rng: random.Random) -> Instance | None:
    """Replace F by e^{iδ}F for a random real δ in the strictly-negative block
    commuting with N; returns None when no such direction exists."""
    basis = real_basis(commutant_lambda(inst))
    if not basis:
        return None
    n = inst.dim
    acc = [QI(0)] * (n * n)
    while all(x.is_zero() for x in acc):
        for v in basis:
            c = QI(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
            acc = [a + c * x for a, x in zip(acc, v)]
    delta = Matrix.unflatten(acc, n, EXACT)
    g = nilpotent_exp(delta.scale(QI(0, 1)))
    return Instance(f"twist({inst.name})", inst.f.apply(g), inst.w, inst.n_op, inst.pol)


# ---------------------------------------------------------------------------
# random generators


def random_invertible(rng: random.Random, n: int, span: int = 2) -> Matrix:
    """Product of integer shears and sign flips: determinant ±1, so the
    inverse is integral and conjugated operators keep small exact entries."""
    rows = [[QI(1) if i == j else QI(0) for j in range(n)] for i in range(n)]
    if n == 1:
        rows[0][0] = QI(rng.choice((-1, 1)))
        return Matrix(rows, EXACT)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        c = QI(rng.randint(-span, span))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    for i in range(n):
        if rng.random() < 0.25:
            rows[i] = [-a for a in rows[i]]
    rng.shuffle(rows)
    return Matrix(rows, EXACT)


def random_nilpotent(rng: random.Random, n: int) -> Matrix:
    """Random similarity transform of a random Jordan profile."""
    blocks = []
    left = n
    while left > 0:
        b = rng.randint(1, left)
        blocks.append(b)
        left -= b
    rows = [[QI(0)] * n for _ in range(n)]
    at = 0
    for b in blocks:
        for i in range(b - 1):
            rows[at + i + 1][at + i] = QI(1)
        at += b
    g = random_invertible(rng, n)
    return g * Matrix(rows, EXACT) * g.inverse()


def sl2_irrep(d: int) -> Sl2Triple:
    """Irreducible d-dimensional representation in the standard weight basis."""
    n_minus = Matrix(
        [[QI(1) if j == i - 1 else QI(0) for j in range(d)] for i in range(d)], EXACT
    )
    y = Matrix(
        [[QI(d - 1 - 2 * i) if i == j else QI(0) for j in range(d)] for i in range(d)], EXACT
    )
    n_plus = Matrix(
        [[QI(j * (d - j)) if j == i + 1 else QI(0) for j in range(d)] for i in range(d)],
        EXACT,
    )
    return Sl2Triple(n_minus, y, n_plus)


def _block_diag(ms) -> Matrix:
    n = sum(m.nrows for m in ms)
    rows = [[QI(0)] * n for _ in range(n)]
    at = 0
    for m in ms:
        for i in range(m.nrows):
            for j in range(m.ncols):
                rows[at + i][at + j] = m.rows[i][j]
        at += m.nrows
    return Matrix(rows, EXACT)


def random_sl2(rng: random.Random, max_dim: int = 8) -> Sl2Triple:
    """Random sum of irreducibles, conjugated by a random rational basis change."""
    dims = []
    left = rng.randint(2, max_dim)
    while left > 0:
        d = rng.randint(1, left)
        dims.append(d)
        left -= d
    parts = [sl2_irrep(d) for d in dims]
    g = random_invertible(rng, sum(dims))
    gi = g.inverse()
    return Sl2Triple(
        g * _block_diag([p.n_minus for p in parts]) * gi,
        g * _block_diag([p.y for p in parts]) * gi,
        g * _block_diag([p.n_plus for p in parts]) * gi,
    )


def w_lowering_space(w: IncFiltration) -> Subspace:
    """Endomorphisms mapping every W_k into W_{k-1}, flattened row-major."""
    field = w.field
    n = w.ambient_dim
    rows = []
    for k, s in w.jumps:
        res = w.at(k - 1).residual_matrix()
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
    if not rows:
        return Subspace.full(n * n, field)
    return nullspace(Matrix(rows, field))


def random_grading(w: IncFiltration, rel_y: Matrix, rng: random.Random) -> Matrix:
    """A random grading of W commuting with rel_y: conjugate a reference
    grading by exp of a strictly-lowering direction in the commutant."""
    from .weights import _initial_grading

    n = w.ambient_dim
    y0 = _initial_grading(rel_y, w)
    space = w_lowering_space(w) & nullspace(
        endo_op_matrix(lambda x: commutator(rel_y, x), n, EXACT)
    )
    basis = real_basis(space)
    acc = [QI(0)] * (n * n)
    for v in basis:
        c = QI(Fraction(rng.randint(-2, 2), rng.randint(1, 2)))
        acc = [a + c * x for a, x in zip(acc, v)]
    x = Matrix.unflatten(acc, n, EXACT)
    g = nilpotent_exp(x)
    return g * y0 * g.inverse()


# ---------------------------------------------------------------------------
# corpora


def mhs_corpus(seed: int = 7, count: int = 100, max_dim: int = 8):
    """Filtration pairs built from the blocks via sum/tensor/dual, with twists."""
    rng = random.Random(seed)
    lam_pool = [QI(0), QI(1), QI(Fraction(1, 2), 1), QI(-2, Fraction(1, 3)), QI(0, 1)]
    out = []
    while len(out) < count:
        roll = rng.random()
        base = rng.choice(
            [
                lambda: ladder(2, rng.choice(lam_pool)),
                lambda: ladder(3),
                lambda: ladder(rng.randint(2, 4)),
                lambda: tate(rng.randint(-2, 2)),
                lambda: elliptic(QI(rng.randint(-1, 1), rng.randint(1, 2))),
            ]
        )()
        inst = base
        if roll < 0.35:
            other = rng.choice([tate(rng.randint(-1, 1)), ladder(2), elliptic()])
            if inst.dim * other.dim <= max_dim:
                inst = tensor(inst, other)
        elif roll < 0.6:
            other = rng.choice([ladder(2, rng.choice(lam_pool)), elliptic(), tate(0)])
            if inst.dim + other.dim <= max_dim:
                inst = direct_sum(inst, other)
        elif roll < 0.75:
            inst = dual(inst)
        if rng.random() < 0.4:
            twisted = twist(inst, rng)
            if twisted is not None:
                inst = twisted
        out.append(inst)
    return out


def admissible_corpus(seed: int = 11, count: int = 30):
    """Polarized admissible triples, a mix of split and twisted instances."""
    rng = random.Random(seed)
    out = []
    builders = [
        lambda: ladder(2, QI(rng.randint(-2, 2))),
        lambda: ladder(3),
        lambda: ladder(4),
        lambda: tensor(ladder(2), tate(rng.randint(0, 1))),
        lambda: tensor(ladder(2), ladder(2)),
        lambda: direct_sum(ladder(2), ladder(3)),
        lambda: tensor(ladder(2), elliptic()),
    ]
    while len(out) < count:
        inst = rng.choice(builders)()
        if rng.random() < 0.5:
            twisted = twist(inst, rng)
            if twisted is not None:
                inst = twisted
        out.append(inst)
    return out


def nonsplit_corpus(seed: int = 13, count: int = 20):
    """Twisted (hence non-split) admissible instances."""
    rng = random.Random(seed)
    out = []
    builders = [
        lambda: ladder(2),
        lambda: ladder(3),
        lambda: ladder(4),
        lambda: tensor(ladder(2), ladder(2)),
        lambda: direct_sum(ladder(2), ladder(2)),
    ]
    while len(out) < count:
        inst = twist(rng.choice(builders)(), rng)
        if inst is None:
            continue
        from .mhs import is_split_real

        if is_split_real(inst.f, inst.w):
            continue
        out.append(inst)
    return out
