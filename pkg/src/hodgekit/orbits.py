"""Nilpotent orbits, local charts, and decay-rate scans.

Evaluates orbit filtrations e^{zN}·F, solves the exponential chart through a
base filtration, measures filtration separation by the chart-norm surrogate,
and scans the surrogate against the vertical coordinate to fit exponential
decay rates.  The exact scan path works symbolically so that y-independent
distances come out as exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .filtrations import DecFiltration, IncFiltration, inc_map_convert
from .linalg import (
    Matrix,
    NoSolution,
    NotNilpotent,
    Subspace,
    is_nilpotent,
    nilpotent_exp,
    nilpotent_log,
    nullspace,
    solve,
)
from .mhs import (
    Bigrading,
    PolarizationSystem,
    chart_complement,
    deligne_bigrading,
    endo_bigrading,
    endo_norm_sq,
    isometry_algebra,
    lie_bigrading,
    mixed_hodge_metric,
)
from .scalars import EXACT, QI, FieldOps, qi_to_sympy, symbolic_field


class OrbitError(Exception):
    pass


class OutOfChart(OrbitError):
    """The target filtration is not in the exponential chart of the base."""


class NotRealGrading(OrbitError):
    pass


class NonExactPower(OrbitError):
    pass


# ---------------------------------------------------------------------------
# orbit evaluation


def orbit_eval(f: DecFiltration, n_op: Matrix, z) -> DecFiltration:
    """The filtration e^{zN}·F for a nilpotent N and scalar z."""
    if not is_nilpotent(n_op):
        raise NotNilpotent("orbit evaluation requires a nilpotent operator")
    return f.apply(nilpotent_exp(n_op.scale(z)))


# ---------------------------------------------------------------------------
# chart solve and the distance surrogate


def chart_solve(
    f1: DecFiltration,
    f2: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem | None = None,
    bigrading: Bigrading | None = None,
) -> Matrix:
    """The unique nilpotent u, strictly lowering for the bigrading of f1, with
    e^u·f1 = f2; verified exactly before returning.

    With a polarization system the result is additionally required to lie in
    the chart complement of f1 (membership failure reports OutOfChart).
    """
    field = f1.field
    n = f1.ambient_dim
    big = bigrading if bigrading is not None else deligne_bigrading(f1, w)
    proj = big.projectors()
    a_values = sorted({p for (p, _) in big.pieces})
    # projections onto components of Hodge index >= a
    proj_ge = {}
    for a in a_values:
        acc = Matrix.zero(n, n, field)
        for (p, q), pr in proj.items():
            if p >= a:
                acc = acc + pr
        proj_ge[a] = acc
    cols_in, cols_out = [], []
    for a in a_values:
        if f2.at(a).dim != f1.at(a).dim:
            raise OutOfChart(f"flag dimensions differ at Hodge index {a}")
        basis2 = Matrix.from_cols([list(v) for v in f2.at(a).basis], field)
        composed = proj_ge[a] * basis2
        if nullspace(composed).dim > 0:
            raise OutOfChart(f"chart projection is degenerate at Hodge index {a}")
        for (p, q), piece in big.pieces.items():
            if p != a:
                continue
            for v in piece.basis:
                try:
                    c = solve(composed, v)
                except NoSolution:
                    raise OutOfChart(f"no chart preimage for a vector of Hodge index {a}")
                cols_in.append(list(v))
                cols_out.append(basis2.apply(c))
    t = Matrix.from_cols(cols_out, field) * Matrix.from_cols(cols_in, field).inverse()
    u = nilpotent_log(t)
    if f1.apply(nilpotent_exp(u)) != f2:
        raise OutOfChart("chart transport does not reproduce the target filtration")
    if pol is not None:
        q_f = chart_complement(f1, w, pol, bigrading=big)
        if not u.is_zero() and not q_f.contains(u.flatten()):
            raise OutOfChart("chart solution lies outside the isometry complement")
    return u


@dataclass
class Distance:
    """Chart-norm separation of two filtrations: exact square plus float value."""

    sq: object  # real scalar of the working field
    value: float

    def __float__(self):
        return self.value


def dist_surrogate(
    f1: DecFiltration,
    f2: DecFiltration,
    w: IncFiltration,
    pol: PolarizationSystem,
) -> Distance:
    """Norm of the chart solution at f1; a computable surrogate for the
    distance between nearby filtrations (not the Riemannian distance)."""
    field = f1.field
    big = deligne_bigrading(f1, w)
    u = chart_solve(f1, f2, w, pol, bigrading=big)
    gram = mixed_hodge_metric(f1, w, pol, bigrading=big)
    sq = endo_norm_sq(u, gram)
    try:
        value = math.sqrt(max(field.to_complex(sq).real, 0.0))
    except TypeError:
        # symbolic squares with free parameters have no single float value
        value = float("nan")
    return Distance(sq, value)


# ---------------------------------------------------------------------------
# scaling operators


def scaling_operator(y_op: Matrix, alpha: Fraction, t: Fraction) -> Matrix:
    """The operator acting as y^{α k} on the k-eigenspace of the grading, y = t².

    Exactness requires every exponent 2αk to be an integer.
    """
    from .linalg import eig_projectors, grading_eigenvalue_candidates

    field = y_op.field
    if y_op.conj() != y_op:
        raise NotRealGrading("scaling requires a conjugation-fixed grading")
    alpha = Fraction(alpha)
    t = Fraction(t)
    if t <= 0:
        raise NonExactPower("scale parameter must be a positive rational")
    eigs = grading_eigenvalue_candidates(y_op)
    projs = eig_projectors(y_op, eigs)
    n = y_op.nrows
    out = Matrix.zero(n, n, field)
    for k in eigs:
        e = 2 * alpha * k
        if e.denominator != 1:
            raise NonExactPower(f"exponent 2·{alpha}·{k} is not an integer")
        factor = t ** int(e)
        out = out + projs[k].scale(field.from_rational(factor))
    return out


# ---------------------------------------------------------------------------
# scan scenarios


@dataclass
class ScanRow:
    y: float
    s_abs: float
    dist: float
    log_dist: float
    dist_sq_exact: Fraction | None = None
    skipped: bool = False
    reason: str | None = None


@dataclass
class ScanResult:
    rows: list[ScanRow]
    slope: float
    log_coeff: float
    intercept: float


@dataclass
class OrbitScenario:
    """A degeneration scan setup: base structure, perturbation, and samples.

    ``gamma`` lists the coefficient operators of the perturbation in powers
    s, s², …; the perturbation vanishes at s = 0.  Samples are rational:
    either y-values directly or |s| values for the exact path.  With
    ``compare_split`` the scan measures against the orbit of the real-split
    companion filtration instead of a perturbed orbit.
    """

    name: str
    f: DecFiltration
    w: IncFiltration
    pol: PolarizationSystem
    n_op: Matrix
    gamma: list[Matrix] = dc_field(default_factory=list)
    samples: list[Fraction] = dc_field(default_factory=list)
    sample_kind: str = "y"  # "y" | "s_abs"
    compare_split: bool = False

    def validate(self) -> None:
        q_f = chart_complement(self.f, self.w, self.pol)
        for i, g in enumerate(self.gamma):
            if not g.is_zero() and not q_f.contains(g.flatten()):
                raise OrbitError(f"perturbation coefficient {i} lies outside the chart complement")


def _to_symbolic(sc: OrbitScenario):
    field = symbolic_field()
    conv = qi_to_sympy
    f = sc.f.map_convert(field, conv)
    w = inc_map_convert(sc.w, field, conv)
    pol = PolarizationSystem(
        sc.pol.hodge_numbers,
        {k: [[conv(x) for x in v] for v in vs] for k, vs in sc.pol.graded_lifts.items()},
        {k: m.map_convert(field, conv) for k, m in sc.pol.forms.items()},
        field,
    )
    n_op = sc.n_op.map_convert(field, conv)
    gamma = [g.map_convert(field, conv) for g in sc.gamma]
    return field, f, w, pol, n_op, gamma


def _split_companion(sc: OrbitScenario) -> DecFiltration:
    from .mhs import delta_split

    _, f_hat = delta_split(sc.f, sc.w)
    return f_hat


def decay_scan(sc: OrbitScenario, tolerance: float = 1e-12, exact: bool | None = None) -> ScanResult:
    """Sample the chart-norm surrogate along the imaginary direction and fit
    log d = a·y + b·log y + c on the tail half of the samples.

    The exact path (rational |s| samples) evaluates one symbolic distance
    expression and substitutes each sample, reporting exact rational squared
    distances whenever the expression is independent of the vertical
    coordinate.
    """
    from .weights import admissible_pipeline

    admissible_pipeline(sc.f, sc.w, sc.n_op)
    sc.validate()
    if exact is None:
        exact = sc.sample_kind == "s_abs"
    rows = (
        _scan_exact(sc) if exact else _scan_float(sc, tolerance)
    )
    rows.sort(key=lambda r: r.y)
    slope, log_coeff, intercept = _fit(rows)
    return ScanResult(rows, slope, log_coeff, intercept)


def _scan_float(sc: OrbitScenario, tolerance: float) -> list[ScanRow]:
    """General scan path: transcendental quantities are rationalized to a
    denominator bound set by the tolerance, and each sample is evaluated in
    exact arithmetic (robust against the ill-conditioned pivots that plague
    floating RREF on nearly parallel flags)."""
    bound = max(10**6, int(round(1.0 / max(tolerance, 1e-15))))
    target_base = _split_companion(sc) if sc.compare_split else None
    n = sc.f.ambient_dim
    rows = []
    for sample in sc.samples:
        if sc.sample_kind == "y":
            y_exact = Fraction(sample)
            y = float(sample)
            s = math.exp(-2 * math.pi * y)
            # keep the rationalization fine enough to resolve s itself
            s_exact = Fraction(s).limit_denominator(max(bound, int(16.0 / s)))
        else:
            s_exact = Fraction(sample)
            s = float(sample)
            y = -math.log(s) / (2 * math.pi)
            y_exact = Fraction(y).limit_denominator(bound)
        try:
            ez = nilpotent_exp(sc.n_op.scale(QI(0, y_exact)))
            f_nilp = sc.f.apply(ez)
            if target_base is not None:
                f_here = target_base.apply(ez)
            else:
                g = Matrix.zero(n, n, EXACT)
                for m, coeff in enumerate(sc.gamma, start=1):
                    g = g + coeff.scale(QI(s_exact**m))
                f_here = sc.f.apply(nilpotent_exp(g)).apply(ez)
            d = dist_surrogate(f_nilp, f_here, sc.w, sc.pol)
            dist = d.value
            rows.append(
                ScanRow(y, s, dist, math.log(dist) if dist > 0 else float("-inf"))
            )
        except (OutOfChart, NoSolution) as e:
            rows.append(ScanRow(y, s, float("nan"), float("nan"), skipped=True, reason=str(e)))
    return rows


def _scan_exact(sc: OrbitScenario) -> list[ScanRow]:
    import sympy

    field, f, w, pol, n_op, gamma = _to_symbolic(sc)
    yy = sympy.Symbol("y", positive=True)
    ss = sympy.Symbol("s", positive=True)
    ez = nilpotent_exp(n_op.scale(sympy.I * yy))
    f_nilp = f.apply(ez)
    if sc.compare_split:
        f_here = _split_companion(sc).map_convert(field, qi_to_sympy).apply(ez)
    else:
        g = Matrix.zero(f.ambient_dim, f.ambient_dim, field)
        for m, coeff in enumerate(gamma, start=1):
            g = g + coeff.scale(ss**m)
        f_here = f.apply(nilpotent_exp(g)).apply(ez)
    d = dist_surrogate(f_nilp, f_here, w, pol)
    expr = sympy.simplify(sympy.expand(d.sq))
    rows = []
    for sample in sc.samples:
        if sc.sample_kind == "s_abs":
            s_exact = Fraction(sample)
            y_exact = -sympy.log(sympy.Rational(s_exact.numerator, s_exact.denominator)) / (
                2 * sympy.pi
            )
            y = float(y_exact)
            s = float(s_exact)
        else:
            y_exact = sympy.Rational(Fraction(sample).numerator, Fraction(sample).denominator)
            y = float(sample)
            s_exact = None
            s = math.exp(-2 * math.pi * y)
        val = sympy.simplify(
            expr.subs(
                {
                    ss: sympy.Rational(s_exact.numerator, s_exact.denominator)
                    if s_exact is not None
                    else sympy.Float(s),
                    yy: y_exact,
                }
            )
        )
        exact_sq = None
        if val.is_rational:
            exact_sq = Fraction(int(sympy.numer(val)), int(sympy.denom(val)))
            dist = math.sqrt(float(exact_sq))
        else:
            dist = math.sqrt(max(float(val), 0.0))
        rows.append(
            ScanRow(y, s, dist, math.log(dist) if dist > 0 else float("-inf"), exact_sq)
        )
    return rows


def _fit(rows: Sequence[ScanRow]) -> tuple[float, float, float]:
    import numpy as np

    usable = [r for r in rows if not r.skipped and math.isfinite(r.log_dist)]
    if len(usable) < 3:
        return float("nan"), float("nan"), float("nan")
    tail = usable[len(usable) // 2 :]
    if len(tail) < 3:
        tail = usable
    a = np.array([[r.y, math.log(r.y), 1.0] for r in tail])
    b = np.array([r.log_dist for r in tail])
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])


# ---------------------------------------------------------------------------
# polynomial matrices and horizontality


class MatPoly:
    """Matrix with polynomial entries, stored as coefficient matrices by power."""

    def __init__(self, coeffs: Sequence[Matrix], field: FieldOps = EXACT):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs
        self.field = field
        self.n = coeffs[0].nrows

    @staticmethod
    def constant(m: Matrix) -> "MatPoly":
        return MatPoly([m], m.field)

    def __add__(self, other: "MatPoly") -> "MatPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        zero = Matrix.zero(self.n, self.n, self.field)
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else zero
            b = other.coeffs[i] if i < len(other.coeffs) else zero
            out.append(a + b)
        return MatPoly(out, self.field)

    def __mul__(self, other: "MatPoly") -> "MatPoly":
        zero = Matrix.zero(self.n, self.n, self.field)
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return MatPoly(out, self.field)

    def scale(self, s) -> "MatPoly":
        return MatPoly([c.scale(s) for c in self.coeffs], self.field)

    def derivative(self) -> "MatPoly":
        if len(self.coeffs) == 1:
            return MatPoly([Matrix.zero(self.n, self.n, self.field)], self.field)
        return MatPoly(
            [c.scale(self.field.from_int(k)) for k, c in enumerate(self.coeffs) if k >= 1],
            self.field,
        )

    def eval(self, s) -> Matrix:
        out = Matrix.zero(self.n, self.n, self.field)
        power = self.field.one
        for c in self.coeffs:
            out = out + c.scale(power)
            power = power * s
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def exp_nilpotent(self) -> "MatPoly":
        """Exponential of a pointwise-nilpotent polynomial matrix (finite series)."""
        n = self.n
        out = MatPoly.constant(Matrix.identity(n, self.field))
        term = MatPoly.constant(Matrix.identity(n, self.field))
        for k in range(1, n + 1):
            term = term * self
            if term.is_zero():
                break
            out = out + term.scale(self.field.from_rational(Fraction(1, math.factorial(k))))
        return out


def gamma_poly(sc: OrbitScenario) -> MatPoly:
    n = sc.f.ambient_dim
    coeffs = [Matrix.zero(n, n, EXACT)] + list(sc.gamma)
    return MatPoly(coeffs, EXACT)


def horizontality_check(sc: OrbitScenario) -> tuple[bool, str | None]:
    """Whether the perturbation is horizontal: the linearization sits in the
    Hodge-index -1 row of the endomorphism bigrading, and the flag curves move
    each Hodge step into the next lower one at every exact sample."""
    big = deligne_bigrading(sc.f, sc.w)
    lb = endo_bigrading(big)
    if sc.gamma:
        lin = sc.gamma[0]
        for (r, s), piece in lb.pieces.items():
            if r == -1:
                continue
            # component in this cell must vanish
            comp = _bigrading_component(lin, big, r, s)
            if not comp.is_zero():
                return False, f"linearization has a component in bidegree ({r},{s})"
    e = gamma_poly(sc).exp_nilpotent()
    e_prime = e.derivative()
    samples = [Fraction(0)] + [Fraction(x) for x in sc.samples if sc.sample_kind == "s_abs"]
    for s0 in samples:
        s_val = EXACT.from_rational(s0)
        a = e.eval(s_val)
        d = a.inverse() * e_prime.eval(s_val)
        for p, _ in sc.f.jumps:
            moved = sc.f.at(p).image(d)
            if not sc.f.at(p - 1).contains_subspace(moved):
                return False, f"flag curve at sample {s0} leaves Hodge step {p - 1}"
    return True, None


def _bigrading_component(a: Matrix, big: Bigrading, r: int, s: int) -> Matrix:
    proj = big.projectors()
    n = big.ambient_dim
    out = Matrix.zero(n, n, big.field)
    for (p, q), pr in proj.items():
        target = proj.get((p + r, q + s))
        if target is not None:
            out = out + target * a * pr
    return out


def connection_shape(sc: OrbitScenario, p: int, q: int) -> dict:
    """Bigrading shape of the derivative of a section of one Hodge piece.

    Reports, for each basis vector of the (p,q) piece, whether the holomorphic
    derivative stays within the piece and the column below-left of it, and
    whether the conjugate part stays within the allowed mirror cells.
    """
    ok_h, witness = horizontality_check(sc)
    if not ok_h:
        raise OrbitError(f"scenario is not horizontal: {witness}")
    big = deligne_bigrading(sc.f, sc.w)
    n = big.ambient_dim
    field = big.field
    zero = Matrix.zero(n, n, field)
    lin = sc.gamma[0] if sc.gamma else zero
    # projection of the conjugated linearization onto the flag stabilizer
    alg = isometry_algebra(sc.w, sc.pol)
    lb = lie_bigrading(sc.f, sc.w, sc.pol, bigrading=big)
    stab = lb.piece_sum(lambda r, s: r >= 0)
    q_f = lb.piece_sum(lambda r, s: r < 0)
    lin_bar = lin.conj()
    phi = zero
    if alg.contains(lin_bar.flatten()):
        cols = [list(v) for v in stab.basis] + [list(v) for v in q_f.basis]
        if cols:
            mat = Matrix.from_cols(cols, field)
            c = solve(mat, lin_bar.flatten())
            acc = [field.zero] * (n * n)
            for coeff, v in zip(c[: stab.dim], stab.basis):
                acc = [x + coeff * yv for x, yv in zip(acc, v)]
            phi = -Matrix.unflatten(acc, n, field)
    piece = big.pieces.get((p, q))
    if piece is None:
        raise OrbitError(f"no ({p},{q}) piece in the bigrading")
    report = {"holomorphic_ok": True, "conjugate_ok": True, "violations": []}
    keys = set(big.pieces)
    allowed_h = {(p, q)} | {k for k in keys if k[0] == p - 1 and k[1] >= q - 1}
    allowed_c = {(p + 1, q - 1)} | {k for k in keys if k[0] == p and k[1] <= q}
    for v in piece.basis:
        vh = lin.apply(v)
        vc = phi.apply(v)
        for key in keys:
            comp_h = big.projectors()[key].apply(vh)
            comp_c = big.projectors()[key].apply(vc)
            if any(not field.is_zero(x) for x in comp_h) and key not in allowed_h:
                report["holomorphic_ok"] = False
                report["violations"].append(("holomorphic", key))
            if any(not field.is_zero(x) for x in comp_c) and key not in allowed_c:
                report["conjugate_ok"] = False
                report["violations"].append(("conjugate", key))
    return report
