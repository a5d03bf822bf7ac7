import random
from fractions import Fraction

import pytest

from hodgekit.filtrations import DecFiltration, IncFiltration
from hodgekit.linalg import Matrix, Subspace, commutator, nilpotent_exp
from hodgekit.mhs import (
    Bigrading,
    GroupStratum,
    HodgeNumberMismatch,
    NotGradedPolarized,
    NotMHS,
    PolarizationSystem,
    Stratum,
    chart_complement,
    classify_membership,
    delta_split,
    deligne_bigrading,
    endo_norm_sq,
    grading_of,
    group_membership,
    is_split_real,
    isometry_algebra,
    lambda_space,
    lie_bigrading,
    metric_grading,
    mixed_hodge_metric,
)
from hodgekit.scalars import EXACT, QI


def qv(*xs):
    return tuple(QI(x) if not isinstance(x, QI) else x for x in xs)


def qm(rows):
    return Matrix([[QI(x) if not isinstance(x, QI) else x for x in r] for r in rows], EXACT)


def ht_pair(lam):
    """Two-step structure with weights 0 and 2 and a one-parameter Hodge flag."""
    w = IncFiltration(2, {0: Subspace.span([qv(1, 0)]), 2: Subspace.full(2)})
    f = DecFiltration(2, {1: Subspace.span([qv(lam, 1)])})
    return f, w


def ht_polarization():
    return PolarizationSystem(
        {(0, 0): 1, (1, 1): 1},
        {0: [qv(1, 0)], 2: [qv(0, 1)]},
        {0: qm([[1]]), 2: qm([[1]])},
    )


class TestDeligneBigrading:
    def test_two_step_flag(self):
        lam = QI(Fraction(1, 2), 3)
        f, w = ht_pair(lam)
        big = deligne_bigrading(f, w)
        assert big.keys() == [(0, 0), (1, 1)]
        assert big.pieces[(0, 0)] == Subspace.span([qv(1, 0)])
        assert big.pieces[(1, 1)] == Subspace.span([qv(lam, 1)])

    def test_pure_weight_is_hodge_decomposition(self):
        # pure weight 1: pieces are F^p ∩ conj(F^q)
        w = IncFiltration(2, {1: Subspace.full(2)})
        v = qv(1, QI(0, 1))
        f = DecFiltration(2, {1: Subspace.span([v])})
        big = deligne_bigrading(f, w)
        assert big.pieces[(1, 0)] == (f.at(1) & f.conjugate().at(0))
        assert big.pieces[(0, 1)] == f.at(1).conjugate()

    def test_rejects_non_mhs(self):
        # weight 0 line forced into position incompatible with a real structure:
        # F^1 ⊆ W_0 with W_0 one-dimensional leaves no room for conj(F^1)
        w = IncFiltration(2, {0: Subspace.span([qv(1, QI(0, 1))]), 2: Subspace.full(2)})
        f = DecFiltration(2, {1: Subspace.span([qv(1, QI(0, 1))])})
        with pytest.raises(NotMHS):
            deligne_bigrading(f, w)

    def test_random_split_instances_recovered(self):
        rng = random.Random(23)
        for _ in range(8):
            big, f, w = random_split_instance(rng)
            got = deligne_bigrading(f, w)
            assert got.keys() == sorted(big.pieces)
            for key in big.pieces:
                assert got.pieces[key] == big.pieces[key]
            assert got.is_split_real()

    def test_twisted_instances_still_decompose(self):
        rng = random.Random(29)
        for _ in range(5):
            _, f, w = random_split_instance(rng)
            y = grading_of(f, w)
            d = random_lowering_real(rng, f, w)
            g = nilpotent_exp(d.scale(QI(0, 1)))
            f2 = f.apply(g)
            y2 = grading_of(f2, w)
            assert y2 == g * y * g.inverse()


class TestSplitAndGrading:
    def test_split_iff_real_parameter(self):
        f, w = ht_pair(QI(Fraction(3, 4)))
        assert is_split_real(f, w)
        f, w = ht_pair(QI(0, 1))
        assert not is_split_real(f, w)

    def test_grading_eigenvalues(self):
        lam = QI(2, 5)
        f, w = ht_pair(lam)
        y = grading_of(f, w)
        assert y.apply(qv(1, 0)) == qv(0, 0)
        assert y.apply(qv(lam, 1)) == tuple(QI(2) * x for x in qv(lam, 1))
        assert w.graded_by(y)


class TestMetric:
    def test_two_step_frame_is_unitary(self):
        lam = QI(1, -2)
        f, w = ht_pair(lam)
        g = mixed_hodge_metric(f, w, ht_polarization(), basis=[qv(1, 0), qv(lam, 1)])
        assert g == Matrix.identity(2)

    def test_standard_basis_gram(self):
        lam = QI(0, 1)
        f, w = ht_pair(lam)
        g = mixed_hodge_metric(f, w, ht_polarization())
        # e2 = (v2) - lam (v1): h(e2,e2) = 1 + |lam|^2
        assert g.rows[1][1] == QI(2)
        ok_diag = g.rows[0][0]
        assert ok_diag == QI(1)

    def test_weight_one_curve(self):
        w = IncFiltration(2, {1: Subspace.full(2)})
        pol = PolarizationSystem(
            {(1, 0): 1, (0, 1): 1},
            {1: [qv(1, 0), qv(0, 1)]},
            {1: qm([[0, 1], [-1, 0]])},
        )
        tau = QI(0, 1)
        f = DecFiltration(2, {1: Subspace.span([qv(1, tau)])})
        g = mixed_hodge_metric(f, w, pol, basis=[qv(1, tau), qv(1, -tau)])
        # i S(v, conj v) = 2 Im(tau) on the holomorphic line
        assert g.rows[0][0] == QI(2)
        assert g.rows[0][1] == QI(0)
        # lower half plane is rejected
        f_bad = DecFiltration(2, {1: Subspace.span([qv(1, -tau)])})
        with pytest.raises(NotGradedPolarized):
            mixed_hodge_metric(f_bad, w, pol)

    def test_hodge_number_mismatch(self):
        f, w = ht_pair(QI(1))
        pol = PolarizationSystem(
            {(2, 0): 1, (0, 0): 1},
            {0: [qv(1, 0)], 2: [qv(0, 1)]},
            {0: qm([[1]]), 2: qm([[1]])},
        )
        with pytest.raises(HodgeNumberMismatch):
            mixed_hodge_metric(f, w, pol)

    def test_endo_norm_identity_gram(self):
        t = qm([[0, QI(1, 1)], [0, 0]])
        assert endo_norm_sq(t, Matrix.identity(2)) == QI(2)

    def test_metric_grading_matches_bigrading(self):
        lam = QI(2, -1)
        f, w = ht_pair(lam)
        g = mixed_hodge_metric(f, w, ht_polarization())
        yh = metric_grading(w, g)
        assert yh == grading_of(f, w)
        assert metric_grading(w, g.scale(QI(2))) == yh


class TestMembership:
    def test_two_step_always_in_m(self):
        for lam in [QI(0), QI(5, 3), QI(0, -7)]:
            f, w = ht_pair(lam)
            assert classify_membership(f, w, ht_polarization()) is Stratum.IN_M

    def test_wrong_graded_dims(self):
        w = IncFiltration(2, {0: Subspace.span([qv(1, 0)]), 2: Subspace.full(2)})
        f = DecFiltration(2, {1: Subspace.full(2), 2: Subspace.zero(2)})
        assert classify_membership(f, w, ht_polarization()) is Stratum.NOT_IN_FLAG_CHECK

    def test_isotropy_failure(self):
        w = IncFiltration(2, {2: Subspace.full(2)})
        pol = PolarizationSystem(
            {(2, 0): 1, (0, 2): 1},
            {2: [qv(1, 0), qv(0, 1)]},
            {2: qm([[1, 0], [0, 1]])},
        )
        f = DecFiltration(2, {1: Subspace.span([qv(1, 0)]), 3: Subspace.zero(2)})
        assert classify_membership(f, w, pol) is Stratum.IN_CHECK_FW

    def test_isotropic_but_indefinite(self):
        w = IncFiltration(2, {2: Subspace.full(2)})
        pol = PolarizationSystem(
            {(2, 0): 1, (0, 2): 1},
            {2: [qv(1, 0), qv(0, 1)]},
            {2: qm([[1, 0], [0, 1]])},
        )
        f = DecFiltration(2, {1: Subspace.span([qv(1, QI(0, 1))]), 3: Subspace.zero(2)})
        assert classify_membership(f, w, pol) is Stratum.IN_CHECK_M


class TestGroupMembership:
    def test_identity(self):
        _, w = ht_pair(QI(0))
        assert group_membership(Matrix.identity(2), w, ht_polarization()) is GroupStratum.IN_GR

    def test_w_violating(self):
        _, w = ht_pair(QI(0))
        g = qm([[1, 0], [1, 1]])  # e1 -> e1 + e2 leaves W_0
        assert group_membership(g, w, ht_polarization()) is GroupStratum.NOT_IN_GC

    def test_graded_isometry_failure(self):
        _, w = ht_pair(QI(0))
        assert group_membership(qm([[2, 0], [0, 1]]), w, ht_polarization()) is GroupStratum.NOT_IN_GC

    def test_complex_lowering_is_in_g(self):
        # e^{i d} with d strictly lowering acts trivially on the graded pieces
        _, w = ht_pair(QI(0))
        g = qm([[1, QI(0, 1)], [0, 1]])
        assert group_membership(g, w, ht_polarization()) is GroupStratum.IN_G

    def test_real_unipotent_in_gr(self):
        _, w = ht_pair(QI(0))
        g = qm([[1, 3], [0, 1]])
        assert group_membership(g, w, ht_polarization()) is GroupStratum.IN_GR


class TestLieBigrading:
    def test_two_step_isometry_algebra_is_lowering_line(self):
        f, w = ht_pair(QI(1, 1))
        alg = isometry_algebra(w, ht_polarization())
        assert alg.dim == 1
        a = Matrix.unflatten(alg.basis[0], 2)
        # strictly lowering: kills W_0 and maps V into W_0
        assert a.apply(qv(1, 0)) == qv(0, 0)
        assert w.at(0).contains(a.apply(qv(0, 1)))

    def test_two_step_pieces_and_chart_complement(self):
        f, w = ht_pair(QI(1, 1))
        lb = lie_bigrading(f, w, ht_polarization())
        assert lb.keys() == [(-1, -1)]
        q = chart_complement(f, w, ht_polarization())
        assert q.dim == 1

    def test_complement_property_random(self):
        rng = random.Random(31)
        for _ in range(4):
            big, f, w = random_split_instance(rng)
            lb = lie_bigrading(f, w)
            # full endomorphism algebra decomposes completely
            n = f.ambient_dim
            assert lb.total_dim == n * n
            stab = lb.piece_sum(lambda r, s: r >= 0)
            rest = lb.piece_sum(lambda r, s: r < 0)
            assert stab.dim + rest.dim == n * n
            assert (stab & rest).dim == 0
            # stabilizer pieces really do preserve F
            for vec in stab.basis:
                assert f.preserved_by(Matrix.unflatten(vec, n))

    def test_lambda_space_two_step(self):
        f, w = ht_pair(QI(2))
        lam = lambda_space(f, w)
        assert lam.dim == 1
        assert lam.contains(Matrix.unit(2, 0, 1).flatten())


class TestDeltaSplit:
    def test_split_input_gives_zero(self):
        f, w = ht_pair(QI(Fraction(7, 2)))
        d, f_hat = delta_split(f, w)
        assert d.is_zero()
        assert f_hat == f

    def test_two_step_complex_parameter(self):
        a, b = Fraction(2), Fraction(5, 3)
        f, w = ht_pair(QI(a, b))
        d, f_hat = delta_split(f, w)
        assert d == Matrix.unit(2, 0, 1).scale(QI(b))
        expected, _ = ht_pair(QI(a))
        assert f_hat == expected

    def test_random_twisted_instances(self):
        rng = random.Random(37)
        for _ in range(5):
            _, f, w = random_split_instance(rng)
            dmat = random_lowering_real(rng, f, w)
            f2 = f.apply(nilpotent_exp(dmat.scale(QI(0, 1))))
            d, f_hat = delta_split(f2, w)
            assert d.conj() == d
            assert is_split_real(f_hat, w)
            assert f_hat == f2.apply(nilpotent_exp(d.scale(QI(0, -1))))


# ---------------------------------------------------------------------------
# instance generators


def rand_real_vec(rng, n):
    return tuple(QI(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) for _ in range(n))


def rand_cx_vec(rng, n):
    return tuple(
        QI(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        for _ in range(n)
    )


def random_split_instance(rng):
    """4-dim instance with pieces (0,0), (1,1), (1,0), (0,1), split over R."""
    n = 4
    while True:
        v00 = rand_real_vec(rng, n)
        v11 = rand_real_vec(rng, n)
        v10 = rand_cx_vec(rng, n)
        v01 = tuple(x.conjugate() for x in v10)
        if Matrix([v00, v11, v10, v01], EXACT).rank() == n:
            break
    pieces = {
        (0, 0): Subspace.span([v00]),
        (1, 1): Subspace.span([v11]),
        (1, 0): Subspace.span([v10]),
        (0, 1): Subspace.span([v01]),
    }
    big = Bigrading(pieces, n)
    w = IncFiltration(
        n,
        {
            0: pieces[(0, 0)],
            1: pieces[(0, 0)] | pieces[(1, 0)] | pieces[(0, 1)],
            2: Subspace.full(n),
        },
    )
    f = DecFiltration(n, {1: pieces[(1, 1)] | pieces[(1, 0)], 2: Subspace.zero(n)})
    return big, f, w


def random_lowering_real(rng, f, w):
    """A real operator in the strictly-negative endomorphism block of (F, W)."""
    lam = lambda_space(f, w)
    n = f.ambient_dim
    while True:
        coeffs = [QI(rng.randint(-3, 3)) for _ in lam.basis]
        vec = [EXACT.zero] * (n * n)
        for c, b in zip(coeffs, lam.basis):
            vec = [x + c * y for x, y in zip(vec, b)]
        m = Matrix.unflatten(vec, n)
        real_part = (m + m.conj()).scale(QI(Fraction(1, 2)))
        if not real_part.is_zero():
            return real_part
