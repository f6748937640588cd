"""
Tests for the four cohomologies, their harmonic spaces and the table checks
"""

import pytest
import random
from fractions import Fraction
from math import comb
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "python"))

from cscoh import catalog
from cscoh.cohomology import (
    ALL_FLAVORS,
    Complexes,
    Flavor,
    aeppli,
    bott_chern,
    compute_table,
    dbar_lambda_cohomology,
    dolbeault,
    quotient_spaces,
)
from cscoh.exterior import Bidegree, all_bidegrees, to_vector
from cscoh.expressions import parse_form
from cscoh.linalg import ExactMatrix, span
from cscoh.model import change_frame, instantiate, parse_spec
from cscoh.operators import build_laplacians, build_metric, build_sl2
from cscoh.scalars import GaussianRational, ONE, ZERO


def table_of(inst):
    s = build_sl2(inst)
    return compute_table(inst, s, build_laplacians(inst, s, build_metric(inst)))


def span_of(inst, bd, texts):
    return span([to_vector(parse_form(t, inst.names), bd) for t in texts], len(to_vector(parse_form(texts[0], inst.names), bd)))


def nilpotent_spec(rng: random.Random) -> str:
    """Random two-step structure on three generators with a closed real omega

    dbar x2 = a x1^y1, dbar x3 = b x1^y1 + c x1^y2 + d x2^y1, dbar y3 = f y1^y2 and
    del = conj dbar conj satisfy every square-zero identity for any real constants;
    omega = i (p x1^y3 + p x3^y1 + r x2^y2) is closed once r a = p (f + c).
    """
    def nonzero():
        while True:
            value = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
            if value:
                return value

    a, b, c, d, p = (nonzero() for _ in range(5))
    f = nonzero()
    while f + c == 0:
        f = nonzero()
    r = p * (f + c) / a
    return "\n".join([
        "[manifold]",
        "name = nilpotent",
        "n = 3",
        "generators_10 = x1, x2, x3",
        "generators_01 = y1, y2, y3",
        "",
        "[dbar]",
        f"x2 = ({a})*x1^y1",
        f"x3 = ({b})*x1^y1 + ({c})*x1^y2 + ({d})*x2^y1",
        f"y3 = ({f})*y1^y2",
        "",
        "[del]",
        f"y2 = ({-a})*x1^y1",
        f"y3 = ({-b})*x1^y1 + ({-c})*x2^y1 + ({-d})*x1^y2",
        f"x3 = ({f})*x1^x2",
        "",
        "[omega]",
        f"({p}*i)*x1^y3 + ({p}*i)*x3^y1 + ({r}*i)*x2^y2",
        "",
        "[conjugation]",
        "y1 = x1",
        "y2 = x2",
        "y3 = x3",
    ]) + "\n"


@pytest.fixture(scope="module")
def kt():
    inst = catalog.get("kodaira-thurston")
    return inst, table_of(inst)


@pytest.fixture(scope="module")
def nakamura_zero():
    inst = catalog.get("nakamura")
    return inst, table_of(inst)


class TestFlavor:
    """Test flavor names"""

    def test_parse(self):
        """Test single flavors and all"""
        assert Flavor.parse("bc") == [Flavor.BC]
        assert Flavor.parse("dbar-lambda") == [Flavor.DBAR_LAMBDA]
        assert Flavor.parse("all") == list(ALL_FLAVORS)
        assert Flavor.parse("") == list(ALL_FLAVORS)

    def test_unknown(self):
        """Test unknown names list the choices"""
        with pytest.raises(ValueError) as info:
            Flavor.parse("de-rham")
        assert "aeppli" in str(info.value)


class TestKodairaThurston:
    """Test the Kodaira-Thurston tables"""

    def test_bott_chern_dims(self, kt):
        """Test h_BC over the bidegree order"""
        _, table = kt
        assert table.dims(Flavor.BC) == [1, 1, 2, 1, 3, 1, 1, 2, 1]

    def test_bott_chern_harmonic_11(self, kt):
        """Test the (1,1) BC harmonic forms"""
        inst, table = kt
        bd = Bidegree(1, 1)
        expected = span_of(inst, bd, ["phi1^phibar1", "phi1^phibar2", "phi2^phibar1"])
        assert table.cell(Flavor.BC, bd).harmonic == expected

    def test_dolbeault_anchors(self, kt):
        """Test H^{1,0} = <phi1> and H^{1,1} harmonic = <phi1^phibar2, phi2^phibar1>"""
        inst, table = kt
        cell = table.cell(Flavor.DOLBEAULT, Bidegree(1, 0))
        assert cell.dim == 1
        assert [inst.format(u) for u in cell.representatives] == ["phi1"]
        bd = Bidegree(1, 1)
        assert table.dim(Flavor.DOLBEAULT, bd) == 2
        expected = span_of(inst, bd, ["phi1^phibar2", "phi2^phibar1"])
        assert table.cell(Flavor.DOLBEAULT, bd).harmonic == expected

    def test_dbar_lambda_10(self, kt):
        """Test h_dbar_lambda^{1,0} = 2"""
        _, table = kt
        assert table.dim(Flavor.DBAR_LAMBDA, Bidegree(1, 0)) == 2

    def test_mirror_symmetry(self, kt):
        """Test h_dbar_lambda^{n-q,n-p} = h_dbar^{p,q}"""
        _, table = kt
        for bd in all_bidegrees(2):
            assert table.dim(Flavor.DBAR_LAMBDA, Bidegree(2 - bd.q, 2 - bd.p)) == table.dim(Flavor.DOLBEAULT, bd)

    def test_checks_pass(self, kt):
        """Test every table post-condition ran and passed"""
        _, table = kt
        assert table.checks.ok
        assert [c.status.value for c in table.checks.checks] == ["passed"] * 5

    def test_slack_non_negative(self, kt):
        """Test h_BC + h_A >= h_dbar + h_dbar_lambda with a strict cell"""
        _, table = kt
        slack = [table.slack(bd) for bd in all_bidegrees(2)]
        assert min(slack) >= 0
        assert max(slack) > 0

    def test_d_cohomology(self, kt):
        """Test dim H_D^k matches Dolbeault sums over q - p = k"""
        _, table = kt
        for k, dim in table.d_dims.items():
            dolbeault = sum(table.dim(Flavor.DOLBEAULT, bd) for bd in all_bidegrees(2) if bd.q - bd.p == k)
            assert dim == dolbeault

    def test_representatives_in_quotient(self, kt):
        """Test representatives lie in the numerator and are independent modulo the denominator"""
        inst, table = kt
        complexes = Complexes.of(inst, build_sl2(inst))
        for flavor in ALL_FLAVORS:
            for bd in all_bidegrees(2):
                numerator, denominator = quotient_spaces(flavor, complexes, bd)
                vectors = [to_vector(u, bd) for u in table.cell(flavor, bd).representatives]
                assert all(numerator.contains(v) for v in vectors)
                combined = span(vectors + denominator.vectors(), numerator.ambient_dim)
                assert combined.dim == len(vectors) + denominator.dim


class TestNakamura:
    """Test the Nakamura family"""

    def test_dbar_vanishes_at_zero(self, nakamura_zero):
        """Test h^{p,q} = C(3,p) C(3,q) when dbar = 0"""
        inst, table = nakamura_zero
        assert inst.dbar.is_zero()
        for bd in all_bidegrees(3):
            assert table.dim(Flavor.DOLBEAULT, bd) == comb(3, bd.p) * comb(3, bd.q)
        assert table.dim(Flavor.DOLBEAULT, Bidegree(0, 1)) == 3

    @pytest.mark.parametrize("t", [Fraction(1, 2), Fraction(1), Fraction(-1, 3)])
    def test_deformed_degree_one(self, t):
        """Test H^{1,0} = <u1, u2> and h^{0,1} = 3 away from t = 0"""
        inst = catalog.get("nakamura", {"t": GaussianRational(t)})
        table = table_of(inst)
        cell = table.cell(Flavor.DOLBEAULT, Bidegree(1, 0))
        assert cell.dim == 2
        reps = span([to_vector(u, Bidegree(1, 0)) for u in cell.representatives], 3)
        assert reps == span_of(inst, Bidegree(1, 0), ["u1", "u2"])
        assert table.dim(Flavor.DOLBEAULT, Bidegree(0, 1)) == 3
        assert table.checks.ok


class TestFrameInvariance:
    """Test tables do not depend on the coframe"""

    def test_catalog_frames_agree(self, kt):
        """Test the phi and xi frames give identical dimension tables"""
        _, table = kt
        xi_table = table_of(catalog.get("kodaira-thurston-xi"))
        for flavor in ALL_FLAVORS:
            assert xi_table.dims(flavor) == table.dims(flavor)
        assert xi_table.d_dims == table.d_dims

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_frames_agree(self, kt, seed):
        """Test random unipotent frame changes preserve every dimension"""
        _, table = kt
        rng = random.Random(seed)
        entry = GaussianRational(Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))
        m = ExactMatrix.from_rows([[ONE, ZERO], [entry, ONE]])
        spec = change_frame(parse_spec(catalog.KODAIRA_THURSTON), m, name=f"kt-random-{seed}")
        inst = instantiate(spec)
        assert inst.report.ok
        other = table_of(inst)
        for flavor in ALL_FLAVORS:
            assert other.dims(flavor) == table.dims(flavor)
        assert other.checks.ok


class TestRandomNilpotent:
    """Test dimension symmetries on random two-step structures"""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_symmetries(self, seed):
        """Test harmonic and quotient dims agree and the duality symmetries hold"""
        inst = instantiate(parse_spec(nilpotent_spec(random.Random(seed))))
        assert inst.report.ok
        table = table_of(inst)
        assert table.checks.ok
        n = 3
        for bd in all_bidegrees(n):
            mirrored = Bidegree(n - bd.q, n - bd.p)
            serre = Bidegree(n - bd.p, n - bd.q)
            for flavor in ALL_FLAVORS:
                cell = table.cell(flavor, bd)
                assert cell.dim == cell.harmonic_dim
            assert table.dim(Flavor.DBAR_LAMBDA, mirrored) == table.dim(Flavor.DOLBEAULT, bd)
            assert table.dim(Flavor.DOLBEAULT, serre) == table.dim(Flavor.DOLBEAULT, bd)
            assert table.dim(Flavor.BC, mirrored) == table.dim(Flavor.BC, bd)
            assert table.dim(Flavor.AEPPLI, mirrored) == table.dim(Flavor.AEPPLI, bd)
            assert table.slack(bd) >= 0


class TestQuotientEntryPoints:
    """Test the per-flavor quotient functions against the table"""

    def test_dolbeault_without_sl2(self, kt):
        """Test Dolbeault groups from the instance alone"""
        inst, table = kt
        groups = dolbeault(inst)
        dim, reps = groups[Bidegree(1, 0)]
        assert dim == 1
        assert [inst.format(u) for u in reps] == ["phi1"]
        assert [groups[bd][0] for bd in all_bidegrees(2)] == table.dims(Flavor.DOLBEAULT)

    @pytest.mark.parametrize("flavor, compute", [
        (Flavor.DBAR_LAMBDA, dbar_lambda_cohomology),
        (Flavor.BC, bott_chern),
        (Flavor.AEPPLI, aeppli),
    ])
    def test_matches_table(self, kt, flavor, compute):
        """Test dims and representatives agree with the table cells"""
        inst, table = kt
        groups = compute(inst, build_sl2(inst))
        for bd in all_bidegrees(2):
            dim, reps = groups[bd]
            assert dim == table.dim(flavor, bd)
            assert reps == table.cell(flavor, bd).representatives
