"""
Tests for the symplectic operator calculus
"""

import pytest
import random
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "python"))

from cscoh import catalog
from cscoh.errors import ConsistencyError, PreconditionError, StarUnavailable
from cscoh.exterior import Bidegree, Form, MonomialIndex, all_bidegrees, enumerate_basis, wedge, wedge_all
from cscoh.linalg import ExactMatrix
from cscoh.model import instantiate, parse_spec
from cscoh.operators import (
    Admissibility,
    adjoint,
    b_eigenvalues,
    build_laplacians,
    build_metric,
    build_sl2,
    build_symplectic_star,
    canonical_weights,
    eigenvalues,
    minkowski_identity_check,
    validate_sl2,
    validate_star,
)
from cscoh.scalars import GaussianRational, I


def split_spec(coefficients) -> str:
    """Direct sum of one-dimensional blocks, omega = sum c_k i x_k ^ y_k and dbar = 0"""
    n = len(coefficients)
    holo = [f"x{k + 1}" for k in range(n)]
    anti = [f"y{k + 1}" for k in range(n)]
    omega = " + ".join(f"({c}*i)*{x}^{y}" for c, x, y in zip(coefficients, holo, anti))
    lines = [
        "[manifold]",
        "name = split",
        f"n = {n}",
        "generators_10 = " + ", ".join(holo),
        "generators_01 = " + ", ".join(anti),
        "",
        "[dbar]",
        "",
        "[omega]",
        omega,
        "",
        "[metric]",
        "weights = " + ", ".join("1" for _ in holo),
        "",
        "[conjugation]",
    ]
    lines += [f"{y} = {x}" for x, y in zip(holo, anti)]
    return "\n".join(lines) + "\n"


def embed_block(u: Form, n: int, k: int) -> Form:
    """Move a form on one block (n = 1) onto block k of n"""
    return Form(n, {MonomialIndex(m.holo << k, m.anti << k): c for m, c in u})


@pytest.fixture(scope="module")
def kt():
    inst = catalog.get("kodaira-thurston")
    return inst, build_sl2(inst)


@pytest.fixture(scope="module")
def iwasawa():
    inst = catalog.get("iwasawa")
    return inst, build_sl2(inst)


class TestSl2:
    """Test L, Lambda and B"""

    def test_lambda_of_omega(self, kt):
        """Test Lambda(omega) = n"""
        inst, s = kt
        assert s.Lambda.apply(inst.omega) == Form.constant(2, GaussianRational(2))

    def test_b_counts_degree(self, kt):
        """Test B acts as k - n on total degree k"""
        inst, s = kt
        assert b_eigenvalues(s, 2) == {k: GaussianRational(k - 2) for k in range(5)}

    @pytest.mark.parametrize("name", ["kodaira-thurston", "kodaira-thurston-xi", "iwasawa", "nakamura"])
    def test_identities_on_catalog(self, name):
        """Test every sl2 identity holds on every catalog entry"""
        inst = catalog.get(name)
        report = validate_sl2(build_sl2(inst), inst)
        assert report.ok
        assert all(c.status.value == "passed" for c in report.checks)

    def test_negated_lambda_is_caught(self, kt):
        """Test a sign error in Lambda breaks the B check"""
        inst, s = kt
        broken_lambda = -s.Lambda
        broken = replace(s, Lambda=broken_lambda, B=(s.L @ broken_lambda) - (broken_lambda @ s.L))
        with pytest.raises(ConsistencyError):
            validate_sl2(broken, inst)
        report = validate_sl2(broken, inst, strict=False)
        assert not report.ok

    def test_dbar_lambda_shift(self, kt):
        """Test dbar_lambda lowers p by one"""
        inst, s = kt
        assert s.dbar_lambda.shift == (-1, 0)


class TestSymplecticStar:
    """Test the symplectic star"""

    def test_star_identities(self, kt):
        """Test *_s^2 = id, *_s(1) and the sandwich identities"""
        inst, s = kt
        star = build_symplectic_star(inst)
        assert star.square_defect() is None
        volume = wedge_all([inst.omega] * 2, 2).scale(GaussianRational(Fraction(1, 2)))
        assert star.apply(Form.constant(2)) == volume
        assert validate_star(star, inst, s).ok

    @pytest.mark.parametrize("n,seed", [(2, 0), (2, 1), (3, 2), (3, 3)])
    def test_factors_over_split_blocks(self, n, seed):
        """Test *(b1 ^ ... ^ bn) = (-1)^(sum_{i<j} |bi||bj|) *b1 ^ ... ^ *bn on a direct sum"""
        rng = random.Random(seed)
        coefficients = []
        while len(coefficients) < n:
            c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if c:
                coefficients.append(c)

        star = build_symplectic_star(instantiate(parse_spec(split_spec(coefficients))))
        block_stars = [build_symplectic_star(instantiate(parse_spec(split_spec([c])))) for c in coefficients]
        block_basis = [m for bd in all_bidegrees(1) for m in enumerate_basis(1, bd)]

        choices = [[]]
        for _ in range(n):
            choices = [chosen + [m] for chosen in choices for m in block_basis]
        for chosen in choices:
            product = Form.constant(n)
            starred = Form.constant(n)
            sign = 1
            for k, m in enumerate(chosen):
                piece = Form.monomial(1, m)
                for earlier in chosen[:k]:
                    if earlier.degree * m.degree % 2:
                        sign = -sign
                product = wedge(product, embed_block(piece, n, k))
                starred = wedge(starred, embed_block(block_stars[k].apply(piece), n, k))
            assert star.apply(product) == starred.scale(sign)

    def test_star_on_iwasawa(self, iwasawa):
        """Test star cross-checks on a three-dimensional entry"""
        inst, s = iwasawa
        assert validate_star(build_symplectic_star(inst), inst, s).ok

    def test_star_needs_conjugation(self):
        """Test entries without conjugation data have no star"""
        with pytest.raises(StarUnavailable) as info:
            build_symplectic_star(catalog.get("nakamura"))
        assert "skipping *_s cross-checks" in str(info.value)


class TestMetric:
    """Test metrics, adjoints and admissibility"""

    def test_eigenvalues(self):
        """Test exact eigenvalues in Q(i) and their absence"""
        swap = ExactMatrix.from_rows([[0, 1], [1, 0]])
        assert eigenvalues(swap) == (GaussianRational(-1), GaussianRational(1))
        rotation = ExactMatrix.from_rows([[0, -1], [1, 0]])
        assert eigenvalues(rotation) == (-I, I)
        assert eigenvalues(ExactMatrix.from_rows([[0, 2], [1, 0]])) is None

    def test_kodaira_thurston_admissible(self, kt):
        """Test the catalog weights are admissible"""
        inst, _ = kt
        metric = build_metric(inst)
        assert metric.status is Admissibility.ADMISSIBLE
        assert canonical_weights(inst) == (Fraction(2), Fraction(2))

    def test_doubled_weights_not_admissible(self, kt):
        """Test doubling the weights breaks admissibility"""
        inst, _ = kt
        metric = build_metric(inst, (Fraction(4), Fraction(4)))
        assert metric.status is Admissibility.NOT_ADMISSIBLE
        assert "eigenvalues" in metric.detail

    def test_undecided_without_conjugation(self):
        """Test admissibility is undecided without standard conjugation"""
        metric = build_metric(catalog.get("nakamura"))
        assert metric.status is Admissibility.UNDECIDED

    def test_bad_weights(self, kt):
        """Test weights must be positive and one per generator"""
        inst, _ = kt
        with pytest.raises(PreconditionError):
            build_metric(inst, (Fraction(1),))

    def test_adjoint_is_involutive(self, kt):
        """Test (A*)* = A"""
        inst, _ = kt
        metric = build_metric(inst, (Fraction(1), Fraction(3)))
        assert adjoint(adjoint(inst.dbar, metric), metric).first_difference(inst.dbar) is None


class TestMinkowskiIdentities:
    """Test the identities that hold for admissible metrics"""

    @pytest.mark.parametrize("name", ["kodaira-thurston", "kodaira-thurston-xi", "iwasawa"])
    def test_hold_for_admissible_metric(self, name):
        """Test every identity holds on the spec's own admissible weights"""
        inst = catalog.get(name)
        s = build_sl2(inst)
        metric = build_metric(inst)
        assert metric.status is Admissibility.ADMISSIBLE
        hodge = build_laplacians(inst, s, metric)
        report = minkowski_identity_check(inst, s, hodge, build_symplectic_star(inst))
        assert report.ok
        assert len(report.checks) == 4

    def test_need_admissible_metric(self, kt):
        """Test a non-admissible metric is refused without force"""
        inst, s = kt
        hodge = build_laplacians(inst, s, build_metric(inst, (Fraction(4), Fraction(4))))
        with pytest.raises(PreconditionError):
            minkowski_identity_check(inst, s, hodge)

    def test_doubled_weights_reported(self, kt):
        """Test forcing the check on doubled weights reports failures"""
        inst, s = kt
        hodge = build_laplacians(inst, s, build_metric(inst, (Fraction(4), Fraction(4))))
        report = minkowski_identity_check(inst, s, hodge, force=True)
        assert not report.ok
        assert report.failures()[0].name == "Lambda* = L"


class TestLaplacians:
    """Test the four Laplacians"""

    def test_degrees(self, kt):
        """Test every Laplacian preserves bidegree"""
        inst, s = kt
        hodge = build_laplacians(inst, s, build_metric(inst))
        for box in (hodge.box_dbar, hodge.box_dbar_lambda, hodge.delta_bc, hodge.delta_a):
            assert box.shift == (0, 0)
            assert set(box.blocks) == set(all_bidegrees(2))

    def test_star_intertwines_boxes(self, kt):
        """Test box_dbar_lambda = *_s box_dbar *_s"""
        inst, s = kt
        hodge = build_laplacians(inst, s, build_metric(inst))
        star = build_symplectic_star(inst)
        assert star.sandwich(hodge.box_dbar).first_difference(hodge.box_dbar_lambda) is None
