"""
Tests for exact linear algebra over Q(i)
"""

import pytest
import random
from fractions import Fraction
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "python"))

from cscoh.linalg import (
    ExactMatrix,
    Subspace,
    characteristic_polynomial,
    determinant,
    image,
    inverse,
    kernel,
    quotient_basis,
    rank,
    rref,
    solve,
    span,
    subspace_intersect,
    subspace_sum,
)
from cscoh.scalars import GaussianRational, I, ONE, ZERO


def _random_matrix(rng: random.Random, rows: int, cols: int) -> ExactMatrix:
    # sparse small entries so that rank deficiency actually happens
    entries = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            if rng.random() < 0.4:
                row.append(ZERO)
            else:
                row.append(GaussianRational(Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-1, 1))))
        entries.append(row)
    return ExactMatrix.from_rows(entries, cols=cols)


class TestExactMatrix:
    """Test matrix construction and arithmetic"""

    def test_from_rows_and_columns_agree(self):
        """Test the two constructors describe the same matrix"""
        by_rows = ExactMatrix.from_rows([[1, 2], [3, 4]])
        by_columns = ExactMatrix.from_columns([[1, 3], [2, 4]], rows=2)
        assert by_rows == by_columns
        assert by_rows[1, 0] == 3

    def test_ragged_rows(self):
        """Test ragged input is rejected"""
        with pytest.raises(ValueError):
            ExactMatrix.from_rows([[1, 2], [3]])

    def test_matmul_and_apply(self):
        """Test products against a hand computation"""
        m = ExactMatrix.from_rows([[1, I], [0, 1]])
        assert (m @ m) == ExactMatrix.from_rows([[1, 2 * I], [0, 1]])
        assert m.apply((ONE, ONE)) == (1 + I, ONE)

    def test_conjugate_transpose(self):
        """Test the Hermitian adjoint"""
        m = ExactMatrix.from_rows([[1, I], [0, 2]])
        assert m.conjugate_transpose() == ExactMatrix.from_rows([[1, 0], [-I, 2]])


class TestRowReduction:
    """Test RREF, rank, kernels and images"""

    def test_rref_is_reduced(self):
        """Test pivots are one and their columns are otherwise zero"""
        reduced, r = rref(ExactMatrix.from_rows([[2, 4, 2], [1, 3, 0]]))
        assert r == 2
        assert reduced == ExactMatrix.from_rows([[1, 0, 3], [0, 1, -1]])

    def test_rank_deficient(self):
        """Test a rank one matrix"""
        m = ExactMatrix.from_rows([[1, 2], [2, 4]])
        assert rank(m) == 1
        null = kernel(m)
        assert null.dim == 1
        assert null.contains((GaussianRational(-2), ONE))
        assert image(m).contains((ONE, GaussianRational(2)))

    def test_kernel_of_zero_matrix(self):
        """Test the kernel of zero is everything"""
        assert kernel(ExactMatrix.zeros(2, 3)).dim == 3

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_rank_nullity(self, seed):
        """Test rank + nullity = columns and kernel vectors are annihilated"""
        rng = random.Random(seed)
        m = _random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        null = kernel(m)
        assert rank(m) + null.dim == m.cols
        for v in null.vectors():
            assert not any(m.apply(v))

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_rank_of_adjoint(self, seed):
        """Test rank(m) = rank(m^*) and image(m^*) has the same dimension as image(m)"""
        rng = random.Random(seed)
        inner = rng.randint(1, 3)
        m = _random_matrix(rng, rng.randint(1, 5), inner) @ _random_matrix(rng, inner, rng.randint(1, 5))
        adjoint = m.conjugate_transpose()
        assert rank(m) == rank(adjoint)
        assert rank(m) == rank(m.transpose())
        assert image(adjoint).dim == image(m).dim
        assert kernel(adjoint).dim == m.rows - rank(m)


class TestSubspaces:
    """Test subspace calculus"""

    def test_intersection_and_sum(self):
        """Test span(e1, e2) and span(e2, e3) in dimension 3"""
        e1, e2, e3 = (ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE)
        a = span([e1, e2], 3)
        b = span([e2, e3], 3)
        meet = subspace_intersect(a, b)
        assert meet.dim == 1
        assert meet.contains(e2)
        assert subspace_sum(a, b).dim == 3

    def test_span_is_canonical(self):
        """Test different spanning sets give the same RREF basis"""
        a = span([(ONE, ONE), (ONE, -ONE)], 2)
        assert a == Subspace.full(2)
        b = span([(GaussianRational(2), 2 * I)], 2)
        c = span([(I, -ONE)], 2)
        assert b == c

    def test_quotient_basis(self):
        """Test complements are chosen from the numerator's RREF basis"""
        full = Subspace.full(2)
        sub = span([(ONE, ZERO)], 2)
        assert quotient_basis(full, sub) == [(ZERO, ONE)]
        with pytest.raises(ValueError):
            quotient_basis(sub, full)

    def test_ambient_mismatch(self):
        """Test subspaces of different ambient spaces do not mix"""
        with pytest.raises(ValueError):
            subspace_sum(Subspace.full(2), Subspace.full(3))


class TestSolveAndInvert:
    """Test linear solves, determinants and inverses"""

    def test_solve_consistent(self):
        """Test free variables are set to zero"""
        m = ExactMatrix.from_rows([[1, 1], [0, 0]])
        assert solve(m, (ONE, ZERO)) == (ONE, ZERO)

    def test_solve_inconsistent(self):
        """Test an inconsistent system has no solution"""
        m = ExactMatrix.from_rows([[1, 1], [0, 0]])
        assert solve(m, (ONE, ONE)) is None

    def test_determinant_and_inverse(self):
        """Test the frame matrix [[1, i], [1, -i]]"""
        m = ExactMatrix.from_rows([[1, I], [1, -I]])
        assert determinant(m) == -2 * I
        assert m @ inverse(m) == ExactMatrix.identity(2)

    def test_singular_inverse(self):
        """Test singular matrices are refused"""
        with pytest.raises(ValueError):
            inverse(ExactMatrix.from_rows([[1, 2], [2, 4]]))

    def test_characteristic_polynomial(self):
        """Test det(xI - m) for a swap matrix"""
        m = ExactMatrix.from_rows([[0, 1], [1, 0]])
        assert characteristic_polynomial(m) == [ONE, ZERO, -ONE]
