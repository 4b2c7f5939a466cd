"""Tests for Hodge-frame block matrices, horizontal elements, and charts."""

import numpy as np
import pytest

from ivhs.errors import PreconditionError
from ivhs.fields import FieldSpec, default_prime_field
from ivhs.hodge import (
    BlockMatrix,
    ChartData,
    HodgeShape,
    HorizontalElement,
    IntegralElementCandidate,
    build_transpose_element,
    check_integral,
    commutator,
    complete_horizontal,
    horizontal_commutator,
    in_chart,
    lie_algebra_residual,
    polarization_matrix,
    project,
    theta,
    theta_inverse,
    verified_candidate,
    zero_horizontal,
)
from ivhs.linalg import Matrix, Subspace, random_matrix, standard_complement

F = default_prime_field()
P = F.modulus


def rect_shape(weight, dims):
    return HodgeShape(weight, tuple(dims))


def random_block_matrix(shape, field, rng):
    blocks = {}
    n = shape.weight
    for i in range(n + 1):
        for j in range(n + 1):
            blocks[(i, j)] = random_matrix(field, shape.h(i), shape.h(j), rng)
    return BlockMatrix(shape, field, blocks)


def random_isometry_member(shape, field, rng):
    """Random solution of the isometry relations via the pair partition:
    free block when (i, j) precedes its partner (n-j, n-i), forced partner
    -(-1)^(j-i) t(A^i_j), (anti)symmetrized on the diagonal i + j = n."""
    n = shape.weight
    blocks = {}
    for i in range(n + 1):
        for j in range(n + 1):
            partner = (n - j, n - i)
            if (i, j) == partner:
                r = random_matrix(field, shape.h(i), shape.h(j), rng)
                if n % 2 == 1:
                    blocks[(i, j)] = r + r.transpose()
                else:
                    blocks[(i, j)] = r - r.transpose()
            elif (i, j) < partner:
                blocks[(i, j)] = random_matrix(field, shape.h(i), shape.h(j), rng)
    for (i, j) in list(blocks):
        partner = (n - j, n - i)
        if (i, j) < partner:
            sign = -1 if (j - i) % 2 == 0 else 1
            blocks[partner] = blocks[(i, j)].transpose().scale(sign)
    return BlockMatrix(shape, field, blocks)


def random_horizontal(shape, field, rng):
    free = []
    for j in range(shape.free_slot_count):
        m = random_matrix(field, *shape.slot_shape(j), rng)
        # middle slot of an odd-weight frame must be symmetric
        if shape.weight % 2 == 1 and j == shape.free_slot_count - 1:
            m = m + m.transpose()
        free.append(m)
    return complete_horizontal(shape, field, free)


class TestHodgeShape:
    def test_validation(self):
        with pytest.raises(PreconditionError):
            HodgeShape(3, (1, 2, 1))
        with pytest.raises(PreconditionError):
            HodgeShape(0, (1,))
        with pytest.raises(PreconditionError):
            HodgeShape(2, (1, -1, 1))

    def test_free_slot_count(self):
        assert rect_shape(2, (1, 2, 1)).free_slot_count == 1
        assert rect_shape(3, (1, 2, 2, 1)).free_slot_count == 2
        assert rect_shape(4, (1, 2, 3, 2, 1)).free_slot_count == 2
        assert rect_shape(5, (1, 2, 3, 3, 2, 1)).free_slot_count == 3

    def test_slot_shape_and_symmetry(self):
        s = rect_shape(3, (2, 5, 5, 2))
        assert s.slot_shape(0) == (5, 2)
        assert s.slot_shape(1) == (5, 5)
        assert s.slot_shape(2) == (2, 5)
        assert s.is_symmetric
        assert not rect_shape(2, (1, 2, 3)).is_symmetric


class TestBlockMatrix:
    def test_zero_blocks_dropped(self):
        s = rect_shape(2, (1, 1, 1))
        x = BlockMatrix(s, F, {(0, 0): Matrix.zeros(F, 1, 1), (1, 0): Matrix.from_rows(F, [[3]])})
        assert set(x.blocks) == {(1, 0)}
        assert x.block(0, 0).is_zero()

    def test_shape_validation(self):
        s = rect_shape(2, (1, 2, 1))
        with pytest.raises(PreconditionError):
            BlockMatrix(s, F, {(0, 1): Matrix.from_rows(F, [[1]])})
        with pytest.raises(PreconditionError):
            BlockMatrix(s, F, {(3, 0): Matrix.from_rows(F, [[1]])})

    def test_arithmetic_matches_dense(self):
        rng = np.random.default_rng(7)
        s = rect_shape(2, (2, 3, 2))
        for _ in range(10):
            x = random_block_matrix(s, F, rng)
            y = random_block_matrix(s, F, rng)
            xd = dense(x)
            yd = dense(y)
            assert dense(x + y) == xd + yd
            assert dense(x - y) == xd - yd
            assert dense(x @ y) == xd @ yd
            assert dense(x.transpose()) == xd.transpose()
            assert dense(x.scale(5)) == xd.scale(5)

    def test_block_degrees(self):
        s = rect_shape(3, (1, 1, 1, 1))
        one = Matrix.from_rows(F, [[1]])
        x = BlockMatrix(s, F, {(1, 0): one, (3, 2): one, (0, 2): one})
        assert x.block_degrees() == {1, -2}


def dense(x: BlockMatrix) -> Matrix:
    """Flatten a block matrix to an ordinary matrix, for oracle checks."""
    s = x.shape
    rows = [Matrix.hstack([x.block(i, j) for j in range(s.weight + 1)]) for i in range(s.weight + 1)]
    return Matrix.vstack(rows)


class TestPolarization:
    def test_weight_three_signs(self):
        s = rect_shape(3, (1, 2, 2, 1))
        sigma = polarization_matrix(s, F)
        # block (i, n-i) carries (-1)^(n-i): -1, +1, -1, +1 for i = 0..3
        assert sigma.block(0, 3) == Matrix.identity(F, 1).scale(-1)
        assert sigma.block(1, 2) == Matrix.identity(F, 2)
        assert sigma.block(2, 1) == Matrix.identity(F, 2).scale(-1)
        assert sigma.block(3, 0) == Matrix.identity(F, 1)

    def test_weight_two_signs(self):
        s = rect_shape(2, (1, 3, 1))
        sigma = polarization_matrix(s, F)
        assert sigma.block(0, 2) == Matrix.identity(F, 1)
        assert sigma.block(1, 1) == Matrix.identity(F, 3).scale(-1)
        assert sigma.block(2, 0) == Matrix.identity(F, 1)

    @pytest.mark.parametrize("weight,dims", [(2, (1, 2, 1)), (3, (2, 3, 3, 2)), (4, (1, 2, 2, 2, 1)), (5, (1, 1, 2, 2, 1, 1))])
    def test_square_is_plus_minus_identity(self, weight, dims):
        s = rect_shape(weight, dims)
        sigma = polarization_matrix(s, F)
        sq = dense(sigma @ sigma)
        total = sum(dims)
        want = Matrix.identity(F, total).scale(1 if weight % 2 == 0 else -1)
        assert sq == want

    def test_rejects_asymmetric_shape(self):
        with pytest.raises(PreconditionError):
            polarization_matrix(rect_shape(2, (1, 2, 3)), F)


class TestLieAlgebraResidual:
    def test_constructed_member_passes(self):
        rng = np.random.default_rng(11)
        for weight, dims in [(2, (2, 3, 2)), (3, (2, 3, 3, 2)), (4, (1, 2, 3, 2, 1))]:
            s = rect_shape(weight, dims)
            x = random_isometry_member(s, F, rng)
            assert lie_algebra_residual(x) == []

    def test_broken_block_is_flagged(self):
        rng = np.random.default_rng(13)
        s = rect_shape(3, (2, 3, 3, 2))
        x = random_isometry_member(s, F, rng)
        # (2, 1) is its own partner at weight 3: the relation there is
        # symmetry, so the bump must have an antisymmetric part
        bump = Matrix.zeros(F, 3, 3).to_rows()
        bump[0][1] = 1
        broken = x + BlockMatrix(s, F, {(2, 1): Matrix.from_rows(F, bump)})
        bad = lie_algebra_residual(broken)
        positions = {pos for pos, _ in bad}
        assert positions == {(2, 1)}
        # an off-partner bump is reported at both coupled positions
        bump2 = Matrix.zeros(F, 3, 2).to_rows()
        bump2[0][0] = 1
        broken2 = x + BlockMatrix(s, F, {(1, 0): Matrix.from_rows(F, bump2)})
        positions2 = {pos for pos, _ in lie_algebra_residual(broken2)}
        assert positions2 == {(1, 0), (3, 2)}

    def test_matches_matrix_equation(self):
        # residual empty  <=>  tX S + S X == 0, on random and constructed input
        rng = np.random.default_rng(17)
        s = rect_shape(3, (2, 2, 2, 2))
        sigma = polarization_matrix(s, F)
        agree = 0
        members = 0
        for t in range(200):
            if t % 3 == 0:
                x = random_isometry_member(s, F, rng)
            else:
                x = random_block_matrix(s, F, rng)
            residual_empty = lie_algebra_residual(x) == []
            eq = x.transpose() @ sigma + sigma @ x
            assert residual_empty == eq.is_zero()
            agree += 1
            members += residual_empty
        assert agree == 200
        assert members >= 60  # every third draw is a constructed member

    def test_rejects_asymmetric_shape(self):
        s = rect_shape(2, (1, 2, 3))
        x = BlockMatrix(s, F, {})
        with pytest.raises(PreconditionError):
            lie_algebra_residual(x)


class TestHorizontalElement:
    def test_weight_three_relations(self):
        s = rect_shape(3, (2, 3, 3, 2))
        rng = np.random.default_rng(19)
        b = random_matrix(F, 3, 2, rng)
        c = random_matrix(F, 3, 3, rng)
        c = c + c.transpose()
        e = HorizontalElement(s, F, [b, c, b.transpose()])
        assert e.slot(2) == b.transpose()
        with pytest.raises(PreconditionError):
            HorizontalElement(s, F, [b, c, random_matrix(F, 2, 3, rng)])
        asym = random_matrix(F, 3, 3, rng)
        if asym == asym.transpose():  # vanishing chance, keep the test honest
            asym = asym + Matrix.from_rows(F, [[1 if (i, j) == (0, 1) else 0 for j in range(3)] for i in range(3)])
        with pytest.raises(PreconditionError):
            HorizontalElement(s, F, [b, asym, b.transpose()])

    def test_complete_horizontal_even_weight(self):
        s = rect_shape(4, (1, 2, 3, 2, 1))
        rng = np.random.default_rng(23)
        b = random_matrix(F, 2, 1, rng)
        c = random_matrix(F, 3, 2, rng)
        e = complete_horizontal(s, F, [b, c])
        assert e.slot(0) == b
        assert e.slot(1) == c
        assert e.slot(2) == c.transpose()
        assert e.slot(3) == b.transpose()

    def test_complete_horizontal_wrong_count(self):
        s = rect_shape(3, (1, 2, 2, 1))
        with pytest.raises(PreconditionError):
            complete_horizontal(s, F, [Matrix.zeros(F, 2, 1)])

    def test_every_element_is_an_isometry(self):
        rng = np.random.default_rng(29)
        for weight, dims in [(2, (2, 3, 2)), (3, (2, 3, 3, 2)), (4, (2, 3, 4, 3, 2)), (5, (1, 2, 3, 3, 2, 1))]:
            s = rect_shape(weight, dims)
            for _ in range(5):
                e = random_horizontal(s, F, rng)
                x = e.as_block_matrix()
                assert x.block_degrees() <= {1}
                assert lie_algebra_residual(x) == []

    def test_free_flat_length(self):
        s = rect_shape(3, (2, 3, 3, 2))
        e = zero_horizontal(s, F)
        assert e.is_zero()
        assert len(e.free_flat()) == 3 * 2 + 3 * 3


class TestCommutators:
    def test_antisymmetry_and_self(self):
        rng = np.random.default_rng(31)
        s = rect_shape(3, (2, 2, 2, 2))
        x = random_block_matrix(s, F, rng)
        y = random_block_matrix(s, F, rng)
        assert commutator(x, y) == -commutator(y, x)
        assert commutator(x, x).is_zero()

    def test_transpose_lifts_commute_high_weight(self):
        rng = np.random.default_rng(37)
        for weight in (3, 4, 5, 6):
            dims = tuple([2] + [3] * (weight - 1) + [2])
            s = rect_shape(weight, dims)
            cand = build_transpose_element(
                [random_matrix(F, 3, 2, rng) for _ in range(3)], s, F
            )
            assert cand.verified
            assert check_integral(cand).ok

    def test_weight_two_slot_collision(self):
        # at weight 2 a slot-0 block meets a slot-1 block in the product:
        # the same interaction the transpose lift avoids from weight 3 on
        s = rect_shape(2, (1, 1, 1))
        one = Matrix.from_rows(F, [[1]])
        a = BlockMatrix(s, F, {(1, 0): one})
        b = BlockMatrix(s, F, {(2, 1): one})
        c = commutator(a, b)
        assert c.block(2, 0) == one.scale(-1)
        with pytest.raises(PreconditionError):
            build_transpose_element([Matrix.from_rows(F, [[1]])], s, F)

    def test_horizontal_commutator_detects_failure(self):
        s = rect_shape(3, (2, 3, 3, 2))
        rng = np.random.default_rng(41)
        e1 = random_horizontal(s, F, rng)
        e2 = random_horizontal(s, F, rng)
        c = horizontal_commutator(e1, e2)
        manual = e1.as_block_matrix() @ e2.as_block_matrix() - e2.as_block_matrix() @ e1.as_block_matrix()
        assert c == manual


class TestIntegrality:
    def test_check_and_verify(self):
        s = rect_shape(3, (2, 3, 3, 2))
        rng = np.random.default_rng(43)
        e1 = random_horizontal(s, F, rng)
        e2 = random_horizontal(s, F, rng)
        cand = IntegralElementCandidate(s, F, (e1, e2))
        report = check_integral(cand)
        if not report.ok:
            assert report.failing_pairs == ((0, 1),)
        flagged = verified_candidate(cand)
        assert flagged.verified == report.ok

    def test_transpose_lift_round_trip(self):
        s = rect_shape(3, (2, 4, 4, 2))
        rng = np.random.default_rng(47)
        rows = [random_matrix(F, 4, 2, rng).flatten() for _ in range(3)]
        e0 = Subspace.from_rows(F, rows, ambient_dimension=8)
        cand = build_transpose_element(e0, s, F)
        assert cand.k == e0.dim
        assert project(cand, 0) == e0
        assert project(cand, 1).dim == 0
        assert project(cand, 2) == Subspace.from_rows(
            F, [e.slot(2).flatten() for e in cand.basis], ambient_dimension=8
        )

    def test_project_range(self):
        s = rect_shape(3, (1, 2, 2, 1))
        cand = IntegralElementCandidate(s, F, (zero_horizontal(s, F),))
        with pytest.raises(PreconditionError):
            project(cand, 3)


class TestChart:
    def setup_method(self):
        self.shape = rect_shape(3, (2, 3, 3, 2))
        self.rng = np.random.default_rng(53)
        rows = [random_matrix(F, 3, 2, self.rng).flatten() for _ in range(2)]
        self.e0 = Subspace.from_rows(F, rows, ambient_dimension=6)
        assert self.e0.dim == 2
        self.w = standard_complement(self.e0)
        self.chart = ChartData(self.shape, F, self.e0, self.w)

    def test_complement_validation(self):
        bad = Subspace.from_rows(F, [self.e0.basis.row(0)], ambient_dimension=6)
        with pytest.raises(PreconditionError):
            ChartData(self.shape, F, self.e0, bad)

    def test_in_chart(self):
        cand = build_transpose_element(self.e0, self.shape, F)
        assert in_chart(cand, self.w)
        # a candidate whose slot-0 span degenerates is outside every chart
        e = cand.basis[0]
        degenerate = IntegralElementCandidate(self.shape, F, (e, e))
        assert not in_chart(degenerate, self.w)
        # a candidate meeting W nontrivially is outside this chart
        wrow = self.w.basis.row(0)
        wmat = Matrix.from_rows(F, [wrow[i * 2 : (i + 1) * 2] for i in range(3)], cols=2)
        other = build_transpose_element([wmat], self.shape, F)
        assert not in_chart(other, self.w)

    def test_theta_inverse_of_theta_is_identity(self):
        for trial in range(25):
            rng = np.random.default_rng((61, trial))
            w_part = random_matrix(F, 2, self.w.dim, rng)
            part1 = random_matrix(F, 2, 9, rng)
            # slot-1 blocks of a horizontal element must be symmetric at odd
            # weight only in the middle slot; weight 3 slot 1 is the middle
            sym_rows = []
            for a in range(2):
                m = Matrix.from_rows(F, [part1.row(a)[i * 3 : (i + 1) * 3] for i in range(3)], cols=3)
                m = m + m.transpose()
                sym_rows.append(m.flatten())
            part1 = Matrix.from_rows(F, sym_rows, cols=9)
            cand = theta(self.chart, w_part, [part1])
            coords = theta_inverse(cand, self.chart)
            assert coords.w_part == w_part
            assert coords.parts[0] == part1

    def test_coordinates_are_basis_independent(self):
        # chart coordinates depend on the plane, not the spanning basis:
        # remixing the basis by any invertible matrix leaves them fixed
        for trial in range(25):
            rng = np.random.default_rng((67, trial))
            mix = random_matrix(F, 2, 2, rng)
            if mix.rank() != 2:
                continue
            w_part = random_matrix(F, 2, self.w.dim, rng)
            sym_rows = []
            for a in range(2):
                m = random_matrix(F, 3, 3, rng)
                m = m + m.transpose()
                sym_rows.append(m.flatten())
            part1 = Matrix.from_rows(F, sym_rows, cols=9)
            cand = theta(self.chart, w_part, [part1])
            mixed_rows = mix @ Matrix.from_rows(
                F, [e.free_flat() for e in cand.basis], cols=6 + 9
            )
            elements = []
            for a in range(2):
                flat = mixed_rows.row(a)
                alpha = Matrix.from_rows(F, [flat[i * 2 : (i + 1) * 2] for i in range(3)], cols=2)
                mid = Matrix.from_rows(F, [flat[6 + i * 3 : 6 + (i + 1) * 3] for i in range(3)], cols=3)
                elements.append(complete_horizontal(self.shape, F, [alpha, mid]))
            mixed = IntegralElementCandidate(self.shape, F, tuple(elements))
            coords = theta_inverse(mixed, self.chart)
            assert coords.w_part == w_part
            assert coords.parts[0] == part1
            back = theta(self.chart, coords.w_part, list(coords.parts))
            span = Subspace.from_rows(F, [e.free_flat() for e in mixed.basis], ambient_dimension=15)
            span_back = Subspace.from_rows(F, [e.free_flat() for e in back.basis], ambient_dimension=15)
            assert span == span_back

    def test_transpose_lift_has_zero_coordinates(self):
        cand = build_transpose_element(self.e0, self.shape, F)
        coords = theta_inverse(cand, self.chart)
        assert coords.w_part.is_zero()
        assert all(p.is_zero() for p in coords.parts)
        assert coords.is_zero()
        maps = coords.part_maps(1)
        assert all(m.is_zero() for m in maps)

    def test_theta_inverse_rejects_outside_chart(self):
        wrow = self.w.basis.row(0)
        wmat = Matrix.from_rows(F, [wrow[i * 2 : (i + 1) * 2] for i in range(3)], cols=2)
        other = build_transpose_element([wmat, self.e0.basis.row(0)], self.shape, F)
        with pytest.raises(PreconditionError):
            theta_inverse(other, self.chart)
