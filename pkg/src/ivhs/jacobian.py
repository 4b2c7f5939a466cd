"""Graded pieces of Jacobian rings R = S / (df/dx_0, ..., df/dx_{N-1}).

Each graded piece is presented by its standard monomials (non-pivot columns
of the row-reduced ideal piece) together with the projector expressing any
degree-m polynomial in those classes.  Monomial ideals (Fermat fixtures)
take a combinatorial path: the ideal piece is spanned by distinct monomials,
so ranks are set counts and projectors are selection matrices.  Everything
else goes through exact dense elimination, guarded by the entry budget.

A smooth hypersurface of degree d in P^{n+1} has one-dimensional socle in
degree sigma = (n+2)(d-2) and zero beyond; socle_check tests exactly that.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError, PreconditionError, check_dense_budget
from .fields import FieldSpec, Scalar, default_prime_field
from .linalg import Matrix, _fp_rref
from .polyring import (
    Exponents,
    HomogeneousPoly,
    MonomialBasis,
    basis,
    graded_dimension,
    multiply,
    partial_derivative,
)

#: Guard for socle_check: refuse ambient graded pieces beyond this size.
SOCLE_DIMENSION_GUARD = 10_000_000


class JacobianContext:
    """A homogeneous polynomial together with cached quotient-ring pieces.

    Thread-safe for readers: the piece cache is filled under a lock and
    pieces are immutable once published.
    """

    def __init__(self, f: HomogeneousPoly):
        if f.degree < 2:
            raise PreconditionError("hypersurface degree must be at least 2")
        self.f = f
        self.field: FieldSpec = f.field
        self.num_vars = f.num_vars
        self.d = f.degree
        self.generators: tuple[HomogeneousPoly, ...] = tuple(
            partial_derivative(f, i) for i in range(f.num_vars)
        )
        self._pieces: dict[int, GradedQuotientPiece] = {}
        self._lock = threading.Lock()

    @staticmethod
    def fermat(n: int, d: int, field: FieldSpec | None = None) -> "JacobianContext":
        """sum of pure d-th powers in n+2 variables."""
        if n < 1 or d < 2:
            raise PreconditionError("need n >= 1 and d >= 2")
        fld = field if field is not None else default_prime_field()
        nv = n + 2
        terms = {tuple(d if j == i else 0 for j in range(nv)): 1 for i in range(nv)}
        return JacobianContext(HomogeneousPoly.from_terms(fld, nv, terms))

    @property
    def n(self) -> int:
        """Projective dimension of the hypersurface (num_vars - 2)."""
        return self.num_vars - 2

    @property
    def socle_degree(self) -> int:
        return self.num_vars * (self.d - 2)

    @property
    def has_monomial_ideal(self) -> bool:
        return all(sum(1 for _ in g.terms()) <= 1 for g in self.generators)

    def piece(self, m: int, method: str = "auto") -> "GradedQuotientPiece":
        if m < 0:
            raise PreconditionError("degree must be nonnegative")
        if method not in ("auto", "monomial", "dense"):
            raise PreconditionError(f"unknown method {method!r}")
        if method == "auto":
            with self._lock:
                cached = self._pieces.get(m)
            if cached is not None:
                return cached
            piece = self._build_piece(m, "monomial" if self.has_monomial_ideal else "dense")
            with self._lock:
                return self._pieces.setdefault(m, piece)
        return self._build_piece(m, method)

    # -- piece construction -------------------------------------------------

    def _build_piece(self, m: int, method: str) -> "GradedQuotientPiece":
        amb = basis(self.num_vars, m)
        src_deg = m - (self.d - 1)
        if src_deg < 0:
            return _identity_piece(self.field, m, amb)
        if method == "monomial":
            if not self.has_monomial_ideal:
                raise PreconditionError("generators are not all monomials")
            return self._build_piece_monomial(m, amb, src_deg)
        return self._build_piece_dense(m, amb, src_deg)

    def _build_piece_monomial(self, m: int, amb: MonomialBasis, src_deg: int) -> "GradedQuotientPiece":
        src = basis(self.num_vars, src_deg)
        ideal_cols: set[int] = set()
        for g in self.generators:
            for t, _ in g.terms():
                offs = np.array(t, dtype=np.int64)
                sums = src.array + offs
                for row in sums:
                    ideal_cols.add(amb.index(tuple(int(x) for x in row)))
        std_cols = [j for j in range(amb.dim) if j not in ideal_cols]
        std = tuple(amb.monomials[j] for j in std_cols)
        nstd = len(std_cols)
        if self.field.is_prime_field:
            proj = np.zeros((nstd, amb.dim), dtype=np.int64)
            proj[np.arange(nstd), std_cols] = 1
            projector = Matrix.from_array(self.field, proj)
        else:
            one, zero = self.field.one(), self.field.zero()
            rows = []
            for r, j in enumerate(std_cols):
                row = [zero] * amb.dim
                row[j] = one
                rows.append(row)
            projector = Matrix.from_rows(self.field, rows, cols=amb.dim)
        return GradedQuotientPiece(self.field, m, amb, len(ideal_cols), std, projector)

    def _build_piece_dense(self, m: int, amb: MonomialBasis, src_deg: int) -> "GradedQuotientPiece":
        src = basis(self.num_vars, src_deg)
        nrows = src.dim * self.num_vars
        check_dense_budget(nrows, amb.dim, what=f"ideal piece in degree {m}")
        if self.field.is_prime_field:
            p = self.field.modulus
            mat = np.zeros((nrows, amb.dim), dtype=np.int64)
            for gi, g in enumerate(self.generators):
                base = gi * src.dim
                for t, c in g.terms():
                    offs = np.array(t, dtype=np.int64)
                    sums = src.array + offs
                    cols = [amb.index(tuple(int(x) for x in row)) for row in sums]
                    mat[base + np.arange(src.dim), cols] = (mat[base + np.arange(src.dim), cols] + int(c)) % p
            rref, pivots = _fp_rref(mat, p)
            piv_set = set(pivots)
            std_cols = [j for j in range(amb.dim) if j not in piv_set]
            std = tuple(amb.monomials[j] for j in std_cols)
            nstd = len(std_cols)
            proj = np.zeros((nstd, amb.dim), dtype=np.int64)
            if nstd:
                proj[np.arange(nstd), std_cols] = 1
            if pivots and nstd:
                block = rref[np.ix_(range(len(pivots)), std_cols)]
                proj[:, list(pivots)] = (-block.T) % p
            projector = Matrix.from_array(self.field, proj)
            return GradedQuotientPiece(self.field, m, amb, len(pivots), std, projector)
        # rational path: small fixtures only
        rows: list[list[Scalar]] = []
        zero = self.field.zero()
        for g in self.generators:
            gterms = list(g.terms())
            for a in src.monomials:
                row = [zero] * amb.dim
                for t, c in gterms:
                    e = tuple(x + y for x, y in zip(a, t))
                    j = amb.index(e)
                    row[j] = self.field.add(row[j], c)
                rows.append(row)
        mat = Matrix.from_rows(self.field, rows, cols=amb.dim)
        rref_m, pivots = mat.rref()
        piv_set = set(pivots)
        std_cols = [j for j in range(amb.dim) if j not in piv_set]
        std = tuple(amb.monomials[j] for j in std_cols)
        one = self.field.one()
        prows = []
        for r, j in enumerate(std_cols):
            row = [zero] * amb.dim
            row[j] = one
            prows.append(row)
        for i, c in enumerate(pivots):
            for r, j in enumerate(std_cols):
                prows[r][c] = self.field.neg(rref_m.entry(i, j))
        projector = (
            Matrix.from_rows(self.field, prows, cols=amb.dim)
            if prows
            else Matrix.zeros(self.field, 0, amb.dim)
        )
        return GradedQuotientPiece(self.field, m, amb, len(pivots), std, projector)


def _identity_piece(fld: FieldSpec, m: int, amb: MonomialBasis) -> "GradedQuotientPiece":
    return GradedQuotientPiece(
        fld, m, amb, 0, amb.monomials, Matrix.identity(fld, amb.dim)
    )


@dataclass(frozen=True)
class GradedQuotientPiece:
    """Degree-m piece of the quotient ring in standard-monomial coordinates."""

    field: FieldSpec
    degree: int
    ambient: MonomialBasis
    ideal_rank: int
    standard_monomials: tuple[Exponents, ...]
    projector: Matrix  # dim x ambient.dim
    _std_index: dict = dc_field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._std_index.update({e: i for i, e in enumerate(self.standard_monomials)})

    @property
    def dim(self) -> int:
        return len(self.standard_monomials)

    def std_index(self, exponents: Exponents) -> int | None:
        return self._std_index.get(tuple(exponents))

    def project_poly(self, g: HomogeneousPoly) -> list[Scalar]:
        """Coordinates of [g] in the standard-monomial basis."""
        if g.degree != self.degree or g.num_vars != self.ambient.num_vars:
            raise PreconditionError("polynomial does not live in this piece")
        vec = Matrix.from_rows(self.field, [list(g.coeffs)])
        return (self.projector @ vec.transpose()).transpose().row(0)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def ideal_piece_rank(ctx: JacobianContext, m: int, method: str = "auto") -> int:
    """dim of the degree-m piece of the Jacobian ideal."""
    return ctx.piece(m, method=method).ideal_rank


def quotient_piece(ctx: JacobianContext, m: int, method: str = "auto") -> GradedQuotientPiece:
    """Standard monomials and projector for the degree-m quotient piece."""
    return ctx.piece(m, method=method)


def quotient_dimension(ctx: JacobianContext, m: int) -> int:
    return ctx.piece(m).dim


@dataclass(frozen=True)
class MultiplicationMap:
    """Multiplication by a fixed class: R^a -> R^{a+e} on standard bases."""

    ctx: JacobianContext
    multiplier: HomogeneousPoly
    source_degree: int
    matrix: Matrix

    @property
    def target_degree(self) -> int:
        return self.source_degree + self.multiplier.degree

    def compose(self, other: "MultiplicationMap") -> Matrix:
        """Matrix of self after other (degrees must chain)."""
        if other.target_degree != self.source_degree:
            raise PreconditionError("composition degrees do not chain")
        return self.matrix @ other.matrix


def multiplication_map(ctx: JacobianContext, g: HomogeneousPoly, a: int) -> MultiplicationMap:
    """The map [u] -> [g u] from R^a to R^{a + deg g}."""
    if g.num_vars != ctx.num_vars or g.field != ctx.field:
        raise PreconditionError("multiplier lives in a different ring")
    src = ctx.piece(a)
    tgt = ctx.piece(a + g.degree)
    fld = ctx.field
    if fld.is_prime_field:
        p = fld.modulus
        proj = tgt.projector.array
        out = np.zeros((tgt.dim, src.dim), dtype=np.int64)
        for t, c in g.terms():
            cols = [tgt.ambient.index(tuple(x + y for x, y in zip(u, t))) for u in src.standard_monomials]
            if cols:
                out = (out + int(c) * proj[:, cols]) % p
        return MultiplicationMap(ctx, g, a, Matrix.from_array(fld, out))
    cols_acc = [[fld.zero()] * src.dim for _ in range(tgt.dim)]
    for t, c in g.terms():
        for i, u in enumerate(src.standard_monomials):
            e = tuple(x + y for x, y in zip(u, t))
            j = tgt.ambient.index(e)
            for r in range(tgt.dim):
                cols_acc[r][i] = fld.add(cols_acc[r][i], fld.mul(c, tgt.projector.entry(r, j)))
    return MultiplicationMap(ctx, g, a, Matrix.from_rows(fld, cols_acc, cols=src.dim))


def action_matrix(ctx: JacobianContext, a: int, b: int) -> Matrix:
    """Stacked action of R^a on R^b: column i is vec(mult by the i-th
    standard monomial of R^a, as a map R^b -> R^{a+b})."""
    src_a = ctx.piece(a)
    src_b = ctx.piece(b)
    tgt = ctx.piece(a + b)
    fld = ctx.field
    check_dense_budget(tgt.dim * src_b.dim, max(src_a.dim, 1), what="stacked multiplication action")
    if fld.is_prime_field:
        out = np.zeros((tgt.dim * src_b.dim, src_a.dim), dtype=np.int64)
        proj = tgt.projector.array
        for i, mi in enumerate(src_a.standard_monomials):
            cols = [tgt.ambient.index(tuple(x + y for x, y in zip(u, mi))) for u in src_b.standard_monomials]
            if cols:
                # vec of the (tgt.dim x src_b.dim) map, row-major
                out[:, i] = proj[:, cols].T.ravel()
        return Matrix.from_array(fld, out)
    rows: list[list[Scalar]] = [[fld.zero()] * src_a.dim for _ in range(tgt.dim * src_b.dim)]
    for i, mi in enumerate(src_a.standard_monomials):
        for u_idx, u in enumerate(src_b.standard_monomials):
            e = tuple(x + y for x, y in zip(u, mi))
            j = tgt.ambient.index(e)
            for r in range(tgt.dim):
                rows[u_idx * tgt.dim + r][i] = tgt.projector.entry(r, j)
    return Matrix.from_rows(fld, rows, cols=src_a.dim)


def macaulay_injectivity_check(ctx: JacobianContext, a: int, b: int) -> bool:
    """Whether R^a -> Hom(R^b, R^{a+b}) by multiplication is injective."""
    dim_a = ctx.piece(a).dim
    if dim_a == 0:
        return True
    return action_matrix(ctx, a, b).rank() == dim_a


def socle_check(ctx: JacobianContext) -> bool:
    """dim R^sigma == 1 and dim R^(sigma+1) == 0 for sigma = (n+2)(d-2)."""
    sigma = ctx.socle_degree
    amb_dim = graded_dimension(ctx.num_vars, sigma + 1)
    if amb_dim > SOCLE_DIMENSION_GUARD:
        raise BudgetExceededError(
            f"socle check needs the degree-{sigma + 1} piece of dimension {amb_dim}, "
            f"beyond the guard of {SOCLE_DIMENSION_GUARD}"
        )
    return ctx.piece(sigma).dim == 1 and ctx.piece(sigma + 1).dim == 0


@dataclass(frozen=True)
class SmoothnessProbe:
    """Outcome of random-point singularity probing.

    ``consistent`` is False when a rational point of the hypersurface with
    vanishing gradient was found (a definite singularity over F_p);
    True only means no witness was found among the sampled points.
    """

    consistent: bool
    points_checked: int


def smoothness_probe(ctx: JacobianContext, trials: int = 12, seed=0) -> SmoothnessProbe:
    """Search random lines for hypersurface points with vanishing gradient."""
    fld = ctx.field
    if not fld.is_prime_field:
        raise PreconditionError("the probe samples points over a prime field")
    p = fld.modulus
    nv = ctx.num_vars
    rng = np.random.default_rng((_int_seed(seed), 0x51E))
    checked = 0
    ts = np.arange(p, dtype=np.int64)
    for _ in range(trials):
        u = [int(x) for x in rng.integers(0, p, size=nv)]
        v = [int(x) for x in rng.integers(0, p, size=nv)]
        coeffs = _line_restriction(ctx.f, u, v)
        vals = np.zeros(p, dtype=np.int64)
        power = np.ones(p, dtype=np.int64)
        for c in coeffs:
            if c:
                vals = (vals + c * power) % p
            power = (power * ts) % p
        for t0 in np.nonzero(vals == 0)[0]:
            pt = [(ui + int(t0) * vi) % p for ui, vi in zip(u, v)]
            if all(x == 0 for x in pt):
                continue
            checked += 1
            grads = [g.evaluate(pt) for g in ctx.generators]
            if all(gv == 0 for gv in grads):
                return SmoothnessProbe(False, checked)
    return SmoothnessProbe(True, checked)


def _int_seed(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    raise PreconditionError("seed must be an integer")


def _line_restriction(f: HomogeneousPoly, u: Sequence[int], v: Sequence[int]) -> list[int]:
    """Coefficients of t -> f(u + t v) over F_p, exact."""
    p = f.field.modulus
    out = [0] * (f.degree + 1)
    for e, c in f.terms():
        # product over variables of (u_i + t v_i)^{e_i}
        poly = [int(c) % p]
        for ui, vi, k in zip(u, v, e):
            for _ in range(k):
                nxt = [0] * (len(poly) + 1)
                for idx, a in enumerate(poly):
                    if a:
                        nxt[idx] = (nxt[idx] + a * ui) % p
                        nxt[idx + 1] = (nxt[idx + 1] + a * vi) % p
                poly = nxt
        for idx, a in enumerate(poly):
            out[idx] = (out[idx] + a) % p
    return out


def graded_table(ctx: JacobianContext, degrees: Sequence[int]) -> list[dict]:
    """Rows of {m, dimS, dimJ, dimR} for the requested degrees."""
    rows = []
    for m in degrees:
        piece = ctx.piece(m)
        rows.append(
            {
                "m": int(m),
                "dimS": piece.ambient.dim,
                "dimJ": piece.ideal_rank,
                "dimR": piece.dim,
            }
        )
    return rows
