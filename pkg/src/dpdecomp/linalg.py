"""Exact linear algebra over GF(p): matrices, subspaces, direct sums.

Vectors are tuples of reduced ints (column convention).  Subspaces carry a
canonical basis, the reduced column echelon form of any spanning set, so two
subspaces are equal as sets exactly when their stored bases are equal
structurally.  Matrices with zero rows or zero columns are legal throughout;
they show up as autonomous subproblem input maps.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import NotDirectSum, ShapeError
from .fields import Poly, PrimeField

Vector = tuple[int, ...]


class MatrixFp:
    """An immutable dense matrix over GF(p), entries stored row-major."""

    __slots__ = ("field", "nrows", "ncols", "entries")

    def __init__(self, field: PrimeField, nrows: int, ncols: int, entries: Iterable[int]):
        if nrows < 0 or ncols < 0:
            raise ShapeError("matrix dimensions must be nonnegative")
        ent = tuple(e % field.p for e in entries)
        if len(ent) != nrows * ncols:
            raise ShapeError(f"expected {nrows * ncols} entries, got {len(ent)}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "entries", ent)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixFp is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "MatrixFp":
        rows = [list(r) for r in rows]
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ShapeError("ragged rows")
        elif ncols is None:
            raise ShapeError("ncols required for a matrix with no rows")
        flat = [e for r in rows for e in r]
        return cls(field, len(rows), ncols, flat)

    @classmethod
    def from_cols(cls, field: PrimeField, cols: Sequence[Sequence[int]], nrows: int | None = None) -> "MatrixFp":
        cols = [list(c) for c in cols]
        if cols:
            nrows = len(cols[0])
            if any(len(c) != nrows for c in cols):
                raise ShapeError("ragged columns")
        elif nrows is None:
            raise ShapeError("nrows required for a matrix with no columns")
        flat = [cols[j][i] for i in range(nrows) for j in range(len(cols))]
        return cls(field, nrows, len(cols), flat)

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "MatrixFp":
        return cls(field, n, n, (1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, field: PrimeField, nrows: int, ncols: int) -> "MatrixFp":
        return cls(field, nrows, ncols, (0,) * (nrows * ncols))

    # -- access ------------------------------------------------------------

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(key)
        return self.entries[i * self.ncols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.ncols : (i + 1) * self.ncols]

    def col(self, j: int) -> Vector:
        return self.entries[j :: self.ncols] if self.ncols else ()

    def rows(self) -> list[Vector]:
        return [self.row(i) for i in range(self.nrows)]

    def cols(self) -> list[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    # -- arithmetic --------------------------------------------------------

    def _same_shape(self, other: "MatrixFp") -> None:
        if not isinstance(other, MatrixFp) or other.field != self.field:
            raise ValueError("matrices must share a field")
        if (other.nrows, other.ncols) != (self.nrows, self.ncols):
            raise ShapeError("shape mismatch")

    def __add__(self, other: "MatrixFp") -> "MatrixFp":
        self._same_shape(other)
        return MatrixFp(self.field, self.nrows, self.ncols,
                        (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "MatrixFp") -> "MatrixFp":
        self._same_shape(other)
        return MatrixFp(self.field, self.nrows, self.ncols,
                        (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "MatrixFp":
        return MatrixFp(self.field, self.nrows, self.ncols, (-a for a in self.entries))

    def scale(self, c: int) -> "MatrixFp":
        return MatrixFp(self.field, self.nrows, self.ncols, (c * a for a in self.entries))

    def __matmul__(self, other: "MatrixFp") -> "MatrixFp":
        if not isinstance(other, MatrixFp) or other.field != self.field:
            raise ValueError("matrices must share a field")
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        p = self.field.p
        out = []
        ocols = other.cols()
        for i in range(self.nrows):
            r = self.row(i)
            for c in ocols:
                out.append(sum(a * b for a, b in zip(r, c)) % p)
        return MatrixFp(self.field, self.nrows, other.ncols, out)

    def matvec(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ncols:
            raise ShapeError(f"vector length {len(v)} vs {self.ncols} columns")
        p = self.field.p
        return tuple(sum(a * b for a, b in zip(self.row(i), v)) % p for i in range(self.nrows))

    def __pow__(self, k: int) -> "MatrixFp":
        if self.nrows != self.ncols:
            raise ShapeError("matrix power needs a square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = MatrixFp.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "MatrixFp":
        return MatrixFp(self.field, self.ncols, self.nrows,
                        (self.entries[i * self.ncols + j]
                         for j in range(self.ncols) for i in range(self.nrows)))

    def hstack(self, other: "MatrixFp") -> "MatrixFp":
        if other.nrows != self.nrows or other.field != self.field:
            raise ShapeError("hstack needs equal row counts over one field")
        ent = []
        for i in range(self.nrows):
            ent.extend(self.row(i))
            ent.extend(other.row(i))
        return MatrixFp(self.field, self.nrows, self.ncols + other.ncols, ent)

    def vstack(self, other: "MatrixFp") -> "MatrixFp":
        if other.ncols != self.ncols or other.field != self.field:
            raise ShapeError("vstack needs equal column counts over one field")
        return MatrixFp(self.field, self.nrows + other.nrows, self.ncols,
                        self.entries + other.entries)

    # -- solved forms ------------------------------------------------------

    def rank(self) -> int:
        return rref(self)[1]

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "MatrixFp":
        if self.nrows != self.ncols:
            raise ShapeError("only square matrices invert")
        n = self.nrows
        if n == 0:
            return self
        aug = self.hstack(MatrixFp.identity(self.field, n))
        red, _, pivots = rref(aug)
        if pivots[:n] != tuple(range(n)):
            raise ValueError("matrix is singular")
        ent = [red[i, n + j] for i in range(n) for j in range(n)]
        return MatrixFp(self.field, n, n, ent)

    # -- comparisons and text ---------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixFp)
            and other.field == self.field
            and (other.nrows, other.ncols) == (self.nrows, self.ncols)
            and other.entries == self.entries
        )

    def __hash__(self) -> int:
        return hash((self.field, self.nrows, self.ncols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.nrows))
        return f"MatrixFp({self.nrows}x{self.ncols} mod {self.field.p}: [{body}])"


def rref(M: MatrixFp) -> tuple[MatrixFp, int, tuple[int, ...]]:
    """Reduced row echelon form: returns (rref matrix, rank, pivot columns)."""
    field = M.field
    p = field.p
    rows = [list(M.row(i)) for i in range(M.nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(M.ncols):
        if r == M.nrows:
            break
        pivot_row = next((i for i in range(r, M.nrows) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.inv(rows[r][c])
        if inv != 1:
            rows[r] = [(inv * e) % p for e in rows[r]]
        for i in range(M.nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return MatrixFp.from_rows(field, rows, ncols=M.ncols), r, tuple(pivots)


def solve_right(M: MatrixFp, b: Sequence[int]) -> Vector | None:
    """One solution x of M x = b, or None when the system is inconsistent."""
    if len(b) != M.nrows:
        raise ShapeError("right-hand side length mismatch")
    aug = M.hstack(MatrixFp.from_cols(M.field, [list(b)], nrows=M.nrows))
    red, rank, pivots = rref(aug)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [0] * M.ncols
    for i, c in enumerate(pivots):
        x[c] = red[i, M.ncols]
    return tuple(x)


class Subspace:
    """A linear subspace of GF(p)^n with a canonical echelon basis.

    Internally the basis vectors are the rows of an RREF matrix (transposed
    back to columns on demand), which makes equality, membership, and
    coordinate extraction cheap and deterministic.
    """

    __slots__ = ("field", "ambient_dim", "_rows", "_pivots")

    def __init__(self, field: PrimeField, ambient_dim: int, spanning: Iterable[Sequence[int]] = ()):
        vectors = [tuple(v) for v in spanning]
        if any(len(v) != ambient_dim for v in vectors):
            raise ShapeError("spanning vector of wrong length")
        if vectors:
            red, rank, pivots = rref(MatrixFp.from_rows(field, vectors, ncols=ambient_dim))
            rows = tuple(red.row(i) for i in range(rank))
        else:
            rows, pivots = (), ()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim)

    @classmethod
    def full(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        basis = [[1 if i == j else 0 for j in range(ambient_dim)] for i in range(ambient_dim)]
        return cls(field, ambient_dim, basis)

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    def basis_vectors(self) -> list[Vector]:
        """Canonical basis, one ambient column vector per dimension."""
        return [tuple(r) for r in self._rows]

    def basis_matrix(self) -> MatrixFp:
        """Basis as matrix columns (ambient_dim x dim)."""
        return MatrixFp.from_cols(self.field, [list(r) for r in self._rows], nrows=self.ambient_dim)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords_of(v) is not None

    def coords_of(self, v: Sequence[int]) -> Vector | None:
        """Coefficients of v in the canonical basis, or None if v is outside."""
        if len(v) != self.ambient_dim:
            raise ShapeError("vector length mismatch")
        p = self.field.p
        v = [e % p for e in v]
        coeffs = []
        for row, c in zip(self._rows, self._pivots):
            lam = v[c]
            coeffs.append(lam)
            if lam:
                for j in range(self.ambient_dim):
                    v[j] = (v[j] - lam * row[j]) % p
        if any(v):
            return None
        return tuple(coeffs)

    def from_coords(self, coeffs: Sequence[int]) -> Vector:
        if len(coeffs) != self.dim:
            raise ShapeError("coordinate length mismatch")
        p = self.field.p
        out = [0] * self.ambient_dim
        for lam, row in zip(coeffs, self._rows):
            if lam % p:
                for j in range(self.ambient_dim):
                    out[j] = (out[j] + lam * row[j]) % p
        return tuple(out)

    def vectors(self):
        """Iterate all p^dim member vectors (desk scale only)."""
        p = self.field.p
        for code in range(p**self.dim):
            coeffs = []
            c = code
            for _ in range(self.dim):
                coeffs.append(c % p)
                c //= p
            yield self.from_coords(coeffs)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis_vectors())

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and other.field == self.field
            and other.ambient_dim == self.ambient_dim
            and other._rows == self._rows
        )

    def __hash__(self) -> int:
        return hash((self.field, self.ambient_dim, self._rows))

    def __repr__(self) -> str:
        vecs = ", ".join(str(list(r)) for r in self._rows)
        return f"Subspace(dim {self.dim} of GF({self.field.p})^{self.ambient_dim}: <{vecs}>)"


def column_space(M: MatrixFp) -> Subspace:
    return Subspace(M.field, M.nrows, M.cols())


def row_space(M: MatrixFp) -> Subspace:
    return Subspace(M.field, M.ncols, M.rows())


def null_space(M: MatrixFp) -> Subspace:
    """Kernel {x : M x = 0} as a subspace of the domain."""
    red, rank, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.ncols):
        if free in pivot_set:
            continue
        v = [0] * M.ncols
        v[free] = 1
        for i, c in enumerate(pivots):
            v[c] = (-red[i, free]) % M.field.p
        basis.append(v)
    return Subspace(M.field, M.ncols, basis)


def subspace_sum(S: Subspace, T: Subspace) -> Subspace:
    if S.field != T.field or S.ambient_dim != T.ambient_dim:
        raise ShapeError("subspaces live in different ambient spaces")
    return Subspace(S.field, S.ambient_dim, S.basis_vectors() + T.basis_vectors())


def subspace_intersect(S: Subspace, T: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked system [S_basis | T_basis]."""
    if S.field != T.field or S.ambient_dim != T.ambient_dim:
        raise ShapeError("subspaces live in different ambient spaces")
    if S.dim == 0 or T.dim == 0:
        return Subspace.zero(S.field, S.ambient_dim)
    stacked = S.basis_matrix().hstack(T.basis_matrix())
    kernel = null_space(stacked)
    sbasis = S.basis_matrix()
    vectors = [sbasis.matvec(w[: S.dim]) for w in kernel.basis_vectors()]
    return Subspace(S.field, S.ambient_dim, vectors)


def preimage(M: MatrixFp, S: Subspace) -> Subspace:
    """The subspace {u : M u is a member of S} of the domain of M."""
    if S.ambient_dim != M.nrows or S.field != M.field:
        raise ShapeError("subspace must live in the codomain of M")
    if S.dim == 0:
        return null_space(M)
    stacked = M.hstack(S.basis_matrix().scale(-1))
    kernel = null_space(stacked)
    vectors = [w[: M.ncols] for w in kernel.basis_vectors()]
    return Subspace(M.field, M.ncols, vectors)


def is_independent(parts: Sequence[Subspace]) -> bool:
    """True when the parts meet only at 0, i.e. their sum is direct."""
    if not parts:
        return True
    total = sum(s.dim for s in parts)
    vectors = [b for s in parts for b in s.basis_vectors()]
    ambient = parts[0].ambient_dim
    if not vectors:
        return True
    M = MatrixFp.from_rows(parts[0].field, vectors, ncols=ambient)
    return M.rank() == total


def is_direct_sum(parts: Sequence[Subspace]) -> bool:
    """True when the parts are independent and together span the ambient space."""
    if not parts:
        return False
    ambient = parts[0].ambient_dim
    return sum(s.dim for s in parts) == ambient and is_independent(parts)


def is_invariant(A: MatrixFp, S: Subspace) -> bool:
    """True when A maps S into S."""
    if A.nrows != A.ncols or A.ncols != S.ambient_dim:
        raise ShapeError("A must be square over the ambient space of S")
    return all(S.contains(A.matvec(b)) for b in S.basis_vectors())


class DirectSumDecomposition:
    """An ordered splitting of GF(p)^n into at least two independent parts.

    Carries the change-of-basis matrix formed by concatenating part bases and
    its inverse, so component extraction is a solve done once.
    """

    __slots__ = ("field", "ambient_dim", "parts", "change_of_basis",
                 "change_of_basis_inv", "_offsets")

    def __init__(self, parts: Sequence[Subspace]):
        parts = tuple(parts)
        if len(parts) < 2:
            raise ValueError("a direct-sum splitting needs at least two parts")
        field = parts[0].field
        n = parts[0].ambient_dim
        if any(s.field != field or s.ambient_dim != n for s in parts):
            raise ShapeError("parts live in different ambient spaces")
        if sum(s.dim for s in parts) != n:
            raise NotDirectSum(
                f"part dimensions sum to {sum(s.dim for s in parts)}, ambient is {n}")
        cols = [list(b) for s in parts for b in s.basis_vectors()]
        C = MatrixFp.from_cols(field, cols, nrows=n)
        try:
            C_inv = C.inverse()
        except ValueError:
            raise NotDirectSum("parts are not independent") from None
        offsets = []
        at = 0
        for s in parts:
            offsets.append(at)
            at += s.dim
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", n)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "change_of_basis", C)
        object.__setattr__(self, "change_of_basis_inv", C_inv)
        object.__setattr__(self, "_offsets", tuple(offsets))

    def __setattr__(self, name, value):
        raise AttributeError("DirectSumDecomposition is immutable")

    @property
    def r(self) -> int:
        return len(self.parts)

    def local_coords(self, x: Sequence[int]) -> list[Vector]:
        """Per-part coordinate vectors of x in the parts' canonical bases."""
        y = self.change_of_basis_inv.matvec(x)
        out = []
        for i, s in enumerate(self.parts):
            at = self._offsets[i]
            out.append(y[at : at + s.dim])
        return out

    def component(self, i: int, x: Sequence[int]) -> Vector:
        """The projection of x onto part i along the other parts."""
        return self.parts[i].from_coords(self.local_coords(x)[i])

    def decompose_vector(self, x: Sequence[int]) -> list[Vector]:
        """All components of x; they sum back to x."""
        locals_ = self.local_coords(x)
        return [self.parts[i].from_coords(locals_[i]) for i in range(self.r)]

    def embed(self, i: int, coords: Sequence[int]) -> Vector:
        return self.parts[i].from_coords(coords)

    def projector(self, i: int) -> MatrixFp:
        """The n x n matrix of the projection onto part i along the others."""
        n = self.ambient_dim
        cols = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            cols.append(list(self.component(i, e)))
        return MatrixFp.from_cols(self.field, cols, nrows=n)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DirectSumDecomposition) and other.parts == self.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __repr__(self) -> str:
        dims = " + ".join(str(s.dim) for s in self.parts)
        return f"DirectSumDecomposition(GF({self.field.p})^{self.ambient_dim} = {dims})"


def poly_eval_matrix(f: Poly, A: MatrixFp) -> MatrixFp:
    """Evaluate a polynomial at a square matrix by Horner's rule."""
    if A.nrows != A.ncols:
        raise ShapeError("polynomial evaluation needs a square matrix")
    if f.field != A.field:
        raise ValueError("polynomial and matrix must share a field")
    n = A.nrows
    acc = MatrixFp.zeros(A.field, n, n)
    eye = MatrixFp.identity(A.field, n)
    for c in reversed(f.coeffs):
        acc = acc @ A + eye.scale(c)
    return acc
