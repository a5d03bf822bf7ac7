"""Increasing and decreasing filtrations as finitely supported subspace maps."""

from __future__ import annotations

from typing import Mapping

from .linalg import DimensionMismatch, Matrix, Subspace
from .scalars import EXACT, FieldOps


class FiltrationError(Exception):
    pass


class _BaseFiltration:
    __slots__ = ("ambient_dim", "jumps", "field")

    def __setattr__(self, *a):
        raise AttributeError("filtrations are immutable")

    @property
    def support(self) -> tuple[int, ...]:
        """Indices where the filtration changes value."""
        return tuple(k for k, _ in self.jumps)

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimension mismatch")
        return self.jumps == tuple(other.jumps) or self._eq_steps(other)

    def _eq_steps(self, other):
        ks = set(self.support) | set(other.support)
        return all(self.at(k) == other.at(k) for k in ks)

    def __hash__(self):
        raise TypeError("filtrations are not hashable")


class IncFiltration(_BaseFiltration):
    """Increasing filtration W: eventually 0 below and the full space above."""

    def __init__(self, ambient_dim: int, steps: Mapping[int, Subspace], field: FieldOps = EXACT):
        items = sorted(steps.items())
        prev = Subspace.zero(ambient_dim, field)
        jumps = []
        for k, s in items:
            if s.ambient_dim != ambient_dim:
                raise DimensionMismatch("step ambient dimension mismatch")
            if not s.contains_subspace(prev):
                raise FiltrationError(f"increasing filtration not nested at {k}")
            if s.dim != prev.dim:
                jumps.append((k, s))
                prev = s
        if prev.dim != ambient_dim:
            raise FiltrationError("increasing filtration does not exhaust the ambient space")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "jumps", tuple(jumps))
        object.__setattr__(self, "field", field)

    def at(self, k: int) -> Subspace:
        out = Subspace.zero(self.ambient_dim, self.field)
        for j, s in self.jumps:
            if j <= k:
                out = s
            else:
                break
        return out

    @property
    def length(self) -> int:
        return self.jumps[-1][0] - self.jumps[0][0] + 1

    def shift(self, ell: int) -> "IncFiltration":
        """W[ell]_j = W_{j+ell}."""
        return IncFiltration(
            self.ambient_dim, {k - ell: s for k, s in self.jumps}, self.field
        )

    def graded_dim(self, k: int) -> int:
        return self.at(k).dim - self.at(k - 1).dim

    def apply(self, g: Matrix) -> "IncFiltration":
        return IncFiltration(
            self.ambient_dim, {k: s.image(g) for k, s in self.jumps}, self.field
        )

    def conjugate(self) -> "IncFiltration":
        return IncFiltration(
            self.ambient_dim, {k: s.conjugate() for k, s in self.jumps}, self.field
        )

    def preserved_by(self, a: Matrix) -> bool:
        return all(s.contains_subspace(s.image(a)) for _, s in self.jumps)

    def graded_by(self, y: Matrix) -> bool:
        """y is a grading: W_k = E_k(y) + W_{k-1} with E_k(y) of graded dimension."""
        from .linalg import nullspace

        n = self.ambient_dim
        total = 0
        for k, s in self.jumps:
            ek = nullspace(y - Matrix.identity(n, self.field).scale(self.field.from_int(k)))
            gd = s.dim - self.at(k - 1).dim
            if ek.dim != gd or not s.contains_subspace(ek):
                return False
            total += ek.dim
        return total == n

    def __repr__(self):
        body = ", ".join(f"{k}:{s.dim}" for k, s in self.jumps)
        return f"IncFiltration({body}; n={self.ambient_dim})"


class DecFiltration(_BaseFiltration):
    """Decreasing filtration F: the full space below, eventually 0 above."""

    def __init__(self, ambient_dim: int, steps: Mapping[int, Subspace], field: FieldOps = EXACT):
        items = sorted(steps.items())
        prev = Subspace.full(ambient_dim, field)
        jumps = []
        for p, s in items:
            if s.ambient_dim != ambient_dim:
                raise DimensionMismatch("step ambient dimension mismatch")
            if not prev.contains_subspace(s):
                raise FiltrationError(f"decreasing filtration not nested at {p}")
            if s.dim != prev.dim:
                jumps.append((p, s))
                prev = s
        # F^p vanishes above the last provided index
        if prev.dim != 0:
            top = (items[-1][0] + 1) if items else 0
            jumps.append((top, Subspace.zero(ambient_dim, field)))
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "jumps", tuple(jumps))
        object.__setattr__(self, "field", field)

    def at(self, p: int) -> Subspace:
        out = Subspace.full(self.ambient_dim, self.field)
        for j, s in self.jumps:
            if j <= p:
                out = s
            else:
                break
        return out

    def apply(self, g: Matrix) -> "DecFiltration":
        """Image filtration g.F (g invertible)."""
        return DecFiltration(
            self.ambient_dim, {p: s.image(g) for p, s in self.jumps}, self.field
        )

    def conjugate(self) -> "DecFiltration":
        return DecFiltration(
            self.ambient_dim, {p: s.conjugate() for p, s in self.jumps}, self.field
        )

    def preserved_by(self, a: Matrix) -> bool:
        return all(s.contains_subspace(s.image(a)) for _, s in self.jumps)

    def map_convert(self, field: FieldOps, convert) -> "DecFiltration":
        return DecFiltration(
            self.ambient_dim,
            {
                p: Subspace(self.ambient_dim, [[convert(a) for a in v] for v in s.basis], field)
                for p, s in self.jumps
            },
            field,
        )

    def __repr__(self):
        body = ", ".join(f"{p}:{s.dim}" for p, s in self.jumps)
        return f"DecFiltration({body}; n={self.ambient_dim})"


def inc_map_convert(w: IncFiltration, field: FieldOps, convert) -> IncFiltration:
    return IncFiltration(
        w.ambient_dim,
        {
            k: Subspace(w.ambient_dim, [[convert(a) for a in v] for v in s.basis], field)
            for k, s in w.jumps
        },
        field,
    )
