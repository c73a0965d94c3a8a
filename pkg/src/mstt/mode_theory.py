"""Mode theories: modes, modality expressions, 2-cells and their deciders.

Modality equivalence is decided by rewriting a flattened composite to a
normal form. Each instantiation supplies terminating, confluent rules;
completeness with respect to the semantics is not claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .errors import TypeCheckError
from .presheaf import (
    DRA,
    BaseCategory,
    ModalityIso,
    SemTwoCell,
    SemTy,
    SemTyIso,
    dra_compose,
    dra_from_atoms,
    dra_unit,
    iso_id,
)

# ---------------------------------------------------------------------------
# Syntax of modalities

ModeExpr = str


@dataclass(frozen=True)
class Unit:
    """The unit modality 𝟙; its mode is fixed by where it is used."""

    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compose:
    """``outer ⓜ inner``; inner is applied first on types, last on locks."""

    outer: "ModalityExpr"
    inner: "ModalityExpr"

    def __str__(self):
        return f"{_paren(self.outer)} o {_paren(self.inner)}"


ModalityExpr = Union[Unit, Atom, Compose]
UNIT = Unit()


def _paren(mu) -> str:
    return f"({mu})" if isinstance(mu, Compose) else str(mu)


def render_modality(mu: ModalityExpr, unicode: bool = False) -> str:
    if isinstance(mu, Unit):
        return "𝟙" if unicode else "1"
    if isinstance(mu, Atom):
        return mu.name
    sep = " ⓜ " if unicode else " o "
    parts = []
    for side in (mu.outer, mu.inner):
        s = render_modality(side, unicode)
        parts.append(f"({s})" if isinstance(side, Compose) else s)
    return sep.join(parts)


def flatten(mu: ModalityExpr) -> tuple:
    """Atom names of a composite, outermost first, units dropped."""
    if isinstance(mu, Unit):
        return ()
    if isinstance(mu, Atom):
        return (mu.name,)
    return flatten(mu.outer) + flatten(mu.inner)


def from_atoms(names) -> ModalityExpr:
    """Right-nested composite of atoms (inverse of ``flatten`` up to association)."""
    names = list(names)
    if not names:
        return UNIT
    out: ModalityExpr = Atom(names[-1])
    for n in reversed(names[:-1]):
        out = Compose(Atom(n), out)
    return out


# ---------------------------------------------------------------------------
# Two-cells

TwoCellExpr = str
ID_CELL: TwoCellExpr = "id-cell"


@dataclass(frozen=True)
class RewriteRule:
    """``⟨lhs | B⟩ ≅ ⟨rhs | B⟩`` for every B, witnessed cellwise.

    ``forward(x, v)`` maps a cell of the lhs composite at an object x of the
    codomain to a cell of the rhs composite; ``backward`` inverts it. Both
    sides must lock to the same object, so contexts need no transport.
    """

    lhs: tuple
    rhs: tuple
    forward: Callable
    backward: Callable


@dataclass(frozen=True)
class CellRule:
    """A non-trivial 2-cell ``name ∈ source ⇒ target`` on normal forms."""

    name: str
    source: tuple
    target: tuple
    transport: Callable  # (ctx, x, env in lock target) -> env in lock source


@dataclass
class ModeTheory:
    name: str
    modes: dict  # mode name -> BaseCategory
    atoms: dict  # atom name -> (dom, cod, DRA)
    rewrites: list = field(default_factory=list)
    cells: dict = field(default_factory=dict)  # cell name -> CellRule

    # -- endpoints -----------------------------------------------------------

    def check_mode(self, m: ModeExpr) -> ModeExpr:
        if m not in self.modes:
            raise TypeCheckError(f"unknown mode {m!r}", "mode")
        return m

    def dom_of(self, mu: ModalityExpr, cod: ModeExpr) -> ModeExpr:
        """Domain of ``mu`` used at codomain ``cod``; rejects ill-formed composites."""
        if isinstance(mu, Unit):
            return cod
        if isinstance(mu, Atom):
            if mu.name not in self.atoms:
                raise TypeCheckError(f"unknown modality {mu.name!r}", "modality")
            d, c, _ = self.atoms[mu.name]
            if c != cod:
                raise TypeCheckError(
                    f"modality {mu.name} has codomain {c}, expected {cod}", "modality"
                )
            return d
        mid = self.dom_of(mu.outer, cod)
        return self.dom_of(mu.inner, mid)

    def endpoints(self, mu: ModalityExpr) -> tuple:
        """``(dom, cod)`` when determined by some atom, else ``(None, None)``."""
        if isinstance(mu, Unit):
            return (None, None)
        if isinstance(mu, Atom):
            if mu.name not in self.atoms:
                raise ValueError(f"unknown modality {mu.name!r}")
            d, c, _ = self.atoms[mu.name]
            return (d, c)
        od, oc = self.endpoints(mu.outer)
        idm, ic = self.endpoints(mu.inner)
        if od is not None and ic is not None and od != ic:
            raise ValueError(f"ill-formed composite {render_modality(mu)}: {ic} vs {od}")
        dom = idm if idm is not None else od
        cod = oc if oc is not None else ic
        return (dom, cod)

    def compose(self, outer: ModalityExpr, inner: ModalityExpr) -> Compose:
        """``outer ⓜ inner``; rejected when the modes do not line up."""
        od, _ = self.endpoints(outer)
        _, ic = self.endpoints(inner)
        if od is not None and ic is not None and od != ic:
            raise ValueError(
                f"cannot compose {render_modality(outer)} after {render_modality(inner)}: "
                f"{ic} vs {od}"
            )
        return Compose(outer, inner)

    # -- deciders ------------------------------------------------------------

    def modes_equal(self, m: ModeExpr, n: ModeExpr) -> None:
        if m != n:
            raise TypeCheckError(f"modes {m} and {n} are not equal", "mode")

    def normalize(self, mu: ModalityExpr) -> tuple:
        return self._rewrite(flatten(mu))[0]

    def _rewrite(self, atoms: tuple) -> tuple:
        """Normal form plus the list of ``(position, rule)`` steps taken."""
        trace = []
        cur = tuple(atoms)
        changed = True
        while changed:
            changed = False
            for i in range(len(cur)):
                for rule in self.rewrites:
                    k = len(rule.lhs)
                    if cur[i : i + k] == rule.lhs:
                        trace.append((cur, i, rule))
                        cur = cur[:i] + rule.rhs + cur[i + k :]
                        changed = True
                        break
                if changed:
                    break
        return cur, trace

    def modalities_equivalent(
        self, mu: ModalityExpr, rho: ModalityExpr, cod: ModeExpr | None = None
    ) -> ModalityIso:
        if cod is not None:
            d1, d2 = self.dom_of(mu, cod), self.dom_of(rho, cod)
            if d1 != d2:
                raise TypeCheckError(
                    f"modalities {render_modality(mu)} and {render_modality(rho)} "
                    f"have different domains {d1}, {d2}",
                    "modality-equiv",
                )
        nf1, tr1 = self._rewrite(flatten(mu))
        nf2, tr2 = self._rewrite(flatten(rho))
        if nf1 != nf2:
            raise TypeCheckError(
                f"modalities {render_modality(mu)} and {render_modality(rho)} are not "
                f"equivalent (normal forms [{', '.join(nf1)}] vs [{', '.join(nf2)}])",
                "modality-equiv",
            )

        def closed_iso(A: SemTy) -> SemTyIso:
            return self._chain_iso(tr1, A, flatten(mu)).then(
                self._chain_iso(tr2, A, flatten(rho)).inverse()
            )

        return ModalityIso(closed_iso)

    def _atoms_dra(self, names, base: BaseCategory) -> DRA:
        return dra_from_atoms([self.atoms[n][2] for n in names], base)

    def _chain_iso(self, trace, A: SemTy, start: tuple) -> SemTyIso:
        iso = iso_id(self._atoms_dra(start, A.base).mod(A))
        for cur, i, rule in trace:
            prefix = self._atoms_dra(cur[:i], None) if i else None
            after = cur[:i] + rule.rhs + cur[i + len(rule.lhs) :]
            target = self._atoms_dra(after, A.base).mod(A)
            iso = iso.then(_lift_rule(rule, prefix, iso.target, target))
        return iso

    def check_two_cell(
        self, alpha: TwoCellExpr, mu: ModalityExpr, rho: ModalityExpr, cod: ModeExpr | None = None
    ) -> SemTwoCell:
        """Whether ``alpha ∈ mu ⇒ rho``; returns the lock transport ``lock rho → lock mu``."""
        where = f"{alpha} ∈ {render_modality(mu)} ⇒ {render_modality(rho)}"
        if cod is not None:
            d1, d2 = self.dom_of(mu, cod), self.dom_of(rho, cod)
            if d1 != d2:
                raise TypeCheckError(f"2-cell {where}: domains {d1} and {d2} differ", "two-cell")
        if alpha == ID_CELL:
            try:
                iso = self.modalities_equivalent(mu, rho)
            except TypeCheckError as e:
                raise TypeCheckError(f"2-cell {where} fails: {e.message}", "two-cell") from None
            return iso.lock_transport
        rule = self.cells.get(alpha)
        if rule is None:
            raise TypeCheckError(f"unknown 2-cell {alpha!r}", "two-cell")
        if self.normalize(mu) != rule.source or self.normalize(rho) != rule.target:
            raise TypeCheckError(
                f"2-cell {where} rejected: {alpha} goes from [{', '.join(rule.source)}] "
                f"to [{', '.join(rule.target)}]",
                "two-cell",
            )
        return SemTwoCell(rule.transport, alpha)

    # -- interpretation ------------------------------------------------------

    def interpret_mode(self, m: ModeExpr) -> BaseCategory:
        return self.modes[self.check_mode(m)]

    def interpret_modality(self, mu: ModalityExpr, cod: ModeExpr) -> DRA:
        if isinstance(mu, Unit):
            return dra_unit(self.interpret_mode(cod))
        if isinstance(mu, Atom):
            self.dom_of(mu, cod)
            return self.atoms[mu.name][2]
        mid = self.dom_of(mu.outer, cod)
        return dra_compose(self.interpret_modality(mu.outer, cod), self.interpret_modality(mu.inner, mid))


def _lift_rule(rule: RewriteRule, prefix: DRA | None, source: SemTy, target: SemTy) -> SemTyIso:
    if prefix is None:
        return SemTyIso(source, target, rule.forward, rule.backward)
    return SemTyIso(
        source,
        target,
        lambda x, v: prefix.mod_map(x, rule.forward, v),
        lambda x, v: prefix.mod_map(x, rule.backward, v),
    )


def vertical(alpha: SemTwoCell, beta: SemTwoCell) -> SemTwoCell:
    """``alpha ⓣ-vert beta`` for ``beta : κ ⇒ μ`` and ``alpha : μ ⇒ ρ``."""
    return SemTwoCell(
        lambda ctx, x, env: beta.transport(ctx, x, alpha.transport(ctx, x, env)),
        f"{alpha.label} ⓣ-vert {beta.label}",
    )


def horizontal(alpha1: SemTwoCell, alpha2: SemTwoCell, mu2: DRA, rho1: DRA) -> SemTwoCell:
    """``alpha1 ⓣ-hor alpha2 : μ1 ⓜ μ2 ⇒ ρ1 ⓜ ρ2``; needs the DRAs of μ2 and ρ1."""

    def transport(ctx, x, env):
        env2 = alpha2.transport(rho1.lock(ctx), x, env)
        return alpha1.transport(ctx, mu2.lock_obj(x), env2)

    return SemTwoCell(transport, f"{alpha1.label} ⓣ-hor {alpha2.label}")
