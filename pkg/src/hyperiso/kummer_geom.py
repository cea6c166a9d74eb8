"""Level-2 geometry of the Kummer variety: 2-torsion labels, the
trope/node configuration, trope fitting from function evaluations, and the
node solver that needs only 11 evaluations in genus 2.

Labels are even subsets of the Weierstrass indices {1, ..., 2g+2} modulo
complementation, with a_i = {i, 2g+2}, a_ij = {i, j}, a_ijk = {i,j,k,2g+2}.
A node with label b lies on the trope with label a exactly when a + b is
the class of a weight <= 2 effective combination (including 0 in the
hyperelliptic cases), which reproduces the classical (16,6) and (64,29)
configurations.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .algebra import linalg
from .algebra.poly import Poly
from .curve import HyperellipticCurve, MumfordDivisor, cantor_add, random_jacobian_point
from .errors import EvalFailure, DegenerateInput, PipelineError


@dataclass(frozen=True, order=True)
class TwoTorsionLabel:
    indices: tuple  # canonical even-subset representative, sorted
    n: int          # total number of Weierstrass indices (2g+2)

    def __add__(self, other: "TwoTorsionLabel") -> "TwoTorsionLabel":
        s = set(self.indices) ^ set(other.indices)
        return _canon(s, self.n)

    def is_zero(self):
        return not self.indices


def _canon(s: set, n: int) -> TwoTorsionLabel:
    # canonical rep: the smaller of S and its complement; ties break to the
    # representative not containing the top index
    comp = set(range(1, n + 1)) - s
    if len(comp) < len(s) or (len(comp) == len(s) and n in s):
        s = comp
    return TwoTorsionLabel(tuple(sorted(s)), n)


class LabelContext:
    """All 2-torsion labels for a fixed genus, with pairing and parity."""

    def __init__(self, genus: int):
        self.genus = genus
        self.n = 2 * genus + 2
        self.zero = TwoTorsionLabel((), self.n)
        labels = set()
        for size in range(0, self.n + 1, 2):
            for comb in itertools.combinations(range(1, self.n + 1), size):
                labels.add(_canon(set(comb), self.n))
        self.all_labels = sorted(labels, key=lambda l: (len(l.indices), l.indices))
        assert len(self.all_labels) == 4 ** genus
        self._basis = self._symplectic_basis()
        self.theta_set = self._theta_set()

    # -- label constructors ---------------------------------------------------

    def from_weierstrass(self, *idx) -> TwoTorsionLabel:
        """a_i, a_ij or a_ijk from Weierstrass indices (2g+2 = infinity)."""
        s = set()
        for i in idx:
            s ^= {i}
        if len(s) % 2:
            s ^= {self.n}
        return _canon(s, self.n)

    def finite_support(self, label: TwoTorsionLabel) -> tuple:
        """Weierstrass indices of the smallest effective representative."""
        s = set(label.indices)
        if self.n in s:
            s.discard(self.n)
            return tuple(sorted(s))
        comp = set(range(1, self.n + 1)) - s
        if len(s) <= len(comp - {self.n}):
            return tuple(sorted(s))
        comp.discard(self.n)
        return tuple(sorted(comp))

    def to_divisor(self, label: TwoTorsionLabel, curve: HyperellipticCurve,
                   roots) -> MumfordDivisor:
        """Mumford divisor of the label given the sorted finite Weierstrass
        roots (roots[i-1] is r_i); needs weight <= genus."""
        sup = self.finite_support(label)
        if len(sup) > self.genus:
            raise ValueError("label has no direct Mumford form; add them instead")
        F = curve.field
        u = Poly.from_roots(F, [roots[i - 1] for i in sup])
        return MumfordDivisor(curve, u, Poly.zero(F), check=False)

    # -- pairing / characteristics ---------------------------------------------

    def pairing(self, a: TwoTorsionLabel, b: TwoTorsionLabel) -> int:
        return len(set(a.indices) & set(b.indices)) % 2

    def _symplectic_basis(self):
        cands = [l for l in self.all_labels if not l.is_zero()]
        basis = []
        global _CANON_N
        _CANON_N = self.n
        pool = list(cands)
        while len(basis) < self.genus:  # one (e_i, f_i) pair per step
            e = pool[0]
            f = next(x for x in pool if self.pairing(e, x) == 1)
            basis.append((e, f))
            newpool = []
            for z in pool:
                r = z
                if self.pairing(r, f):
                    r = r + e
                if self.pairing(r, e):
                    r = r + f
                if not r.is_zero() and r not in (x for x in newpool):
                    newpool.append(r)
            seen = set()
            pool = [z for z in newpool if not (z in seen or seen.add(z))]
        es = [e for e, _ in basis]
        fs = [f for _, f in basis]
        return (es, fs)

    def matrix_form(self, a: TwoTorsionLabel):
        """((eps_1..eps_g), (rho_1..rho_g)) w.r.t. the canonical basis."""
        es, fs = self._basis
        eps = tuple(self.pairing(a, f) for f in fs)
        rho = tuple(self.pairing(a, e) for e in es)
        return (eps, rho)

    def from_matrix(self, mat):
        eps, rho = mat
        es, fs = self._basis
        out = self.zero
        for c, e in zip(eps, es):
            if c:
                out = out + e
        for c, f in zip(rho, fs):
            if c:
                out = out + f
        return out

    def parity(self, a: TwoTorsionLabel) -> int:
        eps, rho = self.matrix_form(a)
        return sum(e * r for e, r in zip(eps, rho)) % 2

    # -- configuration ----------------------------------------------------------

    def _theta_set(self):
        """Labels of the 2-torsion points on the theta divisor."""
        out = {self.zero}
        for i in range(1, self.n):
            out.add(self.from_weierstrass(i))
        if self.genus == 3:
            for i, j in itertools.combinations(range(1, self.n), 2):
                out.add(self.from_weierstrass(i, j))
        return out

    def node_on_trope(self, node: TwoTorsionLabel, trope: TwoTorsionLabel,
                      hyperelliptic: bool = True) -> bool:
        s = node + trope
        if not hyperelliptic and s.is_zero():
            return False
        return s in self.theta_set

    def configuration_table(self, hyperelliptic: bool = True):
        """trope label -> sorted tuple of node labels on it."""
        out = {}
        for t in self.all_labels:
            out[t] = tuple(sorted(
                n for n in self.all_labels
                if self.node_on_trope(n, t, hyperelliptic)))
        return out


# -- matrix-form incidence predicates (used to cross-check the table) ----------

def incidence_g2(a_mat, b_mat) -> bool:
    """Prop-style predicate: the a' node lies on the trope of a0 + a''.

    a_mat, b_mat are ((eps1, eps2), (rho1, rho2)) for a' and a''.
    """
    cols_a = list(zip(*a_mat))
    cols_b = list(zip(*b_mat))
    eq = [ca == cb for ca, cb in zip(cols_a, cols_b)]
    return eq.count(True) == 1


def incidence_g3(a_mat, b_mat, hyperelliptic: bool,
                 a_prime_label=None, b_label_plus_a0=None) -> bool:
    """Five-condition predicate in genus 3 (matrix forms of a' and a'')."""
    cols_a = list(zip(*a_mat))
    cols_b = list(zip(*b_mat))
    if cols_a == cols_b:
        return True
    eq = [ca == cb for ca, cb in zip(cols_a, cols_b)]
    if eq.count(True) == 1:
        return True
    if hyperelliptic and a_prime_label is not None \
            and a_prime_label == b_label_plus_a0:
        return True
    return False


def derive_a0(ctx: LabelContext, hyperelliptic: bool = True):
    """The shift a0 aligning the matrix predicate with the configuration."""
    for a0 in ctx.all_labels:
        ok = True
        for trope in ctx.all_labels:
            b_mat = ctx.matrix_form(trope + a0)
            for node in ctx.all_labels:
                want = ctx.node_on_trope(node, trope, hyperelliptic)
                a_mat = ctx.matrix_form(node)
                if ctx.genus == 2:
                    got = incidence_g2(a_mat, b_mat)
                else:
                    got = incidence_g3(a_mat, b_mat, hyperelliptic,
                                       node, trope + a0 + a0)
                if got != want:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return a0
    raise PipelineError("no a0 aligns the incidence predicate")


# genus-2 configuration reference (the classical 16 x 6 table)
TABLE_G2 = {
    (1,): [(1,), (6,), (1, 2), (1, 3), (1, 4), (1, 5)],
    (2,): [(2,), (6,), (1, 2), (2, 3), (2, 4), (2, 5)],
    (3,): [(3,), (6,), (1, 3), (2, 3), (3, 4), (3, 5)],
    (4,): [(4,), (6,), (1, 4), (2, 4), (3, 4), (4, 5)],
    (5,): [(5,), (6,), (1, 5), (2, 5), (3, 5), (4, 5)],
    (6,): [(1,), (2,), (3,), (4,), (5,), (6,)],
    (1, 2): [(1,), (2,), (1, 2), (3, 4), (3, 5), (4, 5)],
    (1, 3): [(1,), (3,), (1, 3), (2, 4), (2, 5), (4, 5)],
    (1, 4): [(1,), (4,), (1, 4), (2, 3), (2, 5), (3, 5)],
    (1, 5): [(1,), (5,), (1, 5), (2, 3), (2, 4), (3, 4)],
    (2, 3): [(2,), (3,), (1, 4), (1, 5), (2, 3), (4, 5)],
    (2, 4): [(2,), (4,), (1, 3), (1, 5), (2, 4), (3, 5)],
    (2, 5): [(2,), (5,), (1, 3), (1, 4), (2, 5), (3, 4)],
    (3, 4): [(3,), (4,), (1, 2), (1, 5), (2, 5), (3, 4)],
    (3, 5): [(3,), (5,), (1, 2), (1, 4), (2, 4), (3, 5)],
    (4, 5): [(4,), (5,), (1, 2), (1, 3), (2, 3), (4, 5)],
}


def table_g2_as_labels(ctx: LabelContext):
    out = {}
    for t_idx, nodes in TABLE_G2.items():
        t = ctx.from_weierstrass(*t_idx)
        out[t] = tuple(sorted(ctx.from_weierstrass(*n) for n in nodes))
    return out


def check_configuration_against_table(ctx: LabelContext):
    derived = ctx.configuration_table(hyperelliptic=True)
    ref = table_g2_as_labels(ctx)
    for t, nodes in ref.items():
        if derived[t] != nodes:
            raise PipelineError(f"configuration drift at trope {t}")
    return True


# -- tropes and nodes -----------------------------------------------------------

@dataclass
class Trope:
    label: TwoTorsionLabel
    coeffs: tuple  # length 2^g, over the working field

    def evaluate(self, field, point):
        acc = field.zero
        for c, z in zip(self.coeffs, point):
            acc = field.add(acc, field.mul(c, z))
        return acc


@dataclass
class Node:
    label: TwoTorsionLabel
    coords: tuple  # projective, last nonzero coordinate scaled to 1

    @classmethod
    def normalized(cls, label, field, coords):
        idx = None
        for i in range(len(coords) - 1, -1, -1):
            if not field.is_zero(coords[i]):
                idx = i
                break
        if idx is None:
            raise DegenerateIntersection("zero vector is not a projective point")
        inv = field.inv(coords[idx])
        return cls(label, tuple(field.mul(inv, c) for c in coords))


class DegenerateIntersection(Exception):
    pass


class SingularSystem(Exception):
    pass


class Level2Basis:
    """An ordered basis of level-2 functions (plain or quotient-invariant),
    their labels, and the sampling utilities built on them."""

    def __init__(self, curve: HyperellipticCurve, labels, functions, y,
                 rng: random.Random, retries: int = 32):
        self.curve = curve
        self.field = curve.field
        self.labels = list(labels)
        self.functions = list(functions)
        self.y = y
        self.rng = rng
        self.retries = retries
        self.dim = len(self.functions)

    def eval_vector(self, x: MumfordDivisor):
        return [fn.value(x) for fn in self.functions]

    def eval_vector_series(self, ring, u, v):
        return [fn.value_series(ring, u, v) for fn in self.functions]

    def random_sample(self):
        """(x, values) at a fresh random point, resampling on failure."""
        for _ in range(self.retries):
            x = random_jacobian_point(self.curve, self.rng)
            try:
                return x, self.eval_vector(x)
            except (EvalFailure, DegenerateInput):
                continue
        raise PipelineError("could not sample the level-2 basis")


def fit_trope(basis: Level2Basis, target_fn, target_label,
              known_zero_coord=None) -> Trope:
    """Exact coefficients of the target function in the basis.

    Uses the y-normalization row (all functions are 1 at y) plus dim-1
    fresh sample points; the fit is verified at 2 held-out points.
    """
    F = basis.field
    dim = basis.dim
    for _ in range(basis.retries):
        try:
            rows = [[F.one] * dim]
            rhs = [F.one]
            samples = []
            for _ in range(dim - 1):
                x, vec = basis.random_sample()
                rows.append(vec)
                rhs.append(target_fn.value(x))
                samples.append(x)
            sol = linalg.solve(F, rows, rhs)
            if sol is None:
                continue
            for _ in range(2):
                x, vec = basis.random_sample()
                lhs = F.sum(F.mul(c, v) for c, v in zip(sol, vec))
                if lhs != target_fn.value(x):
                    raise SingularSystem("held-out residual nonzero")
            return Trope(target_label, tuple(sol))
        except (EvalFailure, DegenerateInput, SingularSystem):
            continue
    raise SingularSystem(f"trope fit failed for {target_label}")


def intersect_tropes(field, tropes, expect_unique: bool = True):
    """Common zero of len(coords)-1 tropes in P^(2^g-1)."""
    rows = [list(t.coeffs) for t in tropes]
    ns = linalg.nullspace(field, rows)
    if len(ns) != 1:
        raise DegenerateIntersection(
            f"trope intersection has dimension {len(ns)}")
    return ns[0]


def nodes_algorithm1(basis: Level2Basis, fns_by_label: dict,
                     label_ctx: LabelContext, roots,
                     want_za3: bool = False):
    """phi(a_1) ... phi(a_6) from 11 level-2 evaluations (13 with Z_{a_3}).

    basis must be ordered (eta_{a6}, eta_{a1}, eta_{a2}, eta_{a12});
    fns_by_label supplies the evaluators for a_35 and a_45 (and a_3 when
    the change-of-variables step wants that trope too).
    """
    F = basis.field
    curve = basis.curve
    L = label_ctx
    lbl = L.from_weierstrass
    a45_div = L.to_divisor(lbl(4, 5), curve, roots)
    f_a1 = fns_by_label[lbl(1)]
    f_a2 = fns_by_label[lbl(2)]
    f_a12 = fns_by_label[lbl(1, 2)]
    f_a35 = fns_by_label[lbl(3, 5)]
    f_a45 = fns_by_label[lbl(4, 5)]
    y_shift = cantor_add(basis.y, a45_div)
    last_exc = None
    for _ in range(basis.retries):
        z = random_jacobian_point(curve, basis.rng)
        zs = cantor_add(z, a45_div)
        try:
            ev = {}
            for name, fn in (("a1", f_a1), ("a2", f_a2), ("a12", f_a12),
                             ("a35", f_a35), ("a45", f_a45)):
                ev[name, 0] = fn.value(z)
                ev[name, 1] = fn.value(zs)
            c = F.inv(f_a35.value(y_shift))
            break
        except (EvalFailure, DegenerateInput, ZeroDivisionError) as exc:
            last_exc = exc
    else:
        raise PipelineError(f"node solver kept failing: {last_exc}")
    # shift identity: eta_{a34}(x) = c * eta_{a35}(x + a45) * eta_{a45}(x)
    ev["a34", 0] = F.mul(F.mul(c, ev["a35", 1]), ev["a45", 0])
    ev["a34", 1] = F.mul(F.mul(c, ev["a35", 0]), ev["a45", 1])
    # tropes Z_a = c2 Z2 + c3 Z3 + c4 Z4 from the two points + y-row
    rows = [[ev["a1", 0], ev["a2", 0], ev["a12", 0]],
            [ev["a1", 1], ev["a2", 1], ev["a12", 1]],
            [F.one, F.one, F.one]]
    tropes = {}
    for name, label in (("a34", lbl(3, 4)), ("a35", lbl(3, 5)),
                        ("a45", lbl(4, 5))):
        rhs = [ev[name, 0], ev[name, 1], F.one]
        sol = linalg.solve(F, rows, rhs)
        if sol is None:
            raise SingularSystem("trope system singular; resample z")
        tropes[name] = Trope(label, (F.zero,) + tuple(sol))
    z1 = Trope(lbl(6), (F.one, F.zero, F.zero, F.zero))
    k = lambda *c: tuple(F.from_int(i) for i in c)
    nodes = {
        lbl(6): Node(lbl(6), k(0, 0, 0, 1)),
        lbl(1): Node(lbl(1), k(0, 0, 1, 0)),
        lbl(2): Node(lbl(2), k(0, 1, 0, 0)),
    }
    for i, pair in ((3, ("a34", "a35")), (4, ("a34", "a45")),
                    (5, ("a35", "a45"))):
        vec = intersect_tropes(F, [z1, tropes[pair[0]], tropes[pair[1]]])
        nodes[lbl(i)] = Node.normalized(lbl(i), F, vec)
    extra_tropes = {t.label: t for t in tropes.values()}
    base_tropes = {
        lbl(6): z1,
        lbl(1): Trope(lbl(1), k(0, 1, 0, 0)),
        lbl(2): Trope(lbl(2), k(0, 0, 1, 0)),
        lbl(1, 2): Trope(lbl(1, 2), k(0, 0, 0, 1)),
    }
    extra_tropes.update(base_tropes)
    if want_za3:
        # phi(a_6) = (0:0:0:1) lies on Z_{a_3}, so its Z_4-coefficient is 0
        # and the fit runs in the span of Z_1, Z_2, Z_3 (the Z_1 values are
        # identically 1 by the normalization of the first basis function)
        f_a3 = fns_by_label[lbl(3)]
        rows3 = [[F.one, ev["a1", 0], ev["a2", 0]],
                 [F.one, ev["a1", 1], ev["a2", 1]],
                 [F.one, F.one, F.one]]
        for _ in range(basis.retries):
            try:
                rhs = [f_a3.value(z), f_a3.value(zs), F.one]
                sol = linalg.solve(F, rows3, rhs)
                if sol is None:
                    raise SingularSystem("Z_a3 system singular")
                extra_tropes[lbl(3)] = Trope(lbl(3), tuple(sol) + (F.zero,))
                break
            except (EvalFailure, DegenerateInput) as exc:
                last_exc = exc
        else:
            raise PipelineError(f"Z_a3 fit failed: {last_exc}")
    return nodes, extra_tropes


def fit_kummer_equation(basis: Level2Basis, degree: int,
                        sample_budget: int | None = None):
    """Nullspace of the degree-d monomial evaluation matrix at sampled
    image points; genus 2 degree 4 gives the single Kummer quartic."""
    F = basis.field
    dim = basis.dim
    monomials = sorted(_monomial_exponents(dim, degree), reverse=True)
    n_mon = len(monomials)
    n_samples = sample_budget if sample_budget else n_mon + 8
    rows = []
    for _ in range(n_samples):
        _, vec = basis.random_sample()
        row = []
        for expo in monomials:
            acc = F.one
            for v, e in zip(vec, expo):
                for _ in range(e):
                    acc = F.mul(acc, v)
            row.append(acc)
        rows.append(row)
    ns = linalg.nullspace(F, rows)
    return [dict(zip(monomials, vecs)) for vecs in _normalized_rows(F, ns)]


def _normalized_rows(F, rows):
    out = []
    for r in rows:
        lead = next((c for c in r if not F.is_zero(c)), None)
        if lead is None:
            continue
        inv = F.inv(lead)
        out.append([F.mul(inv, c) for c in r])
    return out


def _monomial_exponents(nvars, degree):
    if nvars == 1:
        return [(degree,)]
    out = []
    for d in range(degree + 1):
        for rest in _monomial_exponents(nvars - 1, degree - d):
            out.append((d,) + rest)
    return out


def evaluate_monomial_relation(field, relation: dict, point):
    acc = field.zero
    for expo, coeff in relation.items():
        term = coeff
        for v, e in zip(point, expo):
            for _ in range(e):
                term = field.mul(term, v)
        acc = field.add(acc, term)
    return acc
