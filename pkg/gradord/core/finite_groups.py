"""
Finite groups given by Cayley tables, their character tables, and a small
library of bundled groups (C_n, S_3, D_4, Q_8, A_4).

Elements are referred to by index. Bundled permutation groups are enumerated
with sympy and composed as (x∘y)(i) = x(y(i)).
"""
import logging
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy import Rational, ilcm
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import AlternatingGroup, DihedralGroup, SymmetricGroup

from gradord.core.cyclotomic import CyclotomicNumber, parse_cyclotomic
from gradord.core.exceptions import GroupDataError
from gradord.core.schemas import GroupDocument

logger = logging.getLogger(__name__)

IntMatrix = Tuple[Tuple[int, ...], ...]


class FiniteGroup:
    """
    A finite group as a Cayley table on element indices.
    """

    def __init__(self, multiplication: Sequence[Sequence[int]], name: str = "H",
                 labels: Optional[Sequence[object]] = None):
        self.name = name
        self.table = tuple(tuple(int(v) for v in row) for row in multiplication)
        self.order = len(self.table)
        self.labels = list(labels) if labels is not None else list(range(self.order))
        self._check_table()
        self.identity = self._find_identity()
        self.inverses = self._find_inverses()
        self._check_associative()
        self.element_orders = [self._element_order(x) for x in range(self.order)]
        self.exponent = int(ilcm(*self.element_orders)) if self.order > 1 else 1
        self.classes = self._conjugacy_classes()
        self.class_of = [0] * self.order
        for index, cls in enumerate(self.classes):
            for x in cls:
                self.class_of[x] = index

    # ------------------------------------------------------------------ validation

    def _check_table(self) -> None:
        n = self.order
        if n == 0:
            raise GroupDataError("A group needs at least one element")
        for row in self.table:
            if len(row) != n:
                raise GroupDataError(f"Multiplication table must be {n} x {n}")
            if sorted(row) != list(range(n)):
                raise GroupDataError("Every row of the multiplication table must be a permutation of the elements")

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        raise GroupDataError(f"Group {self.name} has no identity element")

    def _find_inverses(self) -> List[int]:
        inverses = []
        for x in range(self.order):
            candidates = [y for y in range(self.order) if self.table[x][y] == self.identity]
            if len(candidates) != 1 or self.table[candidates[0]][x] != self.identity:
                raise GroupDataError(f"Element {x} of {self.name} has no two-sided inverse")
            inverses.append(candidates[0])
        return inverses

    def _check_associative(self) -> None:
        t = self.table
        for x in range(self.order):
            for y in range(self.order):
                xy = t[x][y]
                for z in range(self.order):
                    if t[xy][z] != t[x][t[y][z]]:
                        raise GroupDataError(f"Multiplication of {self.name} is not associative at ({x},{y},{z})")

    # ------------------------------------------------------------------ structure

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inverses[x], -k
        result = self.identity
        for _ in range(k):
            result = self.table[result][x]
        return result

    def _element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    def conjugate(self, g: int, x: int) -> int:
        """g x g^{-1}."""
        return self.table[self.table[g][x]][self.inverses[g]]

    def _conjugacy_classes(self) -> List[List[int]]:
        seen = set()
        classes = []
        for x in range(self.order):
            if x in seen:
                continue
            cls = sorted({self.conjugate(g, x) for g in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def is_automorphism(self, alpha: Sequence[int]) -> bool:
        if sorted(alpha) != list(range(self.order)):
            return False
        return all(
            alpha[self.table[x][y]] == self.table[alpha[x]][alpha[y]]
            for x in range(self.order) for y in range(self.order)
        )


class CharacterTable:
    """
    Irreducible characters of a finite group as class functions with values in Q(ζ_N), N = exp(H).
    """

    def __init__(self, group: FiniteGroup, rows: Sequence[Sequence[CyclotomicNumber]],
                 names: Optional[Sequence[str]] = None,
                 schur_indices: Optional[Sequence[int]] = None,
                 realizations: Optional[Dict[int, List[IntMatrix]]] = None):
        self.group = group
        self.level = group.exponent
        self.rows = [tuple(value.lift(self.level) for value in row) for row in rows]
        self.names = list(names) if names is not None else [f"eta{i}" for i in range(len(self.rows))]
        self.schur_indices = list(schur_indices) if schur_indices is not None else [1] * len(self.rows)
        self.realizations = dict(realizations or {})
        self._check()

    def __len__(self) -> int:
        return len(self.rows)

    def value(self, row: int, element: int) -> CyclotomicNumber:
        return self.rows[row][self.group.class_of[element]]

    def degree(self, row: int) -> int:
        return int(self.rows[row][self.group.class_of[self.group.identity]].to_rational())

    def find_row(self, values: Sequence[CyclotomicNumber]) -> Optional[int]:
        values = tuple(values)
        for index, row in enumerate(self.rows):
            if row == values:
                return index
        return None

    def inner_product(self, a: int, b: int) -> CyclotomicNumber:
        """<η_a, η_b> = (1/#H) Σ_C |C| η_a(C) conj(η_b(C))."""
        total = CyclotomicNumber.zero(self.level)
        for index, cls in enumerate(self.group.classes):
            total = total + self.rows[a][index] * self.rows[b][index].conjugate() * len(cls)
        return total / self.group.order

    def _check(self) -> None:
        n_classes = len(self.group.classes)
        if len(self.rows) != n_classes:
            raise GroupDataError(f"{self.group.name} has {n_classes} classes but {len(self.rows)} characters")
        for row in self.rows:
            if len(row) != n_classes:
                raise GroupDataError(f"Character rows must have {n_classes} values")
        if len(self.schur_indices) != len(self.rows) or len(self.names) != len(self.rows):
            raise GroupDataError("Names and Schur indices must match the number of characters")

        degrees = [self.degree(row) for row in range(len(self.rows))]
        if sum(d * d for d in degrees) != self.group.order:
            raise GroupDataError(f"Sum of squared degrees {sum(d * d for d in degrees)} differs from #H = {self.group.order}")
        for a in range(len(self.rows)):
            for b in range(a, len(self.rows)):
                expected = 1 if a == b else 0
                if self.inner_product(a, b) != expected:
                    raise GroupDataError(f"Characters {self.names[a]} and {self.names[b]} violate orthogonality")

        for row, matrices in self.realizations.items():
            for x in range(self.group.order):
                trace = sum(matrices[x][i][i] for i in range(len(matrices[x])))
                if self.value(row, x) != trace:
                    raise GroupDataError(f"Realization of {self.names[row]} has the wrong trace at element {x}")


# ============================================================================
# Builders
# ============================================================================

def _compose(x: Tuple[int, ...], y: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(x[y[i]] for i in range(len(y)))


def permutation_group(name: str, group: PermutationGroup) -> FiniteGroup:
    """Cayley table of a sympy permutation group, elements sorted by their image tuples."""
    elements = sorted(tuple(g.array_form) for g in group.generate())
    index = {g: i for i, g in enumerate(elements)}
    table = [[index[_compose(x, y)] for y in elements] for x in elements]
    return FiniteGroup(table, name=name, labels=elements)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], name=f"C{n}")


def deleted_permutation_realization(group: FiniteGroup) -> List[IntMatrix]:
    """
    Integral matrices of the permutation action on the sum-zero lattice, basis e_i - e_last.
    """
    matrices = []
    for label in group.labels:
        size = len(label) - 1
        last = size
        matrix = [[0] * size for _ in range(size)]
        for i in range(size):
            if label[i] != last:
                matrix[label[i]][i] += 1
            if label[last] != last:
                matrix[label[last]][i] -= 1
        matrices.append(tuple(tuple(row) for row in matrix))
    return matrices


def _class_rows(group: FiniteGroup, functions: Sequence[Callable[[int], CyclotomicNumber]]) -> List[List[CyclotomicNumber]]:
    """Evaluate class functions on class representatives."""
    return [[f(cls[0]) for cls in group.classes] for f in functions]


def _fixed_points(label: Tuple[int, ...]) -> int:
    return sum(1 for i, image in enumerate(label) if image == i)


def cyclic_table(n: int) -> CharacterTable:
    group = cyclic_group(n)
    rows = [[CyclotomicNumber.root_of_unity(n, j * k) for j in range(n)] for k in range(n)]
    return CharacterTable(group, rows, names=[f"eta{k}" for k in range(n)])


def symmetric3_table() -> CharacterTable:
    group = permutation_group("S3", SymmetricGroup(3))
    level = group.exponent

    def rational(value):
        return CyclotomicNumber.rational(level, value)

    def sign(x):
        return rational(1 if Permutation(list(group.labels[x])).is_even else -1)

    rows = _class_rows(group, [
        lambda x: rational(1),
        sign,
        lambda x: rational(_fixed_points(group.labels[x]) - 1),
    ])
    return CharacterTable(group, rows, names=["trivial", "sign", "standard"],
                          realizations={2: deleted_permutation_realization(group)})


def dihedral4_table() -> CharacterTable:
    group = permutation_group("D4", DihedralGroup(4))
    level = group.exponent
    rotation = group.labels.index((1, 2, 3, 0))
    rotations = {group.power(rotation, k) for k in range(4)}
    half_turn = group.power(rotation, 2)

    def rational(value):
        return CyclotomicNumber.rational(level, value)

    def kind(x):
        if x == group.identity:
            return "identity"
        if x == half_turn:
            return "half_turn"
        if x in rotations:
            return "quarter_turn"
        return "vertex_reflection" if _fixed_points(group.labels[x]) else "edge_reflection"

    values = {
        "rotation": {"identity": 1, "half_turn": 1, "quarter_turn": 1, "vertex_reflection": -1, "edge_reflection": -1},
        "vertex": {"identity": 1, "half_turn": 1, "quarter_turn": -1, "vertex_reflection": 1, "edge_reflection": -1},
        "edge": {"identity": 1, "half_turn": 1, "quarter_turn": -1, "vertex_reflection": -1, "edge_reflection": 1},
        "planar": {"identity": 2, "half_turn": -2, "quarter_turn": 0, "vertex_reflection": 0, "edge_reflection": 0},
    }
    functions = [lambda x: rational(1)] + [
        (lambda x, table=table: rational(table[kind(x)])) for table in values.values()
    ]

    # Vertex k of the square sits at ±e_1, ±e_2, so a symmetry is a signed permutation matrix
    corners = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    planar = []
    for label in group.labels:
        first, second = corners[label[0]], corners[label[1]]
        planar.append(((first[0], second[0]), (first[1], second[1])))

    return CharacterTable(group, _class_rows(group, functions),
                          names=["trivial", "rotation", "vertex", "edge", "planar"],
                          realizations={4: planar})


def quaternion8_table() -> CharacterTable:
    generators = [
        Permutation([[0, 1, 3, 6], [2, 5, 7, 4]], size=8),
        Permutation([[0, 2, 3, 7], [1, 4, 6, 5]], size=8),
    ]
    group = permutation_group("Q8", PermutationGroup(generators))
    level = group.exponent
    a = group.labels.index(tuple(generators[0].array_form))
    b = group.labels.index(tuple(generators[1].array_form))
    central = group.power(a, 2)
    subgroups = [{group.power(g, k) for k in range(4)} for g in (a, b, group.mul(a, b))]

    def rational(value):
        return CyclotomicNumber.rational(level, value)

    def two_dimensional(x):
        if x == group.identity:
            return rational(2)
        return rational(-2 if x == central else 0)

    functions = [lambda x: rational(1)] + [
        (lambda x, subgroup=subgroup: rational(1 if x in subgroup else -1)) for subgroup in subgroups
    ] + [two_dimensional]
    return CharacterTable(group, _class_rows(group, functions), names=["trivial", "i", "j", "k", "two_dimensional"])


def alternating4_table() -> CharacterTable:
    group = permutation_group("A4", AlternatingGroup(4))
    level = group.exponent
    three_cycle = group.labels.index((1, 2, 0, 3))
    first_class = set(group.classes[group.class_of[three_cycle]])
    omega = CyclotomicNumber.root_of_unity(level, level // 3)

    def rational(value):
        return CyclotomicNumber.rational(level, value)

    def linear(x, power):
        if group.element_orders[x] != 3:
            return rational(1)
        return omega if (x in first_class) == (power == 1) else omega * omega

    rows = _class_rows(group, [
        lambda x: rational(1),
        lambda x: linear(x, 1),
        lambda x: linear(x, 2),
        lambda x: rational(_fixed_points(group.labels[x]) - 1),
    ])
    return CharacterTable(group, rows, names=["trivial", "omega", "omega_bar", "tetrahedral"],
                          realizations={3: deleted_permutation_realization(group)})


BUNDLED_GROUPS = {
    "S3": symmetric3_table,
    "D4": dihedral4_table,
    "Q8": quaternion8_table,
    "A4": alternating4_table,
}


@lru_cache(maxsize=None)
def bundled_table(name: str) -> CharacterTable:
    """
    Look up a bundled character table: C<n> for n ≤ 24, S3, D4, Q8 or A4.
    """
    key = name.strip().upper().replace("_", "")
    if key.startswith("C") and key[1:].isdigit():
        n = int(key[1:])
        if not 1 <= n <= 24:
            raise GroupDataError(f"Bundled cyclic groups have order 1..24 (got {n})")
        return cyclic_table(n)
    if key not in BUNDLED_GROUPS:
        raise GroupDataError(f"Unknown bundled group '{name}' (known: C<n>, {', '.join(BUNDLED_GROUPS)})")
    logger.debug("Building bundled table %s", key)
    return BUNDLED_GROUPS[key]()


def table_from_document(document: GroupDocument) -> CharacterTable:
    """Build a character table from a bundled name or explicit data."""
    if document.bundled is not None:
        return bundled_table(document.bundled)

    group = FiniteGroup(document.multiplication, name=document.name or "H")
    declared = [sorted(cls) for cls in document.classes]
    if sorted(declared) != sorted(group.classes):
        raise GroupDataError("Declared conjugacy classes do not match the multiplication table")
    # Declared value position of each class in the table's class order
    positions = [declared.index(cls) for cls in group.classes]

    rows = []
    for character in document.characters:
        if len(character.values) != len(document.classes):
            raise GroupDataError(f"Character {character.name} needs one value per class")
        values = [parse_cyclotomic(character.values[position], group.exponent) for position in positions]
        if values[group.class_of[group.identity]] != Rational(character.degree):
            raise GroupDataError(f"Character {character.name} has value {values[0]} at 1, declared degree {character.degree}")
        rows.append(values)
    return CharacterTable(
        group, rows,
        names=[c.name for c in document.characters],
        schur_indices=[c.schur_index for c in document.characters],
    )
