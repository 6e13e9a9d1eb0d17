"""JSON document formats: systems, exact sequences, categories, families, trees.

One canonical, diff-able shape per object.  A system document uses the
top-level keys "ring", "indices", "leq", "objects", "maps"; map keys are
strings "mu->lambda" (source object first), the value a row-list matrix
with rank(lambda) rows and rank(mu) columns, acting on column vectors.
Parsers are lenient about unknown keys (so documents can carry notes) but
every semantic failure raises :class:`DocumentError` naming the offending
key, bond, or member, and parsed objects are validated before they are
returned.
"""

from __future__ import annotations

import json

from .category import CategoryError, FiniteCategory
from .coherence import EvcFun, FamilySpec, GridFun
from .linalg import GroupInvariants, IntMatrix, Ring
from .orders import QuasiOrder
from .systems import InverseSystem, SystemSES, validate_ses, validate_system
from .trees import TreeInstance, TreeStage, validate_tree


class DocumentError(ValueError):
    """A document failed to parse or validate; the message says where."""


def _fail(where: str, reason: str):
    raise DocumentError(f"{where}: {reason}")


def _need(doc, key, where, kind=None):
    if not isinstance(doc, dict):
        _fail(where, f"expected a JSON object, got {type(doc).__name__}")
    if key not in doc:
        _fail(where, f'missing key "{key}"')
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        _fail(where, f'key "{key}" has type {type(value).__name__}')
    return value


def ring_tag(ring: Ring) -> str:
    return "Z" if ring.is_integers else f"Z/{ring.modulus}"


def parse_ring(tag) -> Ring:
    if tag == "Z":
        return Ring.integers()
    if isinstance(tag, str) and tag.startswith("Z/"):
        try:
            m = int(tag[2:])
        except ValueError:
            _fail("ring", f"bad modulus in tag {tag!r}")
        if m < 2:
            _fail("ring", f"modulus must be at least 2, got {m}")
        return Ring.modular(m)
    _fail("ring", f'unknown tag {tag!r} (want "Z" or "Z/m")')


def _matrix_from_doc(rows, nrows, ncols, where) -> IntMatrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        _fail(where, "matrix must be a list of rows")
    for r in rows:
        for x in r:
            if not isinstance(x, int):
                _fail(where, f"matrix entry {x!r} is not an integer")
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        got = (len(rows), len(rows[0]) if rows else ncols)
        _fail(where, f"matrix shape {got} does not match expected {(nrows, ncols)}")
    return IntMatrix([list(r) for r in rows], ncols)


def _matrix_to_doc(m: IntMatrix) -> list:
    return [list(r) for r in m.rows]


def system_to_doc(s: InverseSystem) -> dict:
    for e in s.index.elements:
        if not isinstance(e, str) or "->" in e:
            _fail("indices", f"label {e!r} is not serializable (string without '->')")
    return {
        "ring": ring_tag(s.ring),
        "indices": list(s.index.elements),
        "leq": [[a, b] for a, b in s.index.related_pairs(include_diagonal=False)],
        "objects": {e: s.rank(e) for e in s.index.elements},
        "maps": {
            f"{mu}->{lam}": _matrix_to_doc(s.bond(lam, mu))
            for lam, mu in s.index.related_pairs(include_diagonal=False)
        },
    }


def system_from_doc(doc, where: str = "system") -> InverseSystem:
    ring = parse_ring(_need(doc, "ring", where))
    elements = _need(doc, "indices", where, list)
    if len(set(elements)) != len(elements):
        _fail(where, "duplicate index labels")
    known = set(elements)
    pairs = []
    for p in _need(doc, "leq", where, list):
        if not (isinstance(p, list) and len(p) == 2):
            _fail(where, f"leq entry {p!r} is not a pair")
        if p[0] not in known or p[1] not in known:
            _fail(where, f"leq entry {p!r} mentions an unknown label")
        pairs.append((p[0], p[1]))
    order = QuasiOrder(elements, pairs)
    objects = _need(doc, "objects", where, dict)
    ranks = {}
    for e in elements:
        if e not in objects:
            _fail(where, f"objects: no rank for {e!r}")
        r = objects[e]
        if not isinstance(r, int) or r < 0:
            _fail(where, f"objects: rank of {e!r} must be a natural number")
        ranks[e] = r
    extra = set(objects) - known
    if extra:
        _fail(where, f"objects: unknown labels {sorted(extra)}")
    bonds = {}
    for key, rows in _need(doc, "maps", where, dict).items():
        parts = key.split("->")
        if len(parts) != 2:
            _fail(where, f'map key {key!r} is not of the form "mu->lambda"')
        mu, lam = parts
        if mu not in known or lam not in known:
            _fail(where, f"map {key!r} mentions an unknown label")
        if not order.leq(lam, mu):
            _fail(where, f"map {key!r} requires {lam!r} <= {mu!r} in the order")
        bonds[(lam, mu)] = _matrix_from_doc(
            rows, ranks[lam], ranks[mu], f"{where}: map {key!r}"
        )
    try:
        system = InverseSystem(order, ring, ranks, bonds)
    except ValueError as err:
        _fail(where, str(err))
    report = validate_system(system)
    if not report.ok:
        _fail(
            where,
            f"bonds are not functorial; first bad triples: {list(report.violations[:3])}",
        )
    return system


def ses_to_doc(e: SystemSES) -> dict:
    return {
        "sub": system_to_doc(e.sub),
        "middle": system_to_doc(e.mid),
        "quotient": system_to_doc(e.quot),
        "inclusion": {k: _matrix_to_doc(m) for k, m in e.inject.items()},
        "projection": {k: _matrix_to_doc(m) for k, m in e.project.items()},
    }


def ses_from_doc(doc, where: str = "ses") -> SystemSES:
    sub = system_from_doc(_need(doc, "sub", where), f"{where}.sub")
    mid = system_from_doc(_need(doc, "middle", where), f"{where}.middle")
    quot = system_from_doc(_need(doc, "quotient", where), f"{where}.quotient")
    if not (sub.index == mid.index == quot.index):
        _fail(where, "the three systems disagree on the index order")
    if not (sub.ring == mid.ring == quot.ring):
        _fail(where, "the three systems disagree on the ring")
    inject = {}
    project = {}
    for key, store, rows_of, cols_of in (
        ("inclusion", inject, mid, sub),
        ("projection", project, quot, mid),
    ):
        table = _need(doc, key, where, dict)
        for e in mid.index.elements:
            if e not in table:
                _fail(where, f"{key}: no matrix for {e!r}")
            store[e] = _matrix_from_doc(
                table[e],
                rows_of.rank(e),
                cols_of.rank(e),
                f"{where}: {key} at {e!r}",
            )
    ses = SystemSES(sub=sub, mid=mid, quot=quot, inject=inject, project=project)
    report = validate_ses(ses)
    if not report.ok:
        _fail(where, f"not a short exact sequence: {list(report.violations[:3])}")
    return ses


def category_to_doc(cat: FiniteCategory) -> dict:
    for name in list(cat.objects) + list(cat.morphism_names):
        if not isinstance(name, str):
            _fail("category", f"label {name!r} is not a string")
    compose = []
    for g in cat.morphism_names:
        for f in cat.morphism_names:
            if cat.tgt(f) == cat.src(g):
                compose.append([g, f, cat.compose(g, f)])
    return {
        "objects": list(cat.objects),
        "morphisms": {m: [cat.src(m), cat.tgt(m)] for m in cat.morphism_names},
        "identities": dict(cat.identity),
        "compose": compose,
    }


def category_from_doc(doc, where: str = "category") -> FiniteCategory:
    objects = _need(doc, "objects", where, list)
    morphisms = {}
    for name, ends in _need(doc, "morphisms", where, dict).items():
        if not (isinstance(ends, list) and len(ends) == 2):
            _fail(where, f"morphism {name!r} endpoints {ends!r} are not a pair")
        morphisms[name] = (ends[0], ends[1])
    identities = _need(doc, "identities", where, dict)
    compose = {}
    for entry in _need(doc, "compose", where, list):
        if not (isinstance(entry, list) and len(entry) == 3):
            _fail(where, f"compose entry {entry!r} is not [after, before, result]")
        compose[(entry[0], entry[1])] = entry[2]
    try:
        return FiniteCategory(objects, morphisms, identities, compose)
    except CategoryError as err:
        _fail(where, str(err))


def evc_to_doc(f: EvcFun) -> dict:
    return {"prefix": list(f.prefix), "tail": f.tail}


def evc_from_doc(doc, where: str = "function") -> EvcFun:
    prefix = _need(doc, "prefix", where, list)
    tail = _need(doc, "tail", where, int)
    if any(not isinstance(v, int) for v in prefix):
        _fail(where, "prefix values must be integers")
    try:
        return EvcFun.of(prefix, tail)
    except ValueError as err:
        _fail(where, str(err))


def _gridfun_to_doc(phi: GridFun) -> dict:
    return {
        "carrier": evc_to_doc(phi.carrier),
        "default": phi.default,
        "exceptions": [[list(p), v] for p, v in phi.exceptions],
    }


def _gridfun_from_doc(doc, modulus: int, where: str) -> GridFun:
    carrier = evc_from_doc(_need(doc, "carrier", where), f"{where}.carrier")
    default = _need(doc, "default", where, int)
    table = {}
    for entry in _need(doc, "exceptions", where, list):
        if not (
            isinstance(entry, list)
            and len(entry) == 2
            and isinstance(entry[0], list)
            and len(entry[0]) == 2
        ):
            _fail(where, f"exception entry {entry!r} is not [[column, row], value]")
        table[tuple(entry[0])] = entry[1]
    try:
        return GridFun.make(carrier, modulus, default, table)
    except ValueError as err:
        _fail(where, str(err))


def family_to_doc(fam: FamilySpec) -> dict:
    return {
        "modulus": fam.modulus,
        "members": [_gridfun_to_doc(phi) for _, phi in fam.members],
    }


def family_from_doc(doc, where: str = "family") -> FamilySpec:
    modulus = _need(doc, "modulus", where, int)
    members = []
    for i, member in enumerate(_need(doc, "members", where, list)):
        members.append(_gridfun_from_doc(member, modulus, f"{where}.members[{i}]"))
    try:
        return FamilySpec.of(modulus, members)
    except ValueError as err:
        _fail(where, str(err))


def tree_to_doc(t: TreeInstance) -> dict:
    return {
        "modulus": t.base.modulus,
        "stages": [
            {
                "outlier": evc_to_doc(s.outlier),
                "ladder": [evc_to_doc(r) for r in s.ladder],
                "points": [list(p) for p in s.points],
            }
            for s in t.stages
        ],
        "base": _gridfun_to_doc(t.base),
    }


def tree_from_doc(doc, where: str = "tree") -> TreeInstance:
    modulus = _need(doc, "modulus", where, int)
    stages = []
    for i, stage in enumerate(_need(doc, "stages", where, list)):
        sw = f"{where}.stages[{i}]"
        outlier = evc_from_doc(_need(stage, "outlier", sw), f"{sw}.outlier")
        ladder = tuple(
            evc_from_doc(r, f"{sw}.ladder[{n}]")
            for n, r in enumerate(_need(stage, "ladder", sw, list))
        )
        points = []
        for p in _need(stage, "points", sw, list):
            if not (isinstance(p, list) and len(p) == 2):
                _fail(sw, f"point {p!r} is not a [column, row] pair")
            points.append((p[0], p[1]))
        stages.append(TreeStage(outlier, ladder, tuple(points)))
    base = _gridfun_from_doc(_need(doc, "base", where), modulus, f"{where}.base")
    t = TreeInstance(len(stages), tuple(stages), base)
    report = validate_tree(t)
    if not report.ok:
        _fail(where, f"invalid instance: {list(report.violations[:3])}")
    return t


def render_invariants(g: GroupInvariants) -> str:
    """Canonical text form: "0", or "Z^r" and "Z/d" factors joined by " + "
    with torsion in divisor-chain order."""
    parts = []
    if g.free_rank:
        parts.append(f"Z^{g.free_rank}")
    parts.extend(f"Z/{d}" for d in g.torsion)
    return " + ".join(parts) if parts else "0"


def parse_invariants(text: str) -> GroupInvariants:
    text = text.strip()
    if text == "0":
        return GroupInvariants.trivial()
    free = 0
    torsion = []
    for part in text.split("+"):
        part = part.strip()
        try:
            if part.startswith("Z^"):
                free += int(part[2:])
            elif part.startswith("Z/"):
                torsion.append(int(part[2:]))
            elif part == "Z":
                free += 1
            else:
                _fail("invariants", f"unrecognized factor {part!r}")
        except ValueError as err:
            if isinstance(err, DocumentError):
                raise
            _fail("invariants", f"bad factor {part!r}")
    try:
        return GroupInvariants(free, tuple(torsion))
    except ValueError as err:
        _fail("invariants", str(err))


def read_document(path: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError:
        _fail(path, "no such file")
    except json.JSONDecodeError as err:
        _fail(f"{path}:{err.lineno}:{err.colno}", err.msg)


def write_document(doc: dict, path: str) -> None:
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _located(parser, path):
    doc = read_document(path)
    try:
        return parser(doc)
    except DocumentError as err:
        raise DocumentError(f"{path}: {err}") from None


def parse_system(path: str) -> InverseSystem:
    return _located(system_from_doc, path)


def parse_ses(path: str) -> SystemSES:
    return _located(ses_from_doc, path)


def parse_category(path: str) -> FiniteCategory:
    return _located(category_from_doc, path)


def parse_family(path: str) -> FamilySpec:
    return _located(family_from_doc, path)


def parse_tree(path: str) -> TreeInstance:
    return _located(tree_from_doc, path)


def write_system(s: InverseSystem, path: str) -> None:
    write_document(system_to_doc(s), path)
