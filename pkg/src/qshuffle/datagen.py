"""Desk-scale synthetic instances for tests and benchmarks.

Chains, stars, a small orders/parts schema, and structurally aligned
unions with a controllable overlap fraction between disjunct relation
sets (overlap drives the intersection size, which is what separates the
union strategies).
"""

from __future__ import annotations

import random
from pathlib import Path

from .queries import UCQ, parse_query
from .values import Database, Relation


def _chain_query_text(num_atoms: int, head_atoms: int, union_names: list[str]) -> str:
    """Chain R1(x0,x1), R2(x1,x2), ...; the head covers the variables of
    the first `head_atoms` atoms (a connected prefix, so it stays
    free-connex)."""
    head_vars = [f"x{i}" for i in range(head_atoms + 1)]
    rules = []
    for name_prefix in union_names:
        atoms = ", ".join(f"{name_prefix}{i + 1}(x{i}, x{i + 1})" for i in range(num_atoms))
        rules.append(f"Q({', '.join(head_vars)}) :- {atoms}.")
    return " UNION ".join(rules)


def _random_pairs(rnd: random.Random, count: int, domain: int) -> list[tuple]:
    return [(rnd.randrange(domain), rnd.randrange(domain)) for _ in range(count)]


def chain_instance(
    num_atoms: int = 3,
    tuples: int = 50,
    domain: int = 12,
    head_atoms: int | None = None,
    seed: int = 0,
) -> tuple[UCQ, Database]:
    """A chain CQ over `num_atoms` binary relations of random int pairs."""
    rnd = random.Random(seed)
    head_atoms = num_atoms if head_atoms is None else head_atoms
    text = _chain_query_text(num_atoms, head_atoms, ["R"])
    rels = [
        Relation.make(f"R{i + 1}", 2, _random_pairs(rnd, tuples, domain))
        for i in range(num_atoms)
    ]
    return parse_query(text), Database.of(rels)


def star_instance(
    arms: int = 3,
    hub_tuples: int = 40,
    arm_tuples: int = 60,
    domain: int = 10,
    seed: int = 0,
    project_arms: bool = False,
) -> tuple[UCQ, Database]:
    """Hub H(a1..ak) with arm relations A_i(a_i, b_i).

    With project_arms the arm tails b_i are existential, which exercises
    the projection step while staying free-connex.
    """
    rnd = random.Random(seed)
    hub_vars = [f"a{i + 1}" for i in range(arms)]
    head = hub_vars if project_arms else hub_vars + [f"b{i + 1}" for i in range(arms)]
    atoms = [f"H({', '.join(hub_vars)})"] + [f"A{i + 1}(a{i + 1}, b{i + 1})" for i in range(arms)]
    text = f"Q({', '.join(head)}) :- {', '.join(atoms)}."
    rels = [
        Relation.make(
            "H", arms, [tuple(rnd.randrange(domain) for _ in range(arms)) for _ in range(hub_tuples)]
        )
    ]
    for i in range(arms):
        rels.append(Relation.make(f"A{i + 1}", 2, _random_pairs(rnd, arm_tuples, domain)))
    return parse_query(text), Database.of(rels)


def orders_instance(
    customers: int = 25,
    orders: int = 120,
    lines: int = 400,
    parts: int = 30,
    seed: int = 0,
) -> tuple[UCQ, Database]:
    """A small fact/dimension star: customers, orders, order lines, parts."""
    rnd = random.Random(seed)
    cust = [(c, f"nation{rnd.randrange(5)}") for c in range(customers)]
    orde = [(o, rnd.randrange(customers)) for o in range(orders)]
    line = [
        (rnd.randrange(orders), rnd.randrange(parts), rnd.randrange(1, 50))
        for _ in range(lines)
    ]
    part = [(p, f"part{p % 7}") for p in range(parts)]
    text = (
        "Q(o, c, n, p, qty, pname) :- "
        "LINE(o, p, qty), ORD(o, c), CUST(c, n), PART(p, pname)."
    )
    db = Database.of(
        [
            Relation.make("CUST", 2, cust),
            Relation.make("ORD", 2, orde),
            Relation.make("LINE", 3, line),
            Relation.make("PART", 2, part),
        ]
    )
    return parse_query(text), db


def overlapping_union(
    m: int = 2,
    num_atoms: int = 2,
    tuples: int = 60,
    domain: int = 12,
    overlap: float = 0.5,
    seed: int = 0,
) -> tuple[UCQ, Database]:
    """m structurally aligned chain disjuncts whose relations share a
    common pool of `overlap * tuples` rows; overlap 1.0 makes the
    disjuncts identical, 0.0 makes intersections empty in expectation."""
    rnd = random.Random(seed)
    prefixes = [chr(ord("A") + i) for i in range(m)]
    text = _chain_query_text(num_atoms, num_atoms, prefixes)
    shared_count = int(round(overlap * tuples))
    rels = []
    for pos in range(num_atoms):
        shared = _random_pairs(rnd, shared_count, domain)
        for prefix in prefixes:
            own = _random_pairs(rnd, tuples - shared_count, domain)
            rels.append(Relation.make(f"{prefix}{pos + 1}", 2, shared + own))
    return parse_query(text), Database.of(rels)


def disjoint_union(
    m: int = 2, num_atoms: int = 2, tuples: int = 40, domain: int = 10, seed: int = 0
) -> tuple[UCQ, Database]:
    """Aligned union with guaranteed-disjoint answer sets: each disjunct's
    values live in a private integer range."""
    rnd = random.Random(seed)
    prefixes = [chr(ord("A") + i) for i in range(m)]
    text = _chain_query_text(num_atoms, num_atoms, prefixes)
    rels = []
    for pos in range(num_atoms):
        for d, prefix in enumerate(prefixes):
            base = d * (domain + 1) * 10
            rows = [(base + a, base + b) for a, b in _random_pairs(rnd, tuples, domain)]
            rels.append(Relation.make(f"{prefix}{pos + 1}", 2, rows))
    return parse_query(text), Database.of(rels)


def write_csv_dir(db: Database, directory) -> None:
    """One headerless CSV per relation, file stem = relation symbol.

    Integer values print as digits; synthetic string values are always
    alphabetic-prefixed, so type inference round-trips.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in db.names():
        rel = db[name]
        lines = [",".join(str(v) for v in row) for row in rel.tuples]
        (directory / f"{name}.csv").write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
        )
