"""Constructions of the catalog lattices and groups, and file loaders.

Shipped JSON files under ``catalog/`` are produced by :func:`build_catalog`
and carry a ``provenance`` string describing the construction.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .exactlinalg import RatMatrix, hnf, int_kernel
from .groups import ClassData, signed_permutation_class_data, signed_permutation_generators
from .lattice import Lattice

__all__ = [
    "CatalogError",
    "cartan_matrix",
    "integer_lattice",
    "golay_code",
    "reed_muller_1_4",
    "k12_gram",
    "bw16_gram",
    "leech_gram",
    "d4_automorphism_generators",
    "catalog_dir",
    "resolve",
    "load_lattice",
    "load_generators",
    "load_class_data",
    "build_catalog",
]


class CatalogError(ValueError):
    pass


def cartan_matrix(kind: str) -> list[list[int]]:
    """Cartan matrix of a simply-laced root system (A_n, D_n, E6, E7, E8)."""
    t, r = kind[0].upper(), int(kind[1:])
    C = [[2 * (i == j) for j in range(r)] for i in range(r)]

    def link(a: int, b: int) -> None:
        C[a][b] = C[b][a] = -1

    if t == "A":
        for i in range(r - 1):
            link(i, i + 1)
    elif t == "D" and r >= 3:
        for i in range(r - 2):
            link(i, i + 1)
        link(r - 3, r - 1)
    elif t == "E" and r in (6, 7, 8):
        # chain 0-1-2-...-(r-2) with the branch node r-1 attached to node 2
        for i in range(r - 2):
            link(i, i + 1)
        link(2, r - 1)
    else:
        raise CatalogError(f"unknown root system {kind}")
    return C


def integer_lattice(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _lattice_from_congruences(rows: list[list[int]], moduli: list[int]) -> list[list[int]]:
    """HNF basis of ``{x in Z^n : rows[i] . x = 0 mod moduli[i]}``."""
    n = len(rows[0])
    m = len(rows)
    big = [list(r) + [mod * int(i == j) for j in range(m)] for i, (r, mod) in enumerate(zip(rows, moduli))]
    ker = int_kernel(big)
    return hnf([k[:n] for k in ker]).int_rows()


def _gram(B: list[list[int]], Q: np.ndarray, scale: int) -> list[list[int]]:
    Bo = np.array(B, dtype=object)
    G = Bo @ np.array(Q, dtype=object) @ Bo.T
    out = [[Fraction(int(x), scale) for x in r] for r in G]
    if any(x.denominator != 1 for r in out for x in r):
        raise CatalogError("scaled Gram matrix is not integral")
    return [[int(x) for x in r] for r in out]


def k12_gram() -> list[list[int]]:
    """Coxeter-Todd lattice from Eisenstein 6-tuples.

    ``x in Z[w]^6`` with all coordinates congruent modulo ``theta = w - w^2``
    and coordinate sum divisible by 3.  Coordinates ``a + b w`` are stored as
    ``(a, b)``; the real form is ``2 Re(x conj(y))`` (blocks ``[[2,-1],[-1,2]]``),
    divided by 3 so the minimum is 4.
    """
    rows, mods = [], []
    # x mod theta is a + b mod 3 (w = 1 mod theta)
    for i in range(1, 6):
        r = [0] * 12
        r[0] = r[1] = -1
        r[2 * i] = r[2 * i + 1] = 1
        rows.append(r)
        mods.append(3)
    rows.append([1 if k % 2 == 0 else 0 for k in range(12)])
    mods.append(3)
    rows.append([1 if k % 2 == 1 else 0 for k in range(12)])
    mods.append(3)
    B = _lattice_from_congruences(rows, mods)
    Q = np.zeros((12, 12), dtype=np.int64)
    for i in range(6):
        Q[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[2, -1], [-1, 2]]
    return _gram(B, Q, 3)


def reed_muller_1_4() -> list[list[int]]:
    """Generator rows of the first-order Reed-Muller code of length 16."""
    pts = [[(p >> k) & 1 for k in range(4)] for p in range(16)]
    return [[1] * 16] + [[pt[k] for pt in pts] for k in range(4)]


def _rm_parity_checks() -> list[list[int]]:
    # the dual of RM(1,4) is RM(2,4): monomials of degree <= 2
    pts = [[(p >> k) & 1 for k in range(4)] for p in range(16)]
    out = [[1] * 16]
    out += [[pt[k] for pt in pts] for k in range(4)]
    out += [[pt[a] * pt[b] for pt in pts] for a in range(4) for b in range(a + 1, 4)]
    return out


def bw16_gram() -> list[list[int]]:
    """Barnes-Wall lattice: ``x mod 2`` in RM(1,4) and coordinate sum divisible by 4, halved."""
    rows = _rm_parity_checks() + [[1] * 16]
    mods = [2] * 11 + [4]
    B = _lattice_from_congruences(rows, mods)
    return _gram(B, np.eye(16, dtype=np.int64), 2)


def golay_code() -> list[list[int]]:
    """Generator rows of the extended binary Golay code.

    Cyclic (23, 12) code from ``g(x) = 1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11``,
    extended by an overall parity bit.
    """
    g = [0] * 23
    for e in (0, 2, 4, 5, 6, 10, 11):
        g[e] = 1
    rows = []
    for s in range(12):
        r = [g[(k - s) % 23] for k in range(23)]
        rows.append(r + [sum(r) % 2])
    return rows


def _span_gf2(rows: list[list[int]]) -> list[list[int]]:
    words = {tuple([0] * len(rows[0]))}
    for r in rows:
        words |= {tuple((a + b) % 2 for a, b in zip(w, r)) for w in words}
    return [list(w) for w in sorted(words)]


def leech_gram() -> list[list[int]]:
    """Leech lattice scaled by ``sqrt 8``: spanned by ``2 * octads``, ``4 e_i +- 4 e_j``
    and ``(-3, 1^23)``; Gram divided by 8 (minimum 4, determinant 1)."""
    octads = [w for w in _span_gf2(golay_code()) if sum(w) == 8]
    gens = [[2 * x for x in w] for w in octads]
    for i in range(1, 24):
        for s in (1, -1):
            v = [0] * 24
            v[0], v[i] = 4, 4 * s
            gens.append(v)
    gens.append([-3] + [1] * 23)
    B = hnf(gens).int_rows()
    return _gram(B, np.eye(24, dtype=np.int64), 8)


def d4_automorphism_generators() -> list[RatMatrix]:
    """Signed permutations of R^4 plus the Hadamard-type reflection product; in
    Euclidean coordinates where D4 is the set of even-sum integer vectors."""
    h = Fraction(1, 2)
    H = RatMatrix.from_rows([[h, h, h, h], [h, h, -h, -h], [h, -h, h, -h], [h, -h, -h, h]])
    return signed_permutation_generators(4) + [H]


# -- files ---------------------------------------------------------------
def catalog_dir() -> Path:
    return Path(str(resources.files("vexillar") / "catalog"))


def resolve(name_or_path: str) -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    for cand in (catalog_dir() / name_or_path, catalog_dir() / f"{name_or_path.lower()}.json"):
        if cand.exists():
            return cand
    raise CatalogError(f"no such catalog entry or file: {name_or_path}")


def _read(path) -> dict:
    try:
        with open(resolve(str(path))) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed JSON in {path}: {exc}") from exc


def load_lattice(path) -> Lattice:
    obj = _read(path)
    try:
        gram = [[Fraction(x) for x in row] for row in obj["gram"]]
        n = int(obj.get("n", len(gram)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad lattice file {path}: {exc}") from exc
    if len(gram) != n or any(len(r) != n for r in gram):
        raise CatalogError(f"Gram matrix in {path} is not {n} x {n}")
    try:
        return Lattice(RatMatrix.from_rows(gram), obj.get("name", ""), obj.get("scale_note", ""))
    except ValueError as exc:
        raise CatalogError(f"invalid Gram matrix in {path}: {exc}") from exc


def load_generators(path) -> tuple[int, list[RatMatrix]]:
    obj = _read(path)
    try:
        n = int(obj["n"])
        gens = [RatMatrix.from_rows([[Fraction(x) for x in r] for r in g]) for g in obj["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad generator file {path}: {exc}") from exc
    if any(g.shape != (n, n) for g in gens):
        raise CatalogError("generator size does not match n")
    return n, gens


def load_class_data(path) -> ClassData:
    try:
        return ClassData.from_json(_read(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad class-data file {path}: {exc}") from exc


def _lattice_entry(name: str, gram, note: str, provenance: str) -> dict:
    return {"name": name, "n": len(gram), "gram": gram, "scale_note": note, "provenance": provenance}


def build_catalog(target: Path | None = None) -> list[Path]:
    """Regenerate every shipped catalog file."""
    target = catalog_dir() if target is None else Path(target)
    target.mkdir(parents=True, exist_ok=True)
    entries = {
        "z2": _lattice_entry("Z2", integer_lattice(2), "standard", "identity Gram matrix"),
        "a2": _lattice_entry("A2", cartan_matrix("A2"), "roots of norm 2", "Cartan matrix"),
        "d4": _lattice_entry("D4", cartan_matrix("D4"), "roots of norm 2", "Cartan matrix"),
        "e6": _lattice_entry("E6", cartan_matrix("E6"), "roots of norm 2", "Cartan matrix"),
        "e7": _lattice_entry("E7", cartan_matrix("E7"), "roots of norm 2", "Cartan matrix"),
        "e8": _lattice_entry("E8", cartan_matrix("E8"), "roots of norm 2", "Cartan matrix"),
        "k12": _lattice_entry("K12", k12_gram(), "minimum 4, determinant 729",
                              "Eisenstein 6-tuples congruent mod theta with sum divisible by 3; real form 2Re/3"),
        "bw16": _lattice_entry("BW16", bw16_gram(), "minimum 4, determinant 256",
                               "x in Z^16 with x mod 2 in RM(1,4) and sum divisible by 4; Gram halved"),
        "leech": _lattice_entry("Leech", leech_gram(), "minimum 4, determinant 1",
                                "sqrt(8)-scaled Golay construction (2*octads, 4e_i+-4e_j, (-3,1^23)); Gram / 8"),
    }
    written = []
    for key, obj in entries.items():
        p = target / f"{key}.json"
        p.write_text(json.dumps(obj, indent=1) + "\n")
        written.append(p)
    groups = {
        "d4_aut": (4, d4_automorphism_generators(),
                   "signed permutations and a Hadamard matrix; Euclidean coordinates (D4 = even-sum vectors)"),
        "signed_perm3": (3, signed_permutation_generators(3), "hyperoctahedral group of R^3"),
        "signed_perm2": (2, signed_permutation_generators(2), "hyperoctahedral group of R^2"),
    }
    for key, (n, gens, prov) in groups.items():
        p = target / f"{key}.json"
        p.write_text(json.dumps({"n": n, "generators": [g.to_json() for g in gens], "provenance": prov}, indent=1) + "\n")
        written.append(p)
    cd = signed_permutation_class_data(8).to_json()
    cd["provenance"] = "hyperoctahedral group of R^8 from signed cycle types"
    p = target / "signed_perm8_classes.json"
    p.write_text(json.dumps(cd, indent=1) + "\n")
    written.append(p)
    return written
