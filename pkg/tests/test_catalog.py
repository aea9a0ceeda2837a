import json

import pytest

from vexillar.catalog import (CatalogError, bw16_gram, build_catalog, cartan_matrix, catalog_dir, golay_code,
                              k12_gram, leech_gram, load_class_data, load_generators, load_lattice, resolve)
from vexillar.exactlinalg import det, rank_mod_p


def test_cartan_dets():
    assert [det(cartan_matrix(k)) for k in ("A2", "A3", "D4", "D5", "E6", "E7", "E8")] == [3, 4, 4, 4, 3, 2, 1]
    with pytest.raises(CatalogError):
        cartan_matrix("F4")


def test_golay_code_weights():
    rows = golay_code()
    assert rank_mod_p(rows, 2) == 12
    words = [0]
    for r in rows:
        m = int("".join(map(str, r)), 2)
        words += [w ^ m for w in words]
    hist = {}
    for w in words:
        hist[bin(w).count("1")] = hist.get(bin(w).count("1"), 0) + 1
    assert hist == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def test_constructed_grams_have_expected_invariants():
    assert det(k12_gram()) == 729 and min(r[i] for i, r in enumerate(k12_gram())) >= 4
    assert det(bw16_gram()) == 256
    assert det(leech_gram()) == 1


def test_shipped_files_match_constructions(tmp_path):
    written = build_catalog(tmp_path)
    for p in written:
        assert json.loads(p.read_text()) == json.loads((catalog_dir() / p.name).read_text())


def test_loaders():
    L = load_lattice("e8")
    assert L.n == 8 and L.det == 1
    n, gens = load_generators("d4_aut")
    assert n == 4 and len(gens) == 5
    cd = load_class_data("signed_perm8_classes")
    assert cd.order == 2 ** 8 * 40320
    with pytest.raises(CatalogError):
        resolve("no_such_lattice")


def test_bad_files(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(CatalogError):
        load_lattice(p)
    p.write_text(json.dumps({"gram": [[1, 2], [2, 1]]}))
    with pytest.raises(CatalogError):
        load_lattice(p)
    p.write_text(json.dumps({"gram": [[1, 0, 0], [0, 1]]}))
    with pytest.raises(CatalogError):
        load_lattice(p)
    p.write_text(json.dumps({"n": 2, "generators": [[[1, 0, 0]]]}))
    with pytest.raises(CatalogError):
        load_generators(p)
