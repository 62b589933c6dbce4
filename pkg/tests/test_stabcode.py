import json
from itertools import product

import numpy as np
import pytest

from oracles import dense
from qecldd.pauli import enumerate_classes, parse_pauli
from qecldd.stabcode import (
    CodeError,
    ErrorClass,
    PartitionCensus,
    builtin_422,
    classify_error,
    compute_distance,
    load_code,
    logical_classes,
    partition_census,
    read_code,
    syndrome,
    trivial_code,
)

FIVE_QUBIT = dict(
    n=5,
    k=1,
    stabilizers=["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
    logical_x=["XXXXX"],
    logical_z=["ZZZZZ"],
)
REPETITION = dict(n=3, k=1, stabilizers=["ZZI", "IZZ"], logical_x=["XXX"], logical_z=["ZII"])


def test_builtin_422():
    c = builtin_422()
    assert (c.n, c.k) == (4, 2)
    assert [str(s) for s in c.stabilizers] == ["+XXXX", "+ZZZZ"]
    assert [str(p) for p in c.logical_x] == ["+XIIX", "+IIXX"]
    assert [str(p) for p in c.logical_z] == ["+IIZZ", "+ZIIZ"]


@pytest.mark.parametrize(
    "record,msg",
    [
        (dict(n=2, k=0, stabilizers=["XI", "ZI"]), "anticommute"),
        (dict(n=2, k=0, stabilizers=["ZZ", "-ZZ"]), "-I"),
        (dict(n=2, k=0, stabilizers=["ZZ", "ZZ"]), "independent"),
        (dict(n=2, k=0, stabilizers=["ZZ"]), "expected 2"),
        (dict(n=2, k=1, stabilizers=["+iZZ"], logical_x=["XX"], logical_z=["ZI"]), "Hermitian"),
        (dict(n=2, k=1, stabilizers=["ZZ"], logical_x=["XI"], logical_z=["ZI"]), "anticommutes with stabilizer"),
        (dict(n=2, k=1, stabilizers=["ZZ"], logical_x=["XX"], logical_z=["ZZ"]), "canonical"),
        (dict(n=2, k=1, stabilizers=["ZZZ"], logical_x=["XX"], logical_z=["ZI"]), "qubits"),
        (dict(n=3, k=4), "k must be"),
        (dict(n=0, k=0), "n must be"),
    ],
)
def test_validation(record, msg):
    with pytest.raises(CodeError, match=msg):
        load_code(record)


def test_minus_identity_from_three_generators():
    # XX * ZZ = -YY, so adding YY gives -I
    with pytest.raises(CodeError, match="-I"):
        load_code(dict(n=3, k=0, stabilizers=["XXI", "ZZI", "YYI"]))


def test_signed_stabilizers_accepted():
    c = load_code(dict(n=2, k=0, stabilizers=["-ZI", "IZ"]))
    assert c.stabilizers[0].sign == -1


def test_logical_pairing_across_pairs():
    with pytest.raises(CodeError):
        load_code(dict(n=2, k=2, logical_x=["XI", "IX"], logical_z=["ZI", "ZX"]))


def test_census_422():
    assert partition_census(builtin_422()).as_tuple() == (4, 60, 192)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 6) for k in range(n + 1)])
def test_census_trivial_matches_closed_form(n, k):
    assert partition_census(trivial_code(n, k)) == PartitionCensus.expected(n, k)


@pytest.mark.parametrize("record", [FIVE_QUBIT, REPETITION])
def test_census_other_codes(record):
    c = load_code(record)
    census = partition_census(c)
    assert census == PartitionCensus.expected(c.n, c.k)
    assert census.total == 4**c.n


def test_census_422_by_brute_force_matrices():
    c = builtin_422()
    S = [dense("IIII"), dense("XXXX"), dense("ZZZZ"), -dense("XXXX") @ dense("ZZZZ")]
    counts = {"S": 0, "L": 0, "D": 0}
    for letters in product("IXYZ", repeat=4):
        P = dense("".join(letters))
        if any(not np.allclose(P @ s, s @ P) for s in S[1:3]):
            counts["D"] += 1
        elif any(np.allclose(P, s) or np.allclose(P, -s) for s in S):
            counts["S"] += 1
        else:
            counts["L"] += 1
    assert counts == {"S": 4, "L": 60, "D": 192}
    assert len(logical_classes(c)) == 60


@pytest.mark.parametrize(
    "p,cls",
    [
        ("IIII", ErrorClass.STABILIZER),
        ("YYYY", ErrorClass.STABILIZER),
        ("XIIX", ErrorClass.LOGICAL),
        ("ZZII", ErrorClass.LOGICAL),
        ("XIII", ErrorClass.DETECTABLE),
        ("IZII", ErrorClass.DETECTABLE),
    ],
)
def test_classify_422(p, cls):
    assert classify_error(builtin_422(), p) is cls


def test_syndrome_order_follows_generators():
    c = builtin_422()
    assert syndrome(c, "ZIII") == (1, 0)
    assert syndrome(c, "XIII") == (0, 1)
    assert syndrome(c, "YIII") == (1, 1)
    with pytest.raises(CodeError):
        c.syndrome("XX")


def test_distance():
    assert compute_distance(builtin_422()) == 2
    assert compute_distance(load_code(FIVE_QUBIT)) == 3
    assert compute_distance(trivial_code(3, 1)) == 1
    with pytest.raises(CodeError):
        compute_distance(trivial_code(3, 0))


def test_exhaustive_limit():
    c = trivial_code(9, 1)
    with pytest.raises(CodeError):
        partition_census(c)


def test_read_code_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(builtin_422().to_record()))
    assert read_code(path) == builtin_422()


def test_read_code_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "n": 4,\n  "k": \n}')
    with pytest.raises(CodeError, match=":4:"):
        read_code(bad)
    with pytest.raises(CodeError):
        read_code(tmp_path / "missing.json")
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(CodeError):
        read_code(arr)
    with pytest.raises(CodeError):
        load_code({"k": 1})


def test_stabilizer_group_members_fix_code_space():
    c = builtin_422()
    for s in c.stabilizer_group:
        assert c.in_stabilizer_group(s)
    assert len(c.stabilizer_group) == 4
    assert not c.in_stabilizer_group(parse_pauli("XIIX"))


def test_classes_partition_exactly():
    c = trivial_code(3, 1)
    seen = {cls: 0 for cls in ErrorClass}
    for p in enumerate_classes(3):
        seen[c.classify(p)] += 1
    assert sum(seen.values()) == 64
