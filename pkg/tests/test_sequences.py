import math

import pytest

from qecldd.ldd import first_order_cancelled, ldd_group
from qecldd.pauli import generate_group
from qecldd.sequences import (
    NAMED_SEQUENCES,
    PulseLayer,
    PulseSequence,
    SequenceError,
    gray_sequence,
    named_sequence,
    phased_sequence,
    resolve_sequence,
)
from qecldd.stabcode import builtin_422

GRAY_GOLDEN = ["XIXI", "IYIY", "XIXI", "IIYY", "XIXI", "IYIY", "XIXI", "XXII"] * 2
CHAIN = [(1, 2), (2, 3), (3, 4)]


def in_group_mod_stabilizers(p, group, code):
    return any((p * s) in group for s in code.stabilizer_group.elements)


def test_gray_golden():
    seq = gray_sequence(["XIXI", "IYIY", "IIYY", "XXII"])
    assert [str(c) for c in seq.classes()] == GRAY_GOLDEN
    assert len(seq) == 16
    assert not seq.contains_z
    assert seq.closes()


def test_gray_single_generator():
    seq = gray_sequence(["X"])
    assert [l.to_text() for l in seq.layers] == ["X", "X"]
    assert seq.closes()


def test_gray_no_identity_layers_and_full_walk():
    gens = ["XIIX", "IIXX", "IIZZ", "ZIIZ"]
    seq = gray_sequence(gens)
    assert all(not c.is_identity for c in seq.classes())
    assert set(seq.frames()) == set(generate_group(gens).elements)
    assert seq.contains_z


def test_gray_errors():
    with pytest.raises(SequenceError):
        gray_sequence(["XX", "ZZ", "YY"])
    with pytest.raises(SequenceError):
        gray_sequence([])
    with pytest.raises(SequenceError):
        gray_sequence(["X", "XX"])


def test_xy4_and_ur4():
    assert named_sequence("XY4").row(1) == ["X", "Y", "X", "Y"]
    assert named_sequence("UR4").row(1) == ["X", "x", "x", "X"]
    assert first_order_cancelled(named_sequence("XY4"), "Z")
    assert first_order_cancelled(named_sequence("XY4"), "X")


def test_lxx_columns():
    seq = named_sequence("LXX")
    assert [str(c) for c in seq.classes()] == ["XIXI", "IXIX", "XIXI", "IXIX"]
    code = builtin_422()
    xx = (code.logical_x[0] * code.logical_x[1]).cls
    for c in seq.classes():
        assert in_group_mod_stabilizers(c, generate_group([xx]), code)


def test_lxy4_columns_realise_xx_yy_group():
    code = builtin_422()
    lx1, lx2, lz1, lz2 = (p.cls for p in (*code.logical_x, *code.logical_z))
    xx, zz = lx1 * lx2, lz1 * lz2
    yy = xx * zz
    target = generate_group([xx, zz])
    seq = named_sequence("LXY4")
    classes = seq.classes()
    assert in_group_mod_stabilizers(classes[0], generate_group([xx]), code)
    assert in_group_mod_stabilizers(classes[1], generate_group([yy]), code)
    assert all(in_group_mod_stabilizers(f, target, code) for f in seq.frames())


@pytest.mark.parametrize("name", ["LXX", "LXY4", "RLXX", "RLXY4", "SXY4"])
def test_staggering(name):
    seq = named_sequence(name)
    for layer in seq.layers:
        for a, b in CHAIN:
            assert layer.pulses[a - 1] is None or layer.pulses[b - 1] is None


@pytest.mark.parametrize("name,axis", [("RLXX", "X"), ("RLXY4", None)])
def test_robust_rows_are_ur4(name, axis):
    seq = named_sequence(name)
    assert len(seq) == 8
    for q in range(1, 5):
        pulses = [t for t in seq.row(q) if t != "."]
        letter = pulses[0].upper()
        assert pulses == [letter, letter.lower(), letter.lower(), letter]
        if axis:
            assert letter == axis
    assert seq.row(1) == ["X", ".", "x", ".", "x", ".", "X", "."]


@pytest.mark.parametrize("name", ["RLXX", "RLXY4", "LXX", "LXY4"])
def test_robust_columns_in_ldd_group(name):
    code = builtin_422()
    g = ldd_group(code).group
    for c in named_sequence(name).classes():
        assert in_group_mod_stabilizers(c, g, code)


def test_sxy4_contract():
    seq = named_sequence("SXY4")
    code = builtin_422()
    sl = code.stabilizer_group
    for q in range(1, 5):
        assert [t for t in seq.row(q) if t != "."] == ["X", "Y", "X", "Y"]
    for c in seq.classes():
        assert all(code.syndrome(c)[i] == 0 for i in range(2))  # columns lie in SL
    for p in ("IIZZ", "ZIIZ", "ZZII", "IZZI"):
        assert first_order_cancelled(seq, p)
    # not universal: a logical of the form ZIZI survives
    assert not first_order_cancelled(seq, "ZIZI")
    assert sl.order == 4


@pytest.mark.parametrize("name", NAMED_SEQUENCES)
def test_named_close_and_roundtrip(name):
    seq = named_sequence(name, tau=0.5)
    assert seq.closes()
    assert seq.cycle_time == pytest.approx(0.5 * len(seq))
    assert PulseSequence.from_text(seq.to_text()) == seq


def test_named_unknown():
    with pytest.raises(SequenceError):
        named_sequence("CPMG")


def test_layer_parse_and_class():
    layer = PulseLayer.parse("Xy.z")
    assert str(layer.cls) == "XYIZ"
    assert layer.has_z
    assert layer.pulses[1].sign == -1
    with pytest.raises(SequenceError):
        PulseLayer.parse("XQ")


def test_phased_sequence():
    seq = phased_sequence([0, 90, 180, 270])
    assert [str(c) for c in seq.classes()] == ["X", "Y", "X", "Y"]
    assert seq.row(1) == ["P0", "P90", "P180", "P270"]
    assert PulseSequence.from_text(seq.to_text()) == seq
    odd = phased_sequence([30])
    with pytest.raises(Exception):
        odd.classes()
    assert math.isclose(odd.layers[0].pulses[0].phi, math.pi / 6)


def test_text_errors():
    with pytest.raises(SequenceError, match="line 3"):
        PulseSequence.from_text("# name: a\nX.\nXQ\n")
    with pytest.raises(SequenceError):
        PulseSequence.from_text("# n: 3\nX.\n")
    with pytest.raises(SequenceError):
        PulseSequence.from_text("# name: empty\n")
    with pytest.raises(SequenceError):
        PulseSequence.from_text("X.\nX..\n")


def test_resolve(tmp_path):
    assert resolve_sequence(None) is None
    assert resolve_sequence("none") is None
    assert resolve_sequence("lxy4").name == "LXY4"
    path = tmp_path / "s.seq"
    path.write_text(named_sequence("RLXX").to_text())
    assert resolve_sequence(str(path), tau=1.0).tau == 1.0
    with pytest.raises(SequenceError):
        resolve_sequence(str(tmp_path / "missing.seq"))
