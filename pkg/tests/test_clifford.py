from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import as_pauli_string, circuit_unitary, dense
from qecldd.clifford import (
    CNOT,
    HY,
    SWAP,
    CliffordCircuit,
    CliffordGate,
    H,
    X,
    Z,
    conjugate,
    derive_recovery_table,
    invert_circuit,
    parse_gate,
    random_circuit,
    recovery_anticommutation_ok,
    synthesize_unencoder,
    transform_code,
    verify_unencoder,
)
from qecldd.pauli import commutes, parse_pauli
from qecldd.stabcode import CodeError, builtin_422, load_code, trivial_code

BUILTIN_UNENCODER = [
    "CNOT 1 4", "CNOT 3 1", "CNOT 4 1", "SWAP 2 3", "CNOT 2 4", "CNOT 4 2", "H 3", "H 4", "CNOT 4 3", "H 4",
]  # fmt: skip
ALT_LOGICALS_UNENCODER = ["CNOT 1 4", "CNOT 2 1", "CNOT 2 4", "CNOT 4 2", "H 3", "H 4", "CNOT 4 3", "H 4"]
# a seven-gate candidate unencoder for [[4,2,2]]
SEVEN_GATE_TARGET = [CNOT(1, 4), CNOT(2, 1), CNOT(2, 4), CNOT(4, 2), H(3), H(4), CNOT(3, 4)]


def alt_logicals_422():
    return builtin_422().with_logicals(["XIIX", "XXII"], ["ZZII", "ZIIZ"])


def oracle_conjugate(text, gates, n):
    u = circuit_unitary([(g.kind, g.qubits) for g in gates], n)
    return as_pauli_string(u @ dense(text) @ u.conj().T, n)


def test_cnot_and_h_identities():
    assert str(conjugate("XX", CliffordCircuit(2, (CNOT(1, 2),)))) == "+XI"
    assert str(conjugate("ZZ", CliffordCircuit(2, (CNOT(1, 2),)))) == "+IZ"
    assert str(conjugate("Z", CliffordCircuit(1, (H(1),)))) == "+X"


def test_hy_convention():
    c = CliffordCircuit(1, (HY(1),))
    assert str(conjugate("Y", c)) == oracle_conjugate("Y", c.gates, 1) == "+X"
    assert str(conjugate("X", c)) == "+Y"
    assert str(conjugate("Z", c)) == "-Z"


@pytest.mark.parametrize(
    "g",
    [H(1), HY(1), X(1), Z(1), H(2), HY(3), X(3), Z(2), CNOT(1, 2), CNOT(2, 1), CNOT(1, 3), CNOT(3, 2), SWAP(1, 3), SWAP(2, 3)],
    ids=str,
)
def test_single_gate_matches_dense(g):
    n = 3
    c = CliffordCircuit(n, (g,))
    for letters in product("IXYZ", repeat=n):
        for prefix in ("+", "-i"):
            text = prefix + "".join(letters)
            assert str(conjugate(text, c)) == oracle_conjugate(text, c.gates, n), text


def test_gate_order_is_application_order():
    # H then CNOT: X1 -> Z1 -> Z1; CNOT then H: X1 -> X1X2 -> Z1X2
    c = CliffordCircuit(2, (H(1), CNOT(1, 2)))
    assert str(conjugate("XI", c)) == "+ZI"
    c = CliffordCircuit(2, (CNOT(1, 2), H(1)))
    assert str(conjugate("XI", c)) == "+ZX"
    assert str(conjugate("XI", c)) == oracle_conjugate("XI", c.gates, 2)


gate_strategy = st.builds(
    lambda seed, depth: random_circuit(3, depth, np.random.default_rng(seed)),
    st.integers(0, 2**32 - 1),
    st.integers(0, 12),
)
pauli3 = st.tuples(st.sampled_from(["+", "-", "+i", "-i"]), st.text("IXYZ", min_size=3, max_size=3)).map("".join)


@settings(max_examples=60, deadline=None)
@given(gate_strategy, pauli3)
def test_random_circuit_matches_dense(c, text):
    assert str(conjugate(text, c)) == oracle_conjugate(text, c.gates, 3)


@given(gate_strategy, pauli3)
def test_invert_roundtrip(c, text):
    p = parse_pauli(text)
    assert conjugate(conjugate(p, c), invert_circuit(c)) == p


@given(gate_strategy, pauli3, pauli3)
def test_conjugation_preserves_commutation_and_products(c, a, b):
    pa, pb = parse_pauli(a), parse_pauli(b)
    ca, cb = conjugate(pa, c), conjugate(pb, c)
    assert commutes(pa, pb) == commutes(ca, cb)
    assert conjugate(pa * pb, c) == ca * cb


def test_invert_examples():
    c = CliffordCircuit(2, (CNOT(1, 2),))
    assert invert_circuit(c) == c
    assert invert_circuit(CliffordCircuit(1, (H(1),))).gates == (H(1),)


def test_circuit_unitary_matches_oracle():
    c = random_circuit(3, 15, np.random.default_rng(3))
    assert np.allclose(c.unitary(), circuit_unitary([(g.kind, g.qubits) for g in c.gates], 3))


def test_gate_validation():
    with pytest.raises(ValueError):
        CliffordGate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        CliffordGate("T", (1,))
    with pytest.raises(ValueError):
        CliffordGate("H", (0,))
    with pytest.raises(ValueError):
        CliffordCircuit(2, (H(3),))
    with pytest.raises(ValueError):
        parse_gate("CNOT 1")
    with pytest.raises(Exception):
        conjugate("XX", CliffordCircuit(3, ()))


def test_text_roundtrip():
    c = random_circuit(4, 20, np.random.default_rng(9))
    text = c.to_text()
    assert text.startswith("# qubits: 4\n")
    assert CliffordCircuit.from_text(text) == c
    assert str(parse_gate("hy 2")) == "HY 2"


# ---------------------------------------------------------------- synthesis


def test_synthesize_builtin_golden():
    c = builtin_422()
    u = synthesize_unencoder(c)
    assert [str(g) for g in u] == BUILTIN_UNENCODER
    report = verify_unencoder(c, u)
    assert report.ok
    assert [str(got) for _, _, got in report.checks] == ["+XIII", "+ZIII", "+IXII", "+IZII", "+IIZI", "+IIIZ"]


def test_synthesize_alternative_logicals_golden():
    c = alt_logicals_422()
    u = synthesize_unencoder(c)
    assert [str(g) for g in u] == ALT_LOGICALS_UNENCODER
    assert verify_unencoder(c, u).ok


def test_seven_gate_target_is_not_an_unencoder():
    # the first six gates match the synthesized circuit for the alternative
    # logicals; the tail (CNOT 3 4 instead of CNOT 4 3, H 4) leaves the
    # stabilizers on the wrong ancillas
    for code in (builtin_422(), alt_logicals_422()):
        report = verify_unencoder(code, CliffordCircuit(4, tuple(SEVEN_GATE_TARGET)))
        assert not report.ok
        labels = {label for label, _, _ in report.failures}
        assert {"stabilizer[1]", "stabilizer[2]"} <= labels
    reversed_cnots = [CNOT(*reversed(g.qubits)) if g.kind == "CNOT" else g for g in SEVEN_GATE_TARGET]
    for gates in (SEVEN_GATE_TARGET[::-1], reversed_cnots, reversed_cnots[::-1]):
        assert not verify_unencoder(alt_logicals_422(), CliffordCircuit(4, tuple(gates))).ok


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 5) for k in range(n + 1)])
def test_trivial_code_gives_empty_circuit(n, k):
    assert len(synthesize_unencoder(trivial_code(n, k))) == 0


def test_verify_empty_circuit():
    report = verify_unencoder(builtin_422(), CliffordCircuit(4, ()))
    assert not report.ok
    assert report.first_failure[0] == "logical_x[1]"
    assert verify_unencoder(trivial_code(3, 1), CliffordCircuit(3, ())).ok


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))), st.integers(0, 2**32 - 1))
def test_synthesis_on_random_codes(nk, seed):
    n, k = nk
    rng = np.random.default_rng(seed)
    code = transform_code(trivial_code(n, k), random_circuit(n, 4 * n, rng))
    u = synthesize_unencoder(code)
    assert verify_unencoder(code, u).ok
    # the image is the trivial code, so re-synthesis has identity action
    image = transform_code(code, u)
    assert image == trivial_code(n, k).with_logicals(image.logical_x, image.logical_z, image.name)
    again = synthesize_unencoder(image)
    for letters in product("XZ", range(1, n + 1)):
        p = parse_pauli("".join(letters[0] if q == letters[1] else "I" for q in range(1, n + 1)))
        assert conjugate(p, again) == p


def test_synthesis_handles_signs_and_y():
    code = load_code(dict(n=3, k=1, stabilizers=["-YYI", "ZZZ"], logical_x=["-IYX"], logical_z=["IYY"]))
    assert verify_unencoder(code, synthesize_unencoder(code)).ok


# ---------------------------------------------------------------- recovery


def test_recovery_table_422():
    c = builtin_422()
    t = derive_recovery_table(c, synthesize_unencoder(c))
    assert len(t) == 4
    assert str(t[(0, 0)]) == "+IIII"
    # XXXX = -1 only: IZII up to a stabilizer; ZZZZ = -1 only: IXII up to a stabilizer
    assert (t[(1, 0)] * parse_pauli("IZII")).cls in c.stabilizer_group
    assert (t[(0, 1)] * parse_pauli("IXII")).cls in c.stabilizer_group
    assert recovery_anticommutation_ok(c, t)


def test_candidate_recoveries_are_not_equivalent_to_derived():
    c = builtin_422()
    t = derive_recovery_table(c, synthesize_unencoder(c))
    # IIIZ and XXXI have the right syndromes but differ from the derived
    # recoveries by a logical operator, not a stabilizer
    assert c.syndrome("IIIZ") == (1, 0)
    assert c.syndrome("XXXI") == (0, 1)
    assert c.classify((t[(1, 0)] * parse_pauli("IIIZ")).cls).value == "logical"
    assert c.classify((t[(0, 1)] * parse_pauli("XXXI")).cls).value == "logical"


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1))), st.integers(0, 2**32 - 1))
def test_recovery_invariant_random_codes(nk, seed):
    n, k = nk
    code = transform_code(trivial_code(n, k), random_circuit(n, 4 * n, np.random.default_rng(seed)))
    t = derive_recovery_table(code, synthesize_unencoder(code))
    assert len(t) == 2 ** (n - k)
    assert recovery_anticommutation_ok(code, t)
    assert t[(0,) * (n - k)].cls.is_identity


def test_recovery_rejects_bad_unencoder():
    with pytest.raises(CodeError):
        derive_recovery_table(builtin_422(), CliffordCircuit(4, tuple(SEVEN_GATE_TARGET)))
