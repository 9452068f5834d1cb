import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, brute_progressions
from vdw.certify import (
    DuplicateError,
    MalformedModel,
    ParseError,
    RangeError,
    decode_model,
    encode_partition,
    format_certificate,
    load_certificate,
    parse_certificate,
    permute_blocks,
    reflect,
    verify,
)
from vdw.dpll import Assignment
from vdw.encoder import encode_cnf, var_of
from vdw.model import Certificate, Params, Partition, Progression


def _assign(params, pairs):
    return Assignment.from_true_vars(params.num_vars, [var_of(i, b, params) for i, b in pairs])


def test_decode_model_readout():
    p = Params(2, 3, 3)
    part = decode_model(_assign(p, [(1, 1), (2, 2), (3, 1)]), p)
    assert part.blocks == (frozenset({1, 3}), frozenset({2}))


@pytest.mark.parametrize("pairs", [[(1, 1), (1, 2), (2, 1), (3, 1)], [(1, 1), (3, 2)]])
def test_decode_model_malformed(pairs):
    p = Params(2, 3, 3)
    with pytest.raises(MalformedModel):
        decode_model(_assign(p, pairs), p)


def test_decode_ignores_auxiliary_variables():
    p = Params(2, 3, 2)
    a = Assignment([True, False, False, True, True, True])
    assert decode_model(a, p).blocks == (frozenset({1}), frozenset({2}))
    with pytest.raises(MalformedModel):
        decode_model(Assignment([True, False]), p)


def test_encode_partition_examples():
    p = Params(2, 3, 1)
    assert encode_partition(Partition(1, [{1}, set()]), p).true_vars() == [1]
    p8 = Params(2, 3, 8)
    part = Partition(8, [{1, 2, 5, 6}, {3, 4, 7, 8}])
    a = encode_partition(part, p8)
    assert a.satisfies(encode_cnf(p8))
    assert decode_model(a, p8) == part


def test_encode_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        encode_partition(Partition(3, [{1, 2}, {3}]), Params(3, 3, 3))
    with pytest.raises(ValueError):
        encode_partition(Partition(3, [{1, 2}, {2}]), Params(2, 3, 3))


@settings(max_examples=100)
@given(st.integers(1, 40), st.integers(1, 5), st.randoms(use_true_random=False))
def test_decode_encode_round_trip(m, k, rnd):
    p = Params(k, 3, m)
    part = Partition.from_coloring([0] + [rnd.randint(1, k) for _ in range(m)], k)
    assert decode_model(encode_partition(part, p), p) == part


def test_verify_fixture_solution_1():
    cert = load_certificate(FIXTURES / "w4_3_75_sol1.txt")
    report = verify(cert)
    assert report.valid and report.summary() == "VALID k=4 l=3 m=75"
    assert encode_partition(cert.partition, cert.params).satisfies(encode_cnf(cert.params))


def test_verify_reports_violations_in_enumeration_order():
    cert = load_certificate(FIXTURES / "w3_5_650.txt")
    blocks = [set(b) for b in cert.partition.blocks]
    blocks[2].discard(650)
    blocks[0].add(650)
    mutated = Certificate(cert.params, Partition(650, blocks))
    report = verify(mutated)
    assert not report.valid and report.partition_valid
    assert report.block_ap_free == [False, True, True]
    assert report.violations
    # independent oracle: every reported progression is monochromatic in block 1 and contains 650
    in_block = blocks[0]
    expected = sorted((ap for ap in brute_progressions(650, 5) if set(ap) <= in_block),
                      key=lambda t: (t[1] - t[0], t[0]))
    assert [tuple(ap) for ap, _ in report.violations] == expected[:10]
    assert all(b == 1 and 650 in ap.terms() for ap, b in report.violations)
    assert report.summary().startswith("INVALID k=3 l=5 m=650")


def test_verify_caps_violations():
    cert = Certificate(Params(2, 3, 30), Partition(30, [set(range(1, 31)), set()]))
    report = verify(cert)
    assert len(report.violations) == 10
    assert report.violations[0] == (Progression(1, 1, 3), 1)
    assert report.warnings == ["block 2 is empty"]


def test_verify_reports_structure_problems():
    overlap = Certificate(Params(2, 3, 4), Partition(4, [{1, 2}, {2, 3, 4}]))
    report = verify(overlap)
    assert not report.valid and not report.partition_valid
    missing = Certificate(Params(2, 3, 8), Partition(8, [{1, 2, 6}, {3, 4, 7, 8}]))
    report = verify(missing)
    assert not report.valid
    assert any("uncovered: 5" in d for d in report.partition_defects)
    assert "not-a-partition" in report.summary()


def test_verify_empty_block_is_a_warning_only():
    cert = Certificate(Params(3, 3, 2), Partition(2, [{1, 2}, set(), set()]))
    report = verify(cert)
    assert report.valid
    assert report.warnings == ["block 2 is empty", "block 3 is empty"]


def test_render_mentions_verdict():
    cert = load_certificate(FIXTURES / "w4_3_75_sol2.txt")
    text = verify(cert).render()
    assert "verdict: valid, W(4,3) > 75" in text
    assert text.rstrip().endswith("VALID k=4 l=3 m=75")


def test_permute_blocks():
    part = Partition(3, [{1, 3}, {2}])
    assert permute_blocks(part, [1, 2]) == part
    assert permute_blocks(part, [2, 1]) == Partition(3, [{2}, {1, 3}])
    with pytest.raises(ValueError):
        permute_blocks(part, [1, 1])
    with pytest.raises(ValueError):
        permute_blocks(part, [1, 2, 3])


def test_reflect():
    part = Partition(5, [{1, 2}, {3, 4, 5}])
    assert reflect(part) == Partition(5, [{4, 5}, {1, 2, 3}])
    assert reflect(reflect(part)) == part


def test_reflected_solution_1_verifies():
    cert = load_certificate(FIXTURES / "w4_3_75_sol1.txt")
    image = Certificate(cert.params, reflect(cert.partition))
    assert image.partition != cert.partition
    assert verify(image).valid


def test_symmetry_closure_on_fixtures():
    rng = random.Random(7)
    for name in ("w4_3_75_sol1.txt", "w4_4_408.txt", "w3_5_650.txt"):
        cert = load_certificate(FIXTURES / name)
        for _ in range(5):
            pi = list(range(1, cert.params.k + 1))
            rng.shuffle(pi)
            image = Certificate(cert.params, permute_blocks(cert.partition, pi))
            assert verify(image).valid
            assert verify(Certificate(cert.params, reflect(image.partition))).valid


def test_parse_minimal():
    cert = parse_certificate("k=2\nl=3\nm=2\nBlock 1: 1\nBlock 2: 2\n")
    assert cert.params == Params(2, 3, 2)
    assert cert.partition.blocks == (frozenset({1}), frozenset({2}))


def test_parse_wrapped_and_headerless():
    text = "Block 1:\n 1 2\n5   6\n\nBlock 2: 3 4\n   7\n 8\n"
    cert = parse_certificate(text, l=3)
    assert cert.params == Params(2, 3, 8)
    assert cert.partition.blocks[0] == frozenset({1, 2, 5, 6})
    assert verify(cert).valid


def test_parse_solution_2_fixture():
    cert = load_certificate(FIXTURES / "w4_3_75_sol2.txt")
    assert cert.params == Params(4, 3, 75)
    assert 75 in cert.partition.blocks[3]
    assert cert.origin == "published Solution 2"


def test_parse_override_l():
    cert = load_certificate(FIXTURES / "w4_3_75_sol1.txt", l=4)
    assert cert.params.l == 4


def test_incomplete_cover_reaches_verify():
    cert = parse_certificate("k=2\nl=3\nm=8\nBlock 1: 1 2 6\nBlock 2: 3 4 7 8\n")
    report = verify(cert)
    assert not report.valid
    assert any("uncovered: 5" in d for d in report.partition_defects)


@pytest.mark.parametrize("text,exc,line", [
    ("k=2\nl=3\nm=4\nBlock 1: 1 2\nBlock 2: 3 9\n", RangeError, 5),
    ("k=2\nl=3\nm=4\nBlock 1: 1 2\nBlock 2: 3 2\n", DuplicateError, 5),
    ("k=2\nl=3\nm=4\nBlock 1: 1 2 2\nBlock 2: 3 4\n", DuplicateError, 4),
    ("k=2\nl=3\nm=4\nBlock 1: 1 x\nBlock 2: 3 4\n", ParseError, 4),
    ("k=2\nl=3\nm=4\nBlock 1: 1 2\n", ParseError, 4),
    ("k=2\nl=3\nm=4\nBlock 1: 1 2\nBlock 3: 3 4\n", ParseError, 5),
    ("k=2\nm=4\nBlock 1: 1 2\nBlock 2: 3 4\n", ParseError, 1),
    ("k=two\nl=3\nBlock 1: 1\n", ParseError, 1),
    ("colour=3\nBlock 1: 1\n", ParseError, 1),
    ("just text\n", ParseError, 1),
    ("k=2\nl=3\nm=4\n", ParseError, 3),
    ("k=2\nl=3\nm=4\nBlock 1: 1 2\nBlock 1: 3 4\n", ParseError, 5),
])
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_certificate(text)
    assert info.value.line == line


def test_parse_error_column():
    with pytest.raises(RangeError) as info:
        parse_certificate("k=1\nl=3\nm=3\nBlock 1: 1 2 30\n")
    assert (info.value.line, info.value.column) == (4, 14)


@settings(max_examples=100)
@given(st.integers(1, 60), st.integers(1, 5), st.integers(2, 6), st.randoms(use_true_random=False),
       st.text(alphabet="abc xyz=[]", max_size=20))
def test_write_parse_round_trip(m, k, l, rnd, origin):
    part = Partition.from_coloring([0] + [rnd.randint(1, k) for _ in range(m)], k)
    cert = Certificate(Params(k, l, m), part, origin)
    back = parse_certificate(io.StringIO(format_certificate(cert)))
    assert back == cert
    assert back.origin == " ".join(origin.split())


def test_fixture_files_round_trip():
    for path in sorted(FIXTURES.glob("*.txt")):
        cert = load_certificate(path)
        assert parse_certificate(format_certificate(cert)) == cert


def _aps_through(i, m, l):
    """Every l-term progression in [m] that contains i, by trying each position and step."""
    for pos in range(l):
        for d in range(1, m):
            start = i - pos * d
            terms = [start + j * d for j in range(l)]
            if terms[0] >= 1 and terms[-1] <= m:
                yield terms


@pytest.mark.parametrize("name,sample", [("w4_3_75_sol1.txt", None), ("w4_3_75_sol2.txt", None),
                                         ("w4_4_408.txt", 150), ("w3_5_650.txt", 150),
                                         ("w2_8_1295.txt", 150)])
def test_single_moves_match_oracle(name, sample):
    cert = load_certificate(FIXTURES / name)
    p = cert.params
    assert brute_ap_free_all(cert)
    color = cert.partition.coloring()
    moves = [(i, b) for i in range(1, p.m + 1) for b in range(1, p.k + 1) if b != color[i]]
    if sample is not None:
        moves = random.Random(name).sample(moves, sample)
    valid_moves = 0
    for i, b in moves:
        blocks = [set(x) for x in cert.partition.blocks]
        blocks[color[i] - 1].discard(i)
        blocks[b - 1].add(i)
        mutant = Certificate(p, Partition(p.m, blocks))
        # the rest of the partition is already progression-free, so only progressions through i matter
        oracle = not any(all(t in blocks[b - 1] for t in ap) for ap in _aps_through(i, p.m, p.l))
        assert verify(mutant).valid == oracle, (i, b)
        valid_moves += oracle
    if name == "w4_3_75_sol1.txt":
        # moving 75 to block 4 gives Solution 2, among others
        assert valid_moves == 8


def brute_ap_free_all(cert):
    p = cert.params
    aps = brute_progressions(p.m, p.l)
    return all(not any(set(ap) <= block for ap in aps) for block in map(set, cert.partition.blocks))
