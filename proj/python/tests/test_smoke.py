from pathlib import Path

import pytest

import tfsprime

GRAMMARS = Path(__file__).resolve().parents[2] / "grammars"
QUESTION = "[inv +, cont [nucleus [perf-rel, arg [nucleus [kiss-rel, actor karl, undergoer marie]]]]]"


def test_generation_order_and_result():
    primed = tfsprime.prime_file(GRAMMARS / "argcomp.gram")
    assert primed.mode == "generate"
    assert primed.order("argcomp") == [1, 4, 2, 3]
    results, stats = tfsprime.generate(primed, QUESTION)
    assert [text for text, _ in results] == ["hat karl marie geküßt"]
    assert stats["edges"] > 0


def test_parsing_round_trip():
    primed = tfsprime.prime_file(GRAMMARS / "argcomp.gram", mode="parse")
    results, _ = tfsprime.parse(primed, "Marie hat Karl geküßt.")
    assert len(results) == 2
    assert all("kiss-rel" in lf for _, lf in results)


def test_diagnostics_and_serialization():
    primed = tfsprime.prime_file(GRAMMARS / "topicalization.gram")
    kinds = [d.kind for d in primed.diagnostics]
    assert "displacement-suspected" in kinds
    again = tfsprime.load_primed(primed.serialize())
    assert again.serialize() == primed.serialize()


def test_errors():
    primed = tfsprime.prime_file(GRAMMARS / "argcomp.gram", mode="parse")
    with pytest.raises(tfsprime.GrammarError):
        tfsprime.parse(primed, "hat karl maria geküßt")
    gen = tfsprime.prime_file(GRAMMARS / "headrec.gram")
    with pytest.raises(tfsprime.ResourceError):
        tfsprime.generate(gen, "[cont [nucleus sleep-rel]]", edge_cap=2)
    assert tfsprime.tokenize("Hat Karl?") == ["hat", "karl"]
