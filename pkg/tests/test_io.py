import os
from collections import defaultdict

import numpy as np
import pytest

from ctd.app.datasets import haggle_like
from ctd.app.io import EdgeRecord, build_tensor, parse_edge_list
from ctd.errors import ArgumentError, EmptyInputError, ParseError


def test_parse_single_line_with_comment():
    edges = parse_edge_list(["% comment\n", "1 2 1 100\n"])
    assert list(edges) == [EdgeRecord(0, 0, 1.0, 100)]
    assert edges.src_labels == ["1"] and edges.dst_labels == ["2"]


def test_parse_defaults_and_interning():
    edges = parse_edge_list(b"# hdr\na b\nb a 2.5\na c\n")
    assert [(r.src, r.dst, r.weight) for r in edges] == [(0, 0, 1.0), (1, 1, 2.5), (0, 2, 1.0)]
    assert edges[0].time is None


def test_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_edge_list(["a b\n"], require_time=True)
    assert info.value.line == 1
    with pytest.raises(ParseError) as info:
        parse_edge_list(["1 2 1 5\n", "1\n"])
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_edge_list(["1 2 x 5\n"])
    with pytest.raises(ParseError):
        parse_edge_list(["1 2 1 -3\n"])
    with pytest.raises(EmptyInputError):
        parse_edge_list(["% nothing\n", "\n"])


def test_parse_from_path(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("1 2 1 10\n2 1 1 11\n")
    assert len(parse_edge_list(path)) == 2
    assert len(parse_edge_list(str(path))) == 2


def test_build_accumulates_same_cell():
    t = build_tensor(parse_edge_list(["1 2 1 5\n", "1 2 2 5\n"])).tensor
    assert t.nnz == 1 and t.values[0] == 3.0


def test_build_bins_span():
    edges = parse_edge_list(["1 2 1 10\n", "1 2 1 14\n", "1 2 1 29\n"])
    tt = build_tensor(edges, bin_width=5.0)
    assert tt.shape == (1, 1, 4) and tt.t_min == 10
    np.testing.assert_array_equal(tt.tensor.indices[:, 2], [0, 3])
    with pytest.raises(ArgumentError):
        build_tensor(edges, 0.0)


def test_build_requires_time():
    with pytest.raises(ParseError):
        build_tensor(parse_edge_list(["1 2\n"]))


def test_build_against_hash_map(rng):
    n = 500
    src = rng.integers(0, 8, n)
    dst = rng.integers(0, 6, n)
    w = rng.integers(1, 5, n).astype(float)
    t = rng.integers(100, 160, n)
    lines = [f"s{a} d{b} {c} {e}\n" for a, b, c, e in zip(src, dst, w, t)]
    tt = build_tensor(parse_edge_list(lines), bin_width=7.0)
    edges = parse_edge_list(lines)
    acc = defaultdict(float)
    t0 = t.min()
    for r in edges:
        acc[(r.src, r.dst, int((r.time - t0) // 7))] += r.weight
    got = {tuple(int(v) for v in idx): val for idx, val in zip(tt.tensor.indices, tt.tensor.values)}
    assert got == {k: v for k, v in acc.items() if v != 0}
    assert build_tensor(parse_edge_list(lines), 7.0).tensor == tt.tensor


def test_haggle_stand_in_size():
    X = haggle_like(0)
    assert X.shape == (77, 274, 1567) and X.nnz == 27972


@pytest.mark.skipif("CTD_HAGGLE_PATH" not in os.environ, reason="set CTD_HAGGLE_PATH to the KONECT contact edge list")
def test_real_haggle_nonzeros():
    tt = build_tensor(parse_edge_list(os.environ["CTD_HAGGLE_PATH"], require_time=True),
                      float(os.environ.get("CTD_HAGGLE_BIN", "1")))
    assert tt.tensor.nnz == 27972
