import pytest

from bubblex.mesh import (
    DegenerateCell,
    NotADecomposition,
    UnknownSimplex,
    build_mesh,
)


def test_d2_counts(d2):
    assert [len(d2.delta(m)) for m in range(3)] == [5, 8, 4]
    assert d2.delta(-1) == ((),)


def test_d3_counts_and_shared_face(d3):
    assert len(d3.delta(2)) == 7
    assert (1, 2, 3) in d3.delta(2)
    assert len(d3.star((1, 2, 3))) == 2


def test_duplicate_cell_rejected():
    verts = [["0", "0"], ["1", "0"], ["0", "1"]]
    with pytest.raises(NotADecomposition):
        build_mesh(verts, [[0, 1, 2], [0, 1, 2]])


def test_degenerate_cell_rejected():
    verts = [["0", "0"], ["1", "0"], ["2", "0"]]
    with pytest.raises(DegenerateCell):
        build_mesh(verts, [[0, 1, 2]])


def test_overlapping_cells_rejected():
    # two triangles on the same side of their shared edge
    verts = [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]]
    with pytest.raises(NotADecomposition):
        build_mesh(verts, [[0, 1, 2], [0, 1, 3]])


def test_hanging_vertex_rejected():
    verts = [["0", "0"], ["2", "0"], ["0", "2"], ["1", "0"], ["2", "-1"]]
    with pytest.raises(NotADecomposition):
        build_mesh(verts, [[0, 1, 2], [1, 3, 4]])


def test_star(d2):
    assert len(d2.star((0,))) == 4
    assert d2.star((0, 1)) == ((0, 1, 2), (0, 1, 4))
    assert d2.star(()) == d2.cells
    assert len(d2.extended_star((0, 1))) == 4
    with pytest.raises(UnknownSimplex):
        d2.star((1, 3))


def test_link_vertex_is_cycle(d2):
    ld = d2.link((0,))
    assert ld.dim == 1
    assert set(ld.delta(1)) == {(1, 2), (2, 3), (3, 4), (1, 4)}
    assert set(ld.delta(0)) == {(1,), (2,), (3,), (4,)}
    assert ld.closed


def test_link_edge_is_two_points(d2):
    ld = d2.link((0, 1))
    assert ld.dim == 0
    assert set(ld.delta(0)) == {(2,), (4,)}
    assert ld.closed


def test_link_boundary_vertex_is_path(d2):
    ld = d2.link((1,))
    assert ld.dim == 1
    assert not ld.closed
    assert set(ld.delta(1)) == {(0, 2), (0, 4)}


def test_d3_links(d3):
    assert set(d3.link((1, 2, 3)).delta(0)) == {(0,), (4,)}
    assert d3.link((1, 2, 3)).closed
    assert not d3.link((1,)).closed
    # every boundary face has a single-point link
    assert set(d3.link((0, 1, 2)).delta(0)) == {(3,)}


def test_boundary_detection(d2):
    assert d2.is_boundary((1, 2))
    assert not d2.is_boundary((0, 1))
    assert d2.is_boundary((1,))
    assert not d2.is_boundary((0,))


def test_opposite_face_in_link(d2):
    # every opposite face of a star cell appears in the link
    for m in range(2):
        for f in d2.delta(m):
            ld = d2.link(f)
            for T in d2.star(f):
                assert d2.opposite_face(f, T) in ld.delta(ld.dim)


def test_empty_simplex_link_is_whole_mesh(d2):
    ld = d2.link(())
    assert ld.dim == 2
    assert set(ld.delta(2)) == set(d2.cells)
    assert ld.top_orientation == {T: d2.orientation(T) for T in d2.cells}


def test_pairs(d2):
    assert d2.pairs(0, 1) == tuple(
        (e, f) for f in d2.delta(1) for e in d2.link(f).delta(0)
    )
    assert d2.pairs(2, 0) == ()  # j >= n - m is empty
    assert len(d2.pairs(1, -1)) == 8


def test_shape_stats(d2):
    st = d2.shape_stats()
    assert st["overlap"] <= len(list(d2.all_simplices()))
    # every vertex of the edge (0,1) has full star, so h is the global max diameter
    assert st["h"][(0, 1)] == max(d2._diam(T) for T in d2.cells)
    one = build_mesh([["0", "0"], ["1", "0"], ["0", "1"]], [[0, 1, 2]])
    st1 = one.shape_stats()
    assert all(abs(h - one._diam((0, 1, 2))) < 1e-12 for h in st1["h"].values())


def test_volumes_and_orientation(d2, d3):
    from bubblex.rational import RAT

    assert d2.volume((0, 1, 2)) == RAT(1, 2)
    assert d3.volume((0, 1, 2, 3)) == RAT(1, 6)
    assert d3.volume((1, 2, 3, 4)) == RAT(1, 3)
    assert d2.orientation((0, 1, 2)) == 1
    assert d2.orientation((0, 1, 4)) == -1
