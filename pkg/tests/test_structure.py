"""Coordinator views, connectivity, recall measures, and splits."""

import pytest

from tbdag import (
    GameValidationError,
    MAX,
    MIN,
    analyze,
    coordinator_view,
    generate,
    list_presets,
    split_observation,
    split_public,
)


def game(name):
    return generate(list_presets()[name])


class TestCoordinatorView:
    def test_fig2_sequences(self):
        g = game("fig2")
        view = coordinator_view(g, MAX)
        # Distinct (infoset, action) histories: the empty one, two per
        # sender state, and two relay extensions under each of those.
        assert view.num_sequences == 13
        assert view.seq_of[0] == 0  # chance root carries the empty seq
        z_plus = [
            z for z in g.terminals if g.utility[z] is not None
            and g.utility[z] > 0
        ]
        assert all(view.seq_of[z] != 0 for z in z_plus)

    def test_empty_side_rejected(self):
        doc = {
            "players": ["chance", "p1"],
            "teams": {"max": [1], "min": []},
            "root": 0,
            "nodes": [{"kind": "terminal", "utility": 0.0}],
        }
        import tbdag

        g = tbdag.parse_game(doc)
        with pytest.raises(GameValidationError, match="no players"):
            coordinator_view(g, MIN)

    def test_sequences_interned(self):
        g = game("2K3")
        view = coordinator_view(g, MAX)
        lengths = {len(view.sequences[s]) for s in range(view.num_sequences)}
        assert 0 in lengths
        # A single Kuhn player acts at most twice along one play.
        assert max(lengths) <= 2


class TestInformationComplexity:
    def test_fig2_k(self):
        g = game("fig2")
        assert analyze(g, MAX).k == 3
        assert analyze(g, MIN).k == 1

    def test_fig2_kappa(self):
        g = game("fig2")
        assert analyze(g, MAX).kappa == 2

    def test_perfect_recall_flags(self):
        g = game("fig2")
        assert not analyze(g, MAX).perfect_recall
        assert analyze(g, MIN).perfect_recall
        g2 = game("2K3")
        assert analyze(g2, MAX).perfect_recall
        assert analyze(g2, MIN).perfect_recall
        assert analyze(g2, MAX).k == 1

    def test_single_player_side_always_k1(self):
        for name in ("3K3[1]", "3D2[1,2]"):
            g = game(name)
            # The side with one player recalls everything it did.
            solo = MIN if name == "3K3[1]" else MAX
            a = analyze(g, solo)
            assert a.perfect_recall
            assert a.k == 1

    def test_last_infosets_contain_own(self):
        g = game("3K3[2]")
        a = analyze(g, MAX)
        for h in range(g.num_nodes):
            if g.node_side(h) == MAX:
                assert g.infoset[h] in a.last_infosets[h]

    def test_terminals_isolated(self):
        g = game("fig2")
        a = analyze(g, MAX)
        for z in g.terminals:
            assert len(a.public_states[a.public_id[z]]) == 1


class TestSplits:
    def test_fig2_observation_split(self):
        g = game("fig2")
        a = analyze(g, MAX)
        # d, e share an infoset; f hangs off the other message.
        d, e, f = 2, 13, 7
        assert split_observation(a, [d, e, f]) == ((d, e), (f,))
        # d and f are siblings (the sender separates them only by its
        # own choice), so the public grouping keeps all three together.
        assert split_public(a, [d, e, f]) == ((d, f, e),)

    def test_fig8_observation_refines_public(self):
        g = game("fig8")
        a = analyze(g, MAX)
        left = g.children[0][0]
        ceg = list(g.children[left])
        assert split_observation(a, ceg) == tuple((h,) for h in sorted(ceg))
        assert split_public(a, ceg) == (tuple(sorted(ceg)),)

    def test_mixed_depth_rejected(self):
        g = game("fig2")
        a = analyze(g, MAX)
        with pytest.raises(ValueError):
            split_observation(a, [0, 1])

    def test_wrong_side_rejected(self):
        g = game("fig2")
        a = analyze(g, MAX)
        with pytest.raises(ValueError):
            split_observation(a, [1, 12], side=MIN)

    def test_duplicates_collapse(self):
        g = game("fig2")
        a = analyze(g, MAX)
        assert split_observation(a, [1, 1, 12]) == ((1, 12),)

    def test_blocks_partition_input(self):
        g = game("3K3[3]")
        a = analyze(g, MAX)
        depth2 = [h for h in range(g.num_nodes) if g.depth[h] == 2]
        blocks = split_observation(a, depth2)
        flat = sorted(h for b in blocks for h in b)
        assert flat == sorted(depth2)
        pub = split_public(a, depth2)
        # Public blocks are unions of observation blocks.
        obs_of = {h: i for i, b in enumerate(blocks) for h in b}
        for pb in pub:
            parts = {obs_of[h] for h in pb}
            covered = sorted(h for b in blocks for h in b if obs_of[h] in parts)
            assert sorted(pb) == covered
