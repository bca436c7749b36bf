"""Game container, parser, serializer, and validation errors."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbdag import (
    CHANCE,
    MAX,
    MIN,
    ExtensiveFormGame,
    GameValidationError,
    PLAYER,
    TERMINAL,
    generate,
    list_presets,
    parse_game,
    serialize_game,
)


def tiny_doc():
    """Chance flips a coin; player 1 matches; player 2 is a bystander."""
    return {
        "players": ["chance", "alice", "bob"],
        "teams": {"max": [1], "min": [2]},
        "root": 0,
        "nodes": [
            {
                "kind": "chance",
                "actions": [
                    {"label": "h", "child": 1, "prob": "1/2"},
                    {"label": "t", "child": 4, "prob": 0.5},
                ],
            },
            {
                "kind": "player",
                "player": 1,
                "infoset": 7,
                "actions": [
                    {"label": "h", "child": 2},
                    {"label": "t", "child": 3},
                ],
            },
            {"kind": "terminal", "utility": 1.0},
            {"kind": "terminal", "utility": -1.0},
            {
                "kind": "player",
                "player": 1,
                "infoset": 7,
                "actions": [
                    {"label": "h", "child": 5},
                    {"label": "t", "child": 6},
                ],
            },
            {"kind": "terminal", "utility": -1.0},
            {"kind": "terminal", "utility": 1.0},
        ],
    }


class TestParsing:
    def test_round_trip(self):
        g = parse_game(tiny_doc())
        doc = serialize_game(g)
        g2 = parse_game(doc)
        assert g == g2
        assert doc["root"] == 0
        assert [n["kind"] for n in doc["nodes"]][:2] == [CHANCE, PLAYER]

    def test_depth_and_reach(self):
        g = parse_game(tiny_doc())
        assert g.max_depth == 2
        assert all(g.depth[z] == 2 for z in g.terminals)
        assert all(math.isclose(g.chance_reach[z], 0.5) for z in g.terminals)

    def test_infosets_dense_by_first_touch(self):
        g = parse_game(tiny_doc())
        infosets = [g.infosets[i] for i in g.side_infosets(MAX)]
        assert len(infosets) == 1
        assert infosets[0].members == (1, 4)
        assert infosets[0].actions == ("h", "t")

    def test_fraction_probabilities_exact(self):
        g = parse_game(tiny_doc())
        assert g.probs[0] == (0.5, 0.5)

    def test_preorder_ids(self):
        for name in ("fig2", "2K3"):
            g = generate(list_presets()[name])
            seen = [False] * g.num_nodes
            seen[0] = True
            for h in range(g.num_nodes):
                for c in g.children[h]:
                    assert c > h, "children must come after parents"
                    seen[c] = True
            assert all(seen)

    def test_structural_equality_ignores_doc_ordering(self):
        doc = tiny_doc()
        g = parse_game(doc)
        # Renaming the raw infoset key cannot change the dense result.
        doc["nodes"][1]["infoset"] = "left-or-right"
        doc["nodes"][4]["infoset"] = "left-or-right"
        assert parse_game(doc) == g


class TestValidation:
    def test_team_partition_required(self):
        doc = tiny_doc()
        doc["teams"] = {"max": [1, 2], "min": [2]}
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_dangling_child(self):
        doc = tiny_doc()
        doc["nodes"][1]["actions"][0]["child"] = 99
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_node_reached_twice(self):
        doc = tiny_doc()
        doc["nodes"][1]["actions"][1]["child"] = 2
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_action_label_mismatch_in_infoset(self):
        doc = tiny_doc()
        doc["nodes"][4]["actions"][0]["label"] = "x"
        with pytest.raises(GameValidationError, match="label"):
            parse_game(doc)

    def test_non_timeable_infoset(self):
        doc = tiny_doc()
        # Hang node 4's twin one level deeper: same infoset, new depth.
        doc["nodes"][2] = {
            "kind": "player",
            "player": 1,
            "infoset": 7,
            "actions": [
                {"label": "h", "child": 7},
                {"label": "t", "child": 8},
            ],
        }
        doc["nodes"].append({"kind": "terminal", "utility": 0.0})
        doc["nodes"].append({"kind": "terminal", "utility": 0.0})
        with pytest.raises(GameValidationError, match="timeable"):
            parse_game(doc)

    def test_probabilities_must_sum_to_one(self):
        doc = tiny_doc()
        doc["nodes"][0]["actions"][0]["prob"] = 0.4
        with pytest.raises(GameValidationError, match="sum"):
            parse_game(doc)

    def test_zero_action_node_rejected(self):
        doc = tiny_doc()
        doc["nodes"][1]["actions"] = []
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_terminal_with_actions_rejected(self):
        doc = tiny_doc()
        doc["nodes"][2] = {
            "kind": "terminal",
            "utility": 1.0,
            "actions": [{"label": "x", "child": 3}],
        }
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_chance_prob_missing(self):
        doc = tiny_doc()
        del doc["nodes"][0]["actions"][0]["prob"]
        with pytest.raises(GameValidationError):
            parse_game(doc)

    def test_duplicate_labels_rejected(self):
        doc = tiny_doc()
        doc["nodes"][1]["actions"][1]["label"] = "h"
        with pytest.raises(GameValidationError):
            parse_game(doc)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_random_tree_round_trip(data):
    """parse(serialize(g)) is the identical structure for random trees."""
    nodes = []

    def grow(depth):
        idx = len(nodes)
        nodes.append(None)
        if depth >= 3 or (idx > 0 and data.draw(st.booleans())):
            nodes[idx] = {
                "kind": "terminal",
                "utility": data.draw(
                    st.integers(min_value=-3, max_value=3)
                ),
            }
            return idx
        width = data.draw(st.integers(min_value=1, max_value=3))
        kids = [grow(depth + 1) for _ in range(width)]
        if data.draw(st.booleans()):
            nodes[idx] = {
                "kind": "chance",
                "actions": [
                    {
                        "label": f"c{i}",
                        "child": c,
                        "prob": f"1/{width}",
                    }
                    for i, c in enumerate(kids)
                ],
            }
        else:
            nodes[idx] = {
                "kind": "player",
                "player": data.draw(st.sampled_from([1, 2])),
                "infoset": ("solo", idx),
                "actions": [
                    {"label": f"a{i}", "child": c}
                    for i, c in enumerate(kids)
                ],
            }
        return idx

    grow(0)
    doc = {
        "players": ["chance", "p1", "p2"],
        "teams": {"max": [1], "min": [2]},
        "root": 0,
        "nodes": nodes,
    }
    g = parse_game(doc)
    assert parse_game(serialize_game(g)) == g
    assert g.num_nodes == len(nodes)
