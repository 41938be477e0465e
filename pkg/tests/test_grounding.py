import pytest

from relspace.errors import (
    AmbiguousMatch,
    InsufficientReferences,
    NoRelationMatch,
    NoTargetMatch,
    ObjectNotInScene,
)
from relspace.geometry import Pose, Scene
from relspace.grounding import (
    GroundingCatalog,
    ground,
    grounding_catalog_from_json,
    grounding_catalog_to_json,
    verbalize_query,
)
from relspace.relations import RelationSymbol
from relspace.synth import default_grounding_catalog


@pytest.fixture
def catalog():
    return default_grounding_catalog()


@pytest.fixture
def scene():
    pose = Pose((0, 0, 0.05))
    ids = ["tea", "cup", "plate", "fork", "spoon", "bowl"]
    return Scene(0.0, {oid: pose for oid in ids})


class TestGround:
    def test_paper_example_right_of(self, catalog, scene):
        cmd = ground("Put the tea to the right of the cup", catalog, scene)
        assert cmd.relation.id == "right_of"
        assert cmd.target == "tea"
        assert cmd.references == {"cup"}

    def test_paper_example_between(self, catalog, scene):
        cmd = ground("Move the plate between the fork and the spoon", catalog, scene)
        assert cmd.relation.id == "between"
        assert cmd.target == "plate"
        assert cmd.references == {"fork", "spoon"}

    def test_no_relation(self, catalog, scene):
        with pytest.raises(NoRelationMatch):
            ground("Wiggle the spoon", catalog, scene)

    def test_no_target(self, catalog, scene):
        with pytest.raises(NoTargetMatch):
            ground("go to the right of", catalog, scene)

    def test_insufficient_references(self, catalog, scene):
        with pytest.raises(InsufficientReferences):
            ground("put the cup on the right side of", catalog, scene)

    def test_object_not_in_scene(self, catalog, scene):
        with pytest.raises(ObjectNotInScene):
            ground("put the milk to the left of the cup", catalog, scene)

    def test_case_and_whitespace_insensitive(self, catalog, scene):
        a = ground("PUT THE TEA   TO THE RIGHT OF THE CUP", catalog, scene)
        b = ground("put the tea to the right of the cup", catalog, scene)
        assert a == b

    def test_longest_match_wins(self, catalog, scene):
        # "on the right side of" must win although "right of" also exists
        cmd = ground("place the bowl on the right side of the plate", catalog, scene)
        assert cmd.relation.id == "right_of"
        assert cmd.target == "bowl"
        assert cmd.references == {"plate"}

    def test_two_relations_is_ambiguous(self, catalog, scene):
        with pytest.raises(AmbiguousMatch):
            ground("put the cup close to and far from the plate", catalog, scene)

    def test_word_boundaries(self, catalog, scene):
        # "cupboard" must not match "cup"
        with pytest.raises(NoTargetMatch):
            ground("put the cupboard to the right of the cupboards", catalog, scene)

    def test_duplicate_mention_collapses(self, catalog, scene):
        with pytest.raises(InsufficientReferences):
            ground("put the cup to the right of the cup", catalog, scene)


class TestVerbalize:
    def test_no_model_template(self):
        rel = RelationSymbol("right_of", "right")
        assert (
            verbalize_query("no_model", rel)
            == "I am sorry, I don't know what 'right' means yet, can you show me what to do?"
        )

    def test_insufficient_model_template(self):
        rel = RelationSymbol("between", "between")
        assert (
            verbalize_query("insufficient_model", rel)
            == "Sorry, I cannot do it with my current knowledge. Can you show me what I should do?"
        )

    def test_thanks_template(self):
        rel = RelationSymbol("right_of", "right")
        assert (
            verbalize_query("thanks", rel)
            == "Thanks, I think I now know the meaning of 'right' a bit better."
        )

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            verbalize_query("nope", RelationSymbol("right_of", "right"))


class TestCatalogValidation:
    def test_cross_id_substring_rejected(self):
        symbols = {"a": RelationSymbol("a", "a"), "b": RelationSymbol("b", "b")}
        with pytest.raises(ValueError):
            GroundingCatalog({}, {"a": ["right of"], "b": ["to the right of"]}, symbols)

    def test_same_id_substring_allowed(self):
        symbols = {"a": RelationSymbol("a", "a")}
        GroundingCatalog({}, {"a": ["right of", "to the right of"]}, symbols)

    def test_surfaces_must_be_normalized(self):
        symbols = {"a": RelationSymbol("a", "a")}
        with pytest.raises(ValueError):
            GroundingCatalog({}, {"a": ["Right OF"]}, symbols)

    def test_default_catalog_is_valid(self):
        default_grounding_catalog()  # construction runs the ambiguity guard

    def test_json_round_trip(self, catalog):
        restored = grounding_catalog_from_json(grounding_catalog_to_json(catalog))
        assert restored.objects == catalog.objects
        assert restored.relations == catalog.relations
        assert restored.symbols == catalog.symbols


class TestTemplateClosure:
    def test_all_templates_ground(self, catalog):
        """Every sentence the harness can generate grounds to its command."""
        import numpy as np

        from relspace.harness import verbalize_command
        from relspace.relations import RelationCommand

        pose = Pose((0, 0, 0.05))
        scene = Scene(0.0, {oid: pose for oid in catalog.objects})
        rng = np.random.default_rng(0)
        objects = sorted(catalog.objects)
        for rid, symbol in catalog.symbols.items():
            for _ in range(20):
                picks = rng.choice(len(objects), size=3, replace=False)
                target = objects[picks[0]]
                refs = (
                    [objects[picks[1]]]
                    if rid not in ("between", "among")
                    else [objects[picks[1]], objects[picks[2]]]
                )
                cmd = RelationCommand(symbol, target, frozenset(refs))
                text = verbalize_command(cmd, catalog, rng)
                assert ground(text, catalog, scene) == cmd, text
