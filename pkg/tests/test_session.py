"""Session graph operations and persistence."""

import json

import pytest

from promptmap.errors import (
    FormatError,
    InvalidStateError,
    NotFoundError,
    PoolExhaustedError,
    ValidationError,
)
from promptmap.session import (
    ImageRef,
    LogicalClock,
    NodeKind,
    Session,
    create_session,
    deserialize,
    load_session,
    save_session,
    serialize,
)

from conftest import make_suggestion_set

PROMPT = "robot mascot for a festival"


def four_refs(tag="img"):
    return [ImageRef(uri=f"{tag}/{i}.png", provider_meta={"provider": "mock"}) for i in range(4)]


def expanded_session(pool_size=8):
    session = create_session(PROMPT)
    ids = session.attach_suggestions(session.root.id, make_suggestion_set(PROMPT, pool_size))
    return session, ids


class TestCreateSession:
    def test_single_root_with_annotations(self):
        session = create_session("A mascot character")
        assert len(session.nodes) == 1
        root = session.root
        assert root.kind is NodeKind.ROOT
        assert root.parent is None
        assert [a.token for a in root.annotations] == ["A", "mascot", "character"]
        assert session.children(root.id) == []

    def test_empty_prompt_rejected(self):
        with pytest.raises(ValidationError):
            create_session("")

    def test_whitespace_prompt_rejected(self):
        with pytest.raises(ValidationError):
            create_session("   \t ")


class TestAttachSuggestions:
    def test_node_count_grows_to_five(self):
        session, ids = expanded_session()
        assert len(session.nodes) == 5
        assert len(ids) == 4
        for node_id in ids:
            node = session.node(node_id)
            assert node.kind is NodeKind.SUGGESTION
            assert node.parent == session.root.id
            assert node.prompt_text.endswith(" mascot for a festival")
            assert node.annotations

    def test_parent_records_request_and_pool(self):
        session, _ = expanded_session()
        root = session.root
        assert root.request is not None
        assert root.request.origin_prompt == PROMPT
        assert len(root.expansion.retained_pool) == 8

    def test_unknown_parent(self):
        session = create_session(PROMPT)
        with pytest.raises(NotFoundError):
            session.attach_suggestions(99, make_suggestion_set(PROMPT))

    def test_removed_parent_rejected(self):
        session, ids = expanded_session()
        session.remove_suggestion(ids[0])
        removed = session.node(ids[0])
        assert removed.removed
        with pytest.raises(InvalidStateError):
            session.attach_suggestions(removed.id, make_suggestion_set(removed.prompt_text))

    def test_double_expand_rejected(self):
        session, _ = expanded_session()
        with pytest.raises(InvalidStateError):
            session.attach_suggestions(session.root.id, make_suggestion_set(PROMPT))

    def test_attach_to_branch_allowed(self):
        session, ids = expanded_session()
        branch_id = session.promote_to_branch(ids[0])
        branch_prompt = session.node(branch_id).prompt_text
        child_ids = session.attach_suggestions(branch_id, make_suggestion_set(branch_prompt))
        assert len(child_ids) == 4
        assert all(session.node(i).parent == branch_id for i in child_ids)

    def test_origin_mismatch_rejected(self):
        session = create_session(PROMPT)
        with pytest.raises(ValidationError):
            session.attach_suggestions(session.root.id, make_suggestion_set("different text"))


class TestRemoveSuggestion:
    def test_active_count_stays_four_total_grows(self):
        session, ids = expanded_session()
        replacement_id = session.remove_suggestion(ids[1])
        assert len(session.nodes) == 6
        active = session.active_children(session.root.id)
        assert len(active) == 4
        assert replacement_id in [n.id for n in active]
        assert session.node(ids[1]).removed

    def test_remove_twice_is_invalid(self):
        session, ids = expanded_session()
        session.remove_suggestion(ids[0])
        with pytest.raises(InvalidStateError):
            session.remove_suggestion(ids[0])

    def test_remove_node_with_children_is_invalid(self):
        session, ids = expanded_session()
        branch_id = session.promote_to_branch(ids[0])
        prompt = session.node(branch_id).prompt_text
        session.attach_suggestions(branch_id, make_suggestion_set(prompt))
        with pytest.raises(InvalidStateError):
            session.remove_suggestion(branch_id)

    def test_removed_candidates_never_return(self):
        session, ids = expanded_session(pool_size=8)
        seen_span_texts = set()
        for node in session.active_children(session.root.id):
            seen_span_texts.add(node.pool_index)
        removed_indices = []
        # 4 removals exhaust the 8-candidate pool's spare capacity
        for _ in range(4):
            target = session.active_children(session.root.id)[0]
            removed_indices.append(target.pool_index)
            replacement_id = session.remove_suggestion(target.id)
            assert session.node(replacement_id).pool_index not in removed_indices

    def test_pool_exhausted_drops_active_to_three(self):
        session, ids = expanded_session(pool_size=5)
        # one spare candidate: first removal succeeds
        session.remove_suggestion(ids[0])
        target = session.active_children(session.root.id)[0]
        with pytest.raises(PoolExhaustedError):
            session.remove_suggestion(target.id)
        assert len(session.active_children(session.root.id)) == 3
        assert session.node(target.id).removed  # removal itself persisted

    def test_remove_root_is_invalid(self):
        session, _ = expanded_session()
        with pytest.raises(InvalidStateError):
            session.remove_suggestion(session.root.id)

    def test_unknown_node(self):
        session, _ = expanded_session()
        with pytest.raises(NotFoundError):
            session.remove_suggestion(404)


class TestPromoteToBranch:
    def test_promote_then_expand_gives_depth_two(self):
        session, ids = expanded_session()
        branch_id = session.promote_to_branch(ids[2])
        node = session.node(branch_id)
        assert node.kind is NodeKind.BRANCH
        child_ids = session.attach_suggestions(
            branch_id, make_suggestion_set(node.prompt_text)
        )
        grandchild = session.node(child_ids[0])
        assert grandchild.parent == branch_id
        assert session.node(grandchild.parent).parent == session.root.id

    def test_promote_root_is_noop(self):
        session = create_session(PROMPT)
        assert session.promote_to_branch(session.root.id) == session.root.id
        assert session.root.kind is NodeKind.ROOT

    def test_promote_removed_is_invalid(self):
        session, ids = expanded_session()
        session.remove_suggestion(ids[0])
        with pytest.raises(InvalidStateError):
            session.promote_to_branch(ids[0])

    def test_promote_twice_is_noop(self):
        session, ids = expanded_session()
        branch_id = session.promote_to_branch(ids[0])
        assert session.promote_to_branch(branch_id) == branch_id

    def test_unknown_node(self):
        session = create_session(PROMPT)
        with pytest.raises(NotFoundError):
            session.promote_to_branch(12)


class TestImagesAndTriedPrompts:
    def test_fresh_session_has_no_tried_prompts(self):
        session = create_session(PROMPT)
        assert session.list_tried_prompts() == []

    def test_three_generations_in_order(self):
        session, ids = expanded_session()
        session.attach_images(session.root.id, four_refs())
        session.attach_images(ids[0], four_refs())
        session.attach_images(ids[1], four_refs())
        tried = session.list_tried_prompts()
        assert tried == [
            session.root.prompt_text,
            session.node(ids[0]).prompt_text,
            session.node(ids[1]).prompt_text,
        ]

    def test_removed_node_with_images_still_listed(self):
        session, ids = expanded_session()
        session.attach_images(ids[0], four_refs())
        session.remove_suggestion(ids[0])
        assert session.list_tried_prompts() == [session.node(ids[0]).prompt_text]

    def test_event_needs_exactly_four_refs(self):
        session = create_session(PROMPT)
        with pytest.raises(ValidationError):
            session.attach_images(session.root.id, four_refs()[:3])

    def test_images_on_removed_node_invalid(self):
        session, ids = expanded_session()
        session.remove_suggestion(ids[0])
        with pytest.raises(InvalidStateError):
            session.attach_images(ids[0], four_refs())

    def test_empty_uri_rejected(self):
        with pytest.raises(ValidationError):
            ImageRef(uri="")


def build_fixture_session():
    """A ~20-node session exercising every field: images, removals, branches."""
    session = create_session(PROMPT, clock=LogicalClock())
    root_id = session.root.id
    ids = session.attach_suggestions(root_id, make_suggestion_set(PROMPT, pool_size=10))
    session.attach_images(root_id, four_refs("root"))
    session.attach_images(ids[0], four_refs("s0"))
    session.remove_suggestion(ids[1])
    branch_id = session.promote_to_branch(ids[0])
    branch_prompt = session.node(branch_id).prompt_text
    child_ids = session.attach_suggestions(
        branch_id, make_suggestion_set(branch_prompt, pool_size=9, seed=5)
    )
    session.attach_images(child_ids[2], four_refs("c2"))
    session.remove_suggestion(child_ids[3])
    second_branch = session.promote_to_branch(child_ids[0])
    prompt2 = session.node(second_branch).prompt_text
    session.attach_suggestions(second_branch, make_suggestion_set(prompt2, pool_size=6, seed=9))
    return session


class TestSerialization:
    def test_round_trip_identity_on_fixture(self):
        session = build_fixture_session()
        assert len(session.nodes) >= 15
        document = session.to_document()
        restored = Session.from_document(document)
        assert restored.to_document() == document
        # and through text too
        assert deserialize(serialize(session)).to_document() == document

    def test_root_only_round_trip(self):
        session = create_session(PROMPT)
        document = session.to_document()
        assert Session.from_document(document).to_document() == document

    def test_unknown_schema_version(self):
        document = create_session(PROMPT).to_document()
        document["schema_version"] = 99
        with pytest.raises(FormatError):
            Session.from_document(document)

    def test_dangling_parent_is_corruption(self):
        document = build_fixture_session().to_document()
        document["nodes"][3]["parent"] = 999
        with pytest.raises(FormatError):
            Session.from_document(document)

    def test_duplicate_ids_rejected(self):
        document = build_fixture_session().to_document()
        document["nodes"][2]["id"] = document["nodes"][1]["id"]
        with pytest.raises(FormatError):
            Session.from_document(document)

    def test_two_roots_rejected(self):
        document = build_fixture_session().to_document()
        document["nodes"][1]["parent"] = None
        document["nodes"][1]["kind"] = "root"
        with pytest.raises(FormatError):
            Session.from_document(document)

    def test_save_load_file(self, tmp_path):
        session = build_fixture_session()
        path = tmp_path / "nested" / "session.json"
        save_session(session, path)
        restored = load_session(path)
        assert restored.to_document() == session.to_document()
        # the document is plain JSON with a schema marker
        raw = json.loads(path.read_text(encoding="utf-8"))
        assert raw["schema_version"] == 1

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(NotFoundError):
            load_session(tmp_path / "absent.json")

    def test_removed_nodes_and_requests_survive(self):
        session = build_fixture_session()
        restored = Session.from_document(session.to_document())
        removed_ids = [n.id for n in session.nodes.values() if n.removed]
        assert removed_ids
        for node_id in removed_ids:
            assert restored.node(node_id).removed
        assert restored.root.request.to_dict() == session.root.request.to_dict()

    def test_replacement_works_after_reload(self):
        session, ids = expanded_session(pool_size=8)
        restored = Session.from_document(session.to_document())
        target = restored.active_children(restored.root.id)[0]
        replacement_id = restored.remove_suggestion(target.id)
        assert restored.node(replacement_id).kind is NodeKind.SUGGESTION


class TestTreeInvariants:
    def test_parent_chase_reaches_root(self):
        session = build_fixture_session()
        for node in session.nodes.values():
            current, steps = node, 0
            while current.parent is not None:
                current = session.node(current.parent)
                steps += 1
                assert steps <= len(session.nodes)
            assert current.id == session.root.id

    def test_logical_clock_is_deterministic(self):
        clock_a, clock_b = LogicalClock(), LogicalClock()
        a = [clock_a() for _ in range(3)]
        b = [clock_b() for _ in range(3)]
        assert a == b
        assert len(set(a)) == 3
        assert LogicalClock(start_ticks=2)() == a[2]
