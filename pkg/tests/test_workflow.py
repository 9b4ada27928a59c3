import json
import shutil

import pytest

from conftest import WSDL_DIR
from wsmatch.config import ToolConfig, load_config
from wsmatch.errors import RegistryError, SessionError, WrongSessionState
from wsmatch.registry import load_registry
from wsmatch.session import MatchingSession, SessionManager, SessionState

LEXICON = str(WSDL_DIR.parent / "lexicon.txt")


# -- registry ------------------------------------------------------------------


def test_directory_registry(tmp_path):
    for name in ("weather-a.wsdl", "weather-b.wsdl", "unrelated.wsdl"):
        shutil.copy(WSDL_DIR / name, tmp_path / name)
    manifest = load_registry(str(tmp_path))
    assert len(manifest) == 3
    assert [e.name for e in manifest.entries] == sorted(e.name for e in manifest.entries)


def test_empty_directory(tmp_path):
    assert len(load_registry(str(tmp_path))) == 0


def test_json_manifest(tmp_path):
    payload = {
        "entries": [
            {"name": "b", "wsdlUri": str(WSDL_DIR / "weather-b.wsdl")},
            {
                "name": "a",
                "wsdlUri": str(WSDL_DIR / "weather-a.wsdl"),
                "metadata": {"owner": "ops"},
            },
        ]
    }
    path = tmp_path / "registry.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    manifest = load_registry(str(path))
    assert [e.name for e in manifest.entries] == ["a", "b"]
    assert manifest.entries[0].metadata == {"owner": "ops"}


def test_manifest_relative_uris_resolve(tmp_path):
    shutil.copy(WSDL_DIR / "weather-a.wsdl", tmp_path / "weather-a.wsdl")
    path = tmp_path / "registry.json"
    path.write_text(
        json.dumps({"entries": [{"name": "a", "wsdlUri": "weather-a.wsdl"}]}),
        encoding="utf-8",
    )
    manifest = load_registry(str(path))
    assert manifest.entries[0].wsdl_uri.endswith("weather-a.wsdl")
    assert "/" in manifest.entries[0].wsdl_uri


def test_duplicate_uris_rejected(tmp_path):
    payload = {
        "entries": [
            {"name": "a", "wsdlUri": "same.wsdl"},
            {"name": "b", "wsdlUri": "same.wsdl"},
        ]
    }
    path = tmp_path / "registry.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(RegistryError, match="duplicate"):
        load_registry(str(path))


def test_malformed_manifest(tmp_path):
    path = tmp_path / "registry.json"
    path.write_text("[1, 2, 3]", encoding="utf-8")
    with pytest.raises(RegistryError, match="malformed"):
        load_registry(str(path))


# -- config ---------------------------------------------------------------------


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps({"weights": [3, 3, 3], "threshold": 0.7, "lexicon": "from-file"}),
        encoding="utf-8",
    )
    cfg = load_config(str(path), weights=(1, 1, 2), lexicon=LEXICON)
    assert (cfg.weights.p1, cfg.weights.p2, cfg.weights.p3) == (1, 1, 2)
    assert cfg.threshold == 0.7  # not overridden
    assert cfg.lexicon_path == LEXICON


# -- sessions ---------------------------------------------------------------------


@pytest.fixture
def registry_dir(tmp_path):
    reg = tmp_path / "registry"
    reg.mkdir()
    shutil.copy(WSDL_DIR / "weather-b.wsdl", reg / "weather-b.wsdl")
    shutil.copy(WSDL_DIR / "unrelated.wsdl", reg / "unrelated.wsdl")
    return reg


@pytest.fixture
def manager(tmp_path):
    return SessionManager(
        ToolConfig(lexicon_path=LEXICON, data_dir=str(tmp_path / "data"))
    )


def full_plan_fragment():
    return {
        "operations": {"GetWeather": "GetWeatherByZip"},
        "inputMappings": {
            "get weather by zip request zip": "<get weather request zip code>"
        },
        "outputMappings": {
            "get weather response temperature": "<get weather by zip response temp>"
        },
    }


def test_happy_path_to_confirmation(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    assert session.state is SessionState.CREATED

    session = manager.run_ranking(session.id)
    assert session.state is SessionState.RANKED
    assert [row.name for row in session.ranking] == ["WeatherB", "Unrelated"]
    assert session.ranking[0].score > session.ranking[1].score

    session = manager.select_candidate(session.id, 0)
    assert session.state is SessionState.CANDIDATE_SELECTED
    assert session.table is not None
    assert session.table.rows == ("GetWeather", "GetCitiesByCountry")

    session = manager.draft_plan(session.id, full_plan_fragment())
    assert session.state is SessionState.MATCHING_DRAFTED
    assert session.validation.ok

    session = manager.confirm(session.id)
    assert session.state is SessionState.CONFIRMED
    assert session.artifacts is not None
    assert session.artifacts["substituted"].startswith("<?xml")
    assert "sawsdl" in session.artifacts["substituted"]


def test_confirm_before_draft_is_wrong_state(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    with pytest.raises(WrongSessionState):
        manager.confirm(session.id)


def test_select_out_of_range(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    manager.run_ranking(session.id)
    with pytest.raises(SessionError, match="out of range"):
        manager.select_candidate(session.id, 99)


def test_unknown_session(manager):
    from wsmatch.errors import SessionNotFound

    with pytest.raises(SessionNotFound):
        manager.get("nope")


def test_draft_is_incremental_and_supports_deletion(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    manager.run_ranking(session.id)
    manager.select_candidate(session.id, 0)
    manager.draft_plan(session.id, {"operations": {"GetWeather": "GetCity"}})
    session = manager.draft_plan(
        session.id, {"operations": {"GetWeather": "GetWeatherByZip"}}
    )
    assert (
        session.plan.to_json_dict()["operations"]["GetWeather"] == "GetWeatherByZip"
    )
    session = manager.draft_plan(session.id, {"operations": {"GetWeather": None}})
    assert session.plan.is_empty()


def test_confirm_with_validation_errors_is_rejected(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    manager.run_ranking(session.id)
    manager.select_candidate(session.id, 0)
    manager.draft_plan(session.id, {"operations": {"GetWeather": "GetWeatherByZip"}})
    with pytest.raises(SessionError, match="validation errors"):
        manager.confirm(session.id)


def test_persistence_round_trip_at_every_state(manager, registry_dir, tmp_path):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    states = [session.to_json_dict()]
    manager.run_ranking(session.id)
    states.append(manager.get(session.id).to_json_dict())
    manager.select_candidate(session.id, 0)
    states.append(manager.get(session.id).to_json_dict())
    manager.draft_plan(session.id, full_plan_fragment())
    states.append(manager.get(session.id).to_json_dict())
    manager.confirm(session.id)
    states.append(manager.get(session.id).to_json_dict())

    for snapshot in states:
        restored = MatchingSession.from_json_dict(snapshot)
        assert restored.to_json_dict() == snapshot

    # a fresh manager over the same data dir sees the confirmed session
    fresh = SessionManager(manager.config)
    restored = fresh.get(session.id)
    assert restored.state is SessionState.CONFIRMED
    assert restored.to_json_dict() == states[-1]


def test_reranking_is_deterministic(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    first = manager.run_ranking(session.id).to_json_dict()["ranking"]
    second = manager.run_ranking(session.id).to_json_dict()["ranking"]
    assert first == second


def test_ranking_tolerates_bad_candidates(manager, tmp_path):
    reg = tmp_path / "registry"
    reg.mkdir()
    shutil.copy(WSDL_DIR / "weather-b.wsdl", reg / "weather-b.wsdl")
    (reg / "broken.wsdl").write_text("not xml at all", encoding="utf-8")
    session = manager.create_session(str(WSDL_DIR / "weather-a.wsdl"), str(reg))
    session = manager.run_ranking(session.id)
    assert [row.name for row in session.ranking] == ["WeatherB"]
    assert len(session.failures) == 1
    assert "broken" in session.failures[0]["sourceUri"]


def test_confirmed_sessions_are_immutable(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    manager.run_ranking(session.id)
    manager.select_candidate(session.id, 0)
    manager.draft_plan(session.id, full_plan_fragment())
    manager.confirm(session.id)
    for step in (
        lambda: manager.run_ranking(session.id),
        lambda: manager.select_candidate(session.id, 0),
        lambda: manager.draft_plan(session.id, full_plan_fragment()),
        lambda: manager.confirm(session.id),
    ):
        with pytest.raises(WrongSessionState):
            step()


def test_previews_use_sample_bindings(manager, registry_dir):
    session = manager.create_session(
        str(WSDL_DIR / "weather-a.wsdl"), str(registry_dir)
    )
    manager.run_ranking(session.id)
    manager.select_candidate(session.id, 0)
    fragment = full_plan_fragment()
    fragment["outputMappings"]["get weather response temperature"] = (
        "<get weather by zip response temp> * 2"
    )
    fragment["outputMappings"]["get weather response condition"] = (
        "<get weather by zip response sky> / 0"
    )
    session = manager.draft_plan(session.id, fragment)
    previews = manager.previews(session)
    assert previews["outputMappings"]["get weather response temperature"] == {
        "value": 2.0
    }
    assert "error" in previews["outputMappings"]["get weather response condition"]
