"""Matching sessions: the administrator's workflow as a small state machine.

created -> ranked -> candidateSelected -> matchingDrafted -> confirmed

Drafts can be revised until confirmation; confirmed sessions are immutable.
Sessions persist as one JSON file each under the data directory, and any
state round-trips through store/load unchanged.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from wsmatch.annotate import AnnotatedWsdlPair, annotate_pair
from wsmatch.config import ToolConfig
from wsmatch.engine import rank_candidates, service_similarity
from wsmatch.errors import (
    SessionError,
    SessionNotFound,
    WrongSessionState,
    WsMatchError,
)
from wsmatch.mapping import (
    NUMERIC_TYPES,
    MatchingPlan,
    ValidationReport,
    evaluate_data_expr,
    parse_data_expr,
    parse_operation_expr,
    validate_plan,
)
from wsmatch.registry import load_registry
from wsmatch.relations import (
    CorrespondenceTable,
    build_correspondence_table,
    suggest_matching,
)
from wsmatch.textsim import SimilarityCalculator
from wsmatch.wsdl import ServiceDescription, parse_wsdl_location


class SessionState(str, Enum):
    CREATED = "created"
    RANKED = "ranked"
    CANDIDATE_SELECTED = "candidateSelected"
    MATCHING_DRAFTED = "matchingDrafted"
    CONFIRMED = "confirmed"


@dataclass
class RankingRow:
    name: str
    source_uri: str
    score: float

    def to_json_dict(self):
        return {"name": self.name, "sourceUri": self.source_uri, "score": self.score}


@dataclass
class MatchingSession:
    id: str
    target_uri: str
    registry_uri: str
    state: SessionState = SessionState.CREATED
    ranking: list[RankingRow] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    selected: int | None = None
    table: CorrespondenceTable | None = None
    plan: MatchingPlan = field(default_factory=MatchingPlan)
    validation: ValidationReport | None = None
    artifacts: dict | None = None  # {"substituted": str, "substituent": str, "manifest": dict}

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "targetWsdlUri": self.target_uri,
            "registryUri": self.registry_uri,
            "state": self.state.value,
            "ranking": [row.to_json_dict() for row in self.ranking],
            "failures": self.failures,
            "selected": self.selected,
            "table": self.table.to_json_dict() if self.table else None,
            "plan": self.plan.to_json_dict(),
            "validation": (
                self.validation.to_json_dict() if self.validation is not None else None
            ),
            "artifacts": self.artifacts,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MatchingSession":
        return cls(
            id=data["id"],
            target_uri=data["targetWsdlUri"],
            registry_uri=data["registryUri"],
            state=SessionState(data["state"]),
            ranking=[
                RankingRow(r["name"], r["sourceUri"], r["score"])
                for r in data.get("ranking", [])
            ],
            failures=list(data.get("failures", [])),
            selected=data.get("selected"),
            table=(
                CorrespondenceTable.from_json_dict(data["table"])
                if data.get("table")
                else None
            ),
            plan=MatchingPlan.from_json_dict(data.get("plan", {})),
            validation=(
                ValidationReport.from_json_list(data["validation"])
                if data.get("validation") is not None
                else None
            ),
            artifacts=data.get("artifacts"),
        )


class SessionManager:
    """Owns session lifecycle, persistence, and the engine configuration.

    Mutations within one session are serialized behind a per-session lock;
    different sessions are fully independent.
    """

    def __init__(self, config: ToolConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.lexicon = config.load_lexicon()
        self._sessions: dict[str, MatchingSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        # volatile caches of parsed services, rebuilt on demand after reload
        self._targets: dict[str, ServiceDescription] = {}
        self._candidates: dict[str, list[ServiceDescription]] = {}

    def calculator(self) -> SimilarityCalculator:
        return SimilarityCalculator(self.lexicon)

    # -- lifecycle ----------------------------------------------------------

    def create_session(self, target_uri: str, registry_uri: str) -> MatchingSession:
        target = parse_wsdl_location(target_uri)
        load_registry(registry_uri)  # fail fast on a bad registry
        session = MatchingSession(
            id=uuid.uuid4().hex[:12],
            target_uri=target_uri,
            registry_uri=registry_uri,
        )
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
            self._targets[session.id] = target
        self._store(session)
        return session

    def get(self, session_id: str) -> MatchingSession:
        session = self._sessions.get(session_id)
        if session is None:
            session = self._load(session_id)
        if session is None:
            raise SessionNotFound(f"unknown session: {session_id}")
        return session

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- workflow steps -------------------------------------------------------

    def run_ranking(self, session_id: str) -> MatchingSession:
        with self._lock(session_id):
            session = self.get(session_id)
            _require_state(session, SessionState.CREATED, SessionState.RANKED)
            target = self._target(session)
            manifest = load_registry(session.registry_uri)
            pool = []
            failures = []
            for entry in manifest.entries:
                try:
                    pool.append(parse_wsdl_location(entry.wsdl_uri))
                except WsMatchError as exc:
                    failures.append(
                        {"name": entry.name, "sourceUri": entry.wsdl_uri,
                         "error": str(exc)}
                    )
            ranked, score_failures = rank_candidates(
                self.calculator(), target, pool, self.config.weights
            )
            failures.extend(
                {"name": f.name, "sourceUri": f.source_uri, "error": f.error}
                for f in score_failures
            )
            session.ranking = [
                RankingRow(rc.service.name, rc.service.source_uri or "", rc.score)
                for rc in ranked
            ]
            session.failures = failures
            session.selected = None
            session.table = None
            session.state = SessionState.RANKED
            self._candidates[session.id] = [rc.service for rc in ranked]
            self._store(session)
            return session

    def select_candidate(self, session_id: str, index: int) -> MatchingSession:
        with self._lock(session_id):
            session = self.get(session_id)
            _require_state(
                session, SessionState.RANKED, SessionState.CANDIDATE_SELECTED
            )
            if not 0 <= index < len(session.ranking):
                raise SessionError(
                    f"candidate index {index} out of range "
                    f"(ranking has {len(session.ranking)} entries)"
                )
            target = self._target(session)
            candidate = self._candidate(session, index)
            calc = self.calculator()
            _, matrix = service_similarity(
                calc, target, candidate, self.config.weights
            )
            session.table = build_correspondence_table(
                calc, target, candidate, matrix, self.config.threshold
            )
            session.selected = index
            session.plan = MatchingPlan()
            session.validation = None
            session.state = SessionState.CANDIDATE_SELECTED
            self._store(session)
            return session

    def draft_plan(self, session_id: str, fragment: dict) -> MatchingSession:
        """Merge a plan fragment (idempotent per key; null deletes a key)."""
        with self._lock(session_id):
            session = self.get(session_id)
            _require_state(
                session,
                SessionState.CANDIDATE_SELECTED,
                SessionState.MATCHING_DRAFTED,
            )
            target = self._target(session)
            candidate = self._candidate(session, session.selected)
            _merge_fragment(session.plan, fragment, candidate)
            session.validation = validate_plan(session.plan, target, candidate)
            if not session.plan.is_empty():
                session.state = SessionState.MATCHING_DRAFTED
            self._store(session)
            return session

    def confirm(self, session_id: str) -> MatchingSession:
        with self._lock(session_id):
            session = self.get(session_id)
            _require_state(session, SessionState.MATCHING_DRAFTED)
            target = self._target(session)
            candidate = self._candidate(session, session.selected)
            report = validate_plan(session.plan, target, candidate)
            session.validation = report
            if not report.ok:
                raise SessionError(
                    "plan has validation errors; resolve them before confirming"
                )
            pair = annotate_pair(target, candidate, session.plan)
            session.artifacts = {
                "substituted": pair.substituted_doc.decode("utf-8"),
                "substituent": pair.substituent_doc.decode("utf-8"),
                "manifest": pair.manifest,
            }
            session.state = SessionState.CONFIRMED
            self._store(session)
            return session

    # -- projections ----------------------------------------------------------

    def suggestions(self, session: MatchingSession):
        if session.table is None:
            return None
        return [row.to_json_dict() for row in suggest_matching(session.table)]

    def previews(self, session: MatchingSession) -> dict:
        """Sample-value evaluation of every drafted mapping expression."""
        if session.selected is None:
            return {}
        target = self._target(session)
        candidate = self._candidate(session, session.selected)
        out: dict[str, dict] = {"inputMappings": {}, "outputMappings": {}}
        in_bindings = _sample_bindings(target, "input")
        out_bindings = _sample_bindings(candidate, "output")
        for leaf, expr in session.plan.input_mappings.items():
            out["inputMappings"][leaf] = _preview(expr, in_bindings)
        for leaf, expr in session.plan.output_mappings.items():
            out["outputMappings"][leaf] = _preview(expr, out_bindings)
        return out

    # -- persistence ----------------------------------------------------------

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"session-{session_id}.json"

    def _store(self, session: MatchingSession) -> None:
        path = self._path(session.id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(session.to_json_dict(), indent=2, sort_keys=True),
            encoding="utf-8",
        )
        tmp.replace(path)

    def _load(self, session_id: str) -> MatchingSession | None:
        path = self._path(session_id)
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        session = MatchingSession.from_json_dict(data)
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks.setdefault(session.id, threading.Lock())
        return session

    # -- parsed-service caches --------------------------------------------------

    def _target(self, session: MatchingSession) -> ServiceDescription:
        cached = self._targets.get(session.id)
        if cached is None:
            cached = parse_wsdl_location(session.target_uri)
            self._targets[session.id] = cached
        return cached

    def _candidate(self, session: MatchingSession, index: int) -> ServiceDescription:
        if index is None:
            raise SessionError("no candidate selected")
        row = session.ranking[index]
        candidates = self._candidates.get(session.id)
        if candidates is not None and index < len(candidates):
            service = candidates[index]
            if service.source_uri == row.source_uri:
                return service
        return parse_wsdl_location(row.source_uri)


def _require_state(session: MatchingSession, *allowed: SessionState):
    if session.state not in allowed:
        wanted = " or ".join(s.value for s in allowed)
        raise WrongSessionState(
            f"session {session.id} is {session.state.value}; "
            f"this step requires {wanted}"
        )


def _merge_fragment(plan: MatchingPlan, fragment: dict, candidate) -> None:
    if not isinstance(fragment, dict):
        raise SessionError("plan fragment must be a JSON object")
    for name, text in (fragment.get("operations") or {}).items():
        if text is None:
            plan.operations.pop(name, None)
        else:
            plan.operations[name] = parse_operation_expr(str(text))
    for leaf, text in (fragment.get("inputMappings") or {}).items():
        if text is None:
            plan.input_mappings.pop(leaf, None)
        else:
            plan.input_mappings[leaf] = parse_data_expr(str(text))
    for leaf, text in (fragment.get("outputMappings") or {}).items():
        if text is None:
            plan.output_mappings.pop(leaf, None)
        else:
            plan.output_mappings[leaf] = parse_data_expr(str(text))


def _sample_bindings(service: ServiceDescription, side: str) -> dict:
    """Deterministic sample values: 1 for numeric leaves, the leaf name otherwise."""
    bindings: dict[str, object] = {}
    for op in service.operations:
        data = op.input if side == "input" else op.output
        for leaf in data.leaves:
            if leaf.type_name in NUMERIC_TYPES:
                bindings.setdefault(leaf.sentence.text, 1)
            else:
                bindings.setdefault(leaf.sentence.text, leaf.leaf_name)
    return bindings


def _preview(expr, bindings) -> dict:
    try:
        value = evaluate_data_expr(expr, bindings)
    except WsMatchError as exc:
        return {"error": str(exc)}
    return {"value": value if isinstance(value, str) else float(value)}
