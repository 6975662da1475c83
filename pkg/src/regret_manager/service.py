"""Interactive session service: one human seat, everything else scripted.

Hosts the per-round protocol over HTTP + WebSocket.  A session walks a
precomputed event/baseline path (same streams as a headless run), waiting
each round for the human's baseline before the manager computes suggestions.
Phase machine per round:

    awaiting_baseline -> suggestion_ready -> (advance) -> awaiting_baseline
                                             (at horizon) -> round_closed

Information hygiene: until a round is advanced past, no payload contains any
event coordinate outside the human's observation set.  All float quantities
are serialized as decimal strings at full precision.
"""

from __future__ import annotations

import asyncio
import json
import uuid

import numpy as np
from fastapi import FastAPI, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, ConfigDict

from .errors import EngineError, ProtocolError, ScenarioError
from .harness import (Scenario, assemble_trace, candidate_utilities,
                      generate_baselines, generate_events, joint_indices,
                      make_round_context)
from .manager import initial_state, run_round
from .scenario import parse_scenario
from .trace import format_float, running_mean

PHASES = ("awaiting_baseline", "suggestion_ready", "round_closed")


def _fmt(value) -> str:
    return format_float(float(value))


class Session:
    """Single game instance; all mutations serialized by one asyncio lock."""

    def __init__(self, scenario: Scenario, human_player: int,
                 autoplay_seconds: float | None = None):
        spec = scenario.spec
        if not (1 <= human_player <= spec.num_players):
            raise ScenarioError("human_player",
                                f"outside 1..{spec.num_players}")
        self.id = uuid.uuid4().hex
        self.scenario = scenario
        self.spec = spec
        self.human = human_player
        self.autoplay_seconds = autoplay_seconds

        self.events = generate_events(scenario)
        self.b_idx = generate_baselines(scenario, self.events)
        self.candidates, self.cu = candidate_utilities(spec, self.events)
        self.auto_b = self.b_idx.copy()  # policy decisions, autoplay fallback
        self.manager_state = (initial_state(scenario.manager, spec.num_players)
                              if scenario.manager else None)

        n = spec.num_players
        horizon = scenario.horizon
        self.alpha_joint = np.zeros(horizon, dtype=np.int64)
        self.u = np.zeros((horizon, n))
        self.x = np.zeros((horizon, n))
        self.q = np.zeros((horizon, n))
        self.z = np.zeros((horizon, n))
        self.gamma = np.zeros((horizon, n))
        self.objective = np.zeros(horizon)
        self.followed: list[bool] = []

        self.t = 0
        self.phase = "awaiting_baseline" if horizon > 0 else "round_closed"
        self.lock = asyncio.Lock()
        self.sockets: list[WebSocket] = []
        self._autoplay_task: asyncio.Task | None = None

    # -- views ---------------------------------------------------------------

    def _closed_rounds(self) -> int:
        return self.t

    def _human_averages(self) -> tuple[str, str, str]:
        closed = self._closed_rounds()
        if closed == 0:
            return _fmt(0.0), _fmt(0.0), _fmt(0.0)
        i = self.human - 1
        ubar = running_mean(self.u[:closed, i].reshape(-1, 1))[-1, 0]
        xbar = running_mean(self.x[:closed, i].reshape(-1, 1))[-1, 0]
        return _fmt(ubar), _fmt(xbar), _fmt(ubar - xbar)

    def round_view(self) -> dict:
        """The human's private view of the current round."""
        visible = {}
        if self.phase != "round_closed" and self.t < self.scenario.horizon:
            obs_set = self.spec.observation_sets[self.human - 1]
            row = self.events[self.t]
            visible = {str(j): _fmt(row[j - 1]) for j in sorted(obs_set)}
        ubar, xbar, gain = self._human_averages()
        return {
            "t": self.t,
            "phase": self.phase,
            "horizon": self.scenario.horizon,
            "player": self.human,
            "visible": visible,
            "allowed_actions": list(self.spec.action_sets[self.human - 1]),
            "ubar": ubar,
            "xbar": xbar,
            "gain": gain,
        }

    def _suggestion_payload(self) -> dict:
        t = self.t
        i = self.human - 1
        suggestion = self.candidates[int(self.alpha_joint[t])]
        return {
            "t": t,
            "suggestion": suggestion[i],
            "u": _fmt(self.u[t, i]),
            "x": _fmt(self.x[t, i]),
        }

    def _result_payload(self, t: int) -> dict:
        joint = self.candidates[int(self.alpha_joint[t])]
        b_values = tuple(self.spec.action_sets[i][self.b_idx[t, i]]
                         for i in range(self.spec.num_players))
        return {
            "t": t,
            "omega": [_fmt(v) for v in self.events[t]],
            "b": list(b_values),
            "alpha": list(joint),
            "u": [_fmt(v) for v in self.u[t]],
            "x": [_fmt(v) for v in self.x[t]],
            "followed": self.followed[t],
        }

    def summary_payload(self) -> dict:
        ubar, xbar, gain = self._human_averages()
        return {
            "t": self.t,
            "rounds_played": self._closed_rounds(),
            "horizon": self.scenario.horizon,
            "ubar": ubar,
            "xbar": xbar,
            "gain": gain,
            "complete": self.phase == "round_closed",
        }

    # -- transitions ----------------------------------------------------------

    def submit_baseline(self, player: int, action) -> dict:
        if player != self.human:
            raise ProtocolError("not_human_seat",
                                f"player {player} is engine-controlled")
        if self.phase == "suggestion_ready":
            raise ProtocolError("duplicate_submission",
                                f"round {self.t} already has a baseline")
        if self.phase != "awaiting_baseline":
            raise ProtocolError("wrong_phase", f"phase is {self.phase}")
        i = self.human - 1
        if action not in self.spec.action_sets[i]:
            raise ProtocolError("illegal_action",
                                f"action {action!r} not allowed for player {player}")
        t = self.t
        self.b_idx[t, i] = self.spec.action_sets[i].index(action)
        self._compute_round(t)
        self.phase = "suggestion_ready"
        return {"status": "accepted", "t": t, "phase": self.phase}

    def _compute_round(self, t: int):
        spec = self.spec
        b_joint = int(joint_indices(spec, self.b_idx[t:t + 1])[0])
        self.x[t] = self.cu[t, b_joint]
        if self.scenario.manager is None:
            self.alpha_joint[t] = b_joint
            self.u[t] = self.x[t]
            self.objective[t] = 0.0
            return
        ctx = make_round_context(self.candidates, self.cu, t, b_joint)
        self.manager_state, out = run_round(
            self.manager_state, self.scenario.manager, spec, ctx=ctx)
        self.alpha_joint[t] = out.suggestion_index
        self.u[t] = out.u
        self.objective[t] = out.objective
        if self.scenario.manager.uses_q:
            self.q[t] = self.manager_state.q
        if self.scenario.manager.uses_z:
            self.z[t] = self.manager_state.z
            self.gamma[t] = out.gamma

    def advance(self, follow: bool = True) -> dict:
        if self.phase == "round_closed":
            return {"result": None, "summary": self.summary_payload(),
                    "view": self.round_view()}
        if self.phase != "suggestion_ready":
            raise ProtocolError("wrong_phase",
                                f"cannot advance while {self.phase}")
        self.followed.append(bool(follow))
        result = self._result_payload(self.t)
        self.t += 1
        if self.t >= self.scenario.horizon:
            self.phase = "round_closed"
            return {"result": result, "summary": self.summary_payload(),
                    "view": self.round_view()}
        self.phase = "awaiting_baseline"
        return {"result": result, "summary": None, "view": self.round_view()}

    def autoplay_submit(self) -> dict:
        """Fallback: submit the human seat's scripted decision for this round."""
        i = self.human - 1
        action = self.spec.action_sets[i][self.auto_b[self.t, i]]
        return self.submit_baseline(self.human, action)

    def build_trace(self):
        if self.phase != "round_closed":
            raise ProtocolError("wrong_phase",
                                "trace export requires a completed session")
        return assemble_trace(self.scenario, self.events, self.b_idx,
                              self.alpha_joint, self.u, self.x, self.q,
                              self.z, self.gamma, self.objective)


# -- pydantic request/response models ----------------------------------------


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: dict | None = None
    human_player: int | None = None
    seed: int | None = None


class CreateSessionResponse(BaseModel):
    session_id: str
    human_player: int
    horizon: int
    num_players: int
    view: dict


class BaselineRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    player: int
    action: int | str


class AdvanceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    follow: bool = True


_PROTOCOL_STATUS = {
    "unknown_session": 404,
    "not_human_seat": 403,
    "illegal_action": 400,
    "wrong_phase": 409,
    "duplicate_submission": 409,
}


def create_app(default_scenario: Scenario | None = None,
               default_player: int | None = None,
               autoplay_seconds: float | None = None) -> FastAPI:
    app = FastAPI(title="regret-manager session service")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ProtocolError("unknown_session", f"no session {session_id}")
        return session

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(_, exc: ProtocolError):
        from fastapi.responses import JSONResponse
        status = _PROTOCOL_STATUS.get(exc.code, 400)
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(ScenarioError)
    async def scenario_error_handler(_, exc: ScenarioError):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=422,
                            content={"code": "invalid_scenario",
                                     "path": exc.path, "message": str(exc)})

    async def push(session: Session, message: dict):
        text = json.dumps(message)
        dead = []
        for ws in session.sockets:
            try:
                await ws.send_text(text)
            except Exception:
                dead.append(ws)
        for ws in dead:
            session.sockets.remove(ws)

    def schedule_autoplay(session: Session):
        if session.autoplay_seconds is None:
            return
        if session._autoplay_task is not None:
            session._autoplay_task.cancel()

        round_at_schedule = session.t

        async def fallback():
            await asyncio.sleep(session.autoplay_seconds)
            async with session.lock:
                if session.phase == "awaiting_baseline" and session.t == round_at_schedule:
                    session.autoplay_submit()
                    await push(session, {"type": "suggestion",
                                         "payload": session._suggestion_payload()})

        session._autoplay_task = asyncio.get_running_loop().create_task(fallback())

    @app.post("/sessions", response_model=CreateSessionResponse)
    async def create_session(req: CreateSessionRequest) -> CreateSessionResponse:
        if req.scenario is not None:
            scenario = parse_scenario(req.scenario, seed_override=req.seed)
        elif default_scenario is not None:
            if req.seed is not None:
                scenario = parse_scenario(default_scenario.config,
                                          seed_override=req.seed)
            else:
                scenario = default_scenario
        else:
            raise ScenarioError("scenario", "no scenario configured or supplied")
        player = req.human_player if req.human_player is not None else default_player
        if player is None:
            raise ScenarioError("human_player", "no human seat designated")
        session = Session(scenario, player, autoplay_seconds)
        sessions[session.id] = session
        schedule_autoplay(session)
        return CreateSessionResponse(
            session_id=session.id,
            human_player=session.human,
            horizon=scenario.horizon,
            num_players=scenario.spec.num_players,
            view=session.round_view(),
        )

    @app.get("/sessions/{session_id}/view")
    async def get_view(session_id: str, player: int = Query(...)):
        session = get_session(session_id)
        if player != session.human:
            raise ProtocolError("not_human_seat",
                                f"views are only served to player {session.human}")
        async with session.lock:
            return session.round_view()

    @app.post("/sessions/{session_id}/baseline")
    async def post_baseline(session_id: str, req: BaselineRequest):
        session = get_session(session_id)
        async with session.lock:
            ack = session.submit_baseline(req.player, req.action)
            await push(session, {"type": "suggestion",
                                 "payload": session._suggestion_payload()})
        return ack

    @app.post("/sessions/{session_id}/advance")
    async def post_advance(session_id: str, req: AdvanceRequest | None = None):
        session = get_session(session_id)
        follow = True if req is None else req.follow
        async with session.lock:
            out = session.advance(follow)
            if out["result"] is not None:
                await push(session, {"type": "round_result", "payload": out["result"]})
            if out["summary"] is not None and out["summary"]["complete"]:
                await push(session, {"type": "summary", "payload": out["summary"]})
            elif out["result"] is not None:
                await push(session, {"type": "round_start", "payload": out["view"]})
                schedule_autoplay(session)
        return out

    @app.get("/sessions/{session_id}/summary")
    async def get_summary(session_id: str):
        session = get_session(session_id)
        async with session.lock:
            return session.summary_payload()

    @app.get("/sessions/{session_id}/trace", response_class=PlainTextResponse)
    async def get_trace(session_id: str):
        session = get_session(session_id)
        async with session.lock:
            try:
                return session.build_trace().to_csv()
            except EngineError as exc:
                if isinstance(exc, ProtocolError):
                    raise
                raise ProtocolError("engine_error", str(exc)) from exc

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(websocket: WebSocket, session_id: str):
        session = sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        session.sockets.append(websocket)
        try:
            async with session.lock:
                if session.phase == "round_closed":
                    await websocket.send_text(json.dumps(
                        {"type": "summary", "payload": session.summary_payload()}))
                else:
                    await websocket.send_text(json.dumps(
                        {"type": "round_start", "payload": session.round_view()}))
                    if session.phase == "suggestion_ready":
                        await websocket.send_text(json.dumps(
                            {"type": "suggestion",
                             "payload": session._suggestion_payload()}))
            while True:
                # clients only listen; drain pings/keepalives
                await websocket.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            if websocket in session.sockets:
                session.sockets.remove(websocket)

    return app
