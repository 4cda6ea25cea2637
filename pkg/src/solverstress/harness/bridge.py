"""JSON-lines bridge exposing the attack MDP to out-of-process agents.

One request per line, one response per line; responses are deterministic
(sorted keys, canonical float repr), so request transcripts replay
byte-identically. State: the current perturbed instance. Action: an edge
modification (a1, a2). Reward: the increase of the sign-unified degradation.
Terminal: the action budget is exhausted or no candidates remain.

The ``eval_beam`` flow drives the same beam search used in-process, with the
policy's action scores supplied over the wire: the server sends the pending
states and their candidate actions, the client answers with one score list
per state until the search reports done.
"""

from __future__ import annotations

import json
import socketserver
import sys
from typing import Optional

from .. import problems, solvers
from ..attackers import AttackConfig, BeamDriver, degradation, derive_seed
from ..core import AttackAction, ProblemInstance, Solution, apply_action, instance_to_obj, op_for_problem
from .datasets import load_split


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _error(kind: str, message: str) -> dict:
    return {"ok": False, "error": {"type": kind, "message": message}}


class BridgeSession:
    """Single-client request/response state machine (strict ordering)."""

    def __init__(self, handle: solvers.SolverHandle,
                 instances: list[tuple[str, ProblemInstance]], budget: int):
        self.handle = handle
        self.instances = instances
        self.budget = budget
        self.rejections = 0
        self._episode: Optional[dict] = None
        self._beam: Optional[BeamDriver] = None
        self._beam_pending = []

    # -- episode plumbing ---------------------------------------------------

    def _state_payload(self, inst: ProblemInstance, ref: Solution, cost: float,
                       gain: float, step: int) -> dict:
        cands = [[a.a1, a.a2] for a in problems.candidates(inst, ref)]
        return {
            "state": instance_to_obj(inst),
            "solution": list(ref.payload),
            "candidates": cands,
            "cost": cost,
            "gain": gain,
            "step": step,
            "done": step >= self.budget or not cands,
        }

    def handle_request(self, req: dict) -> dict:
        if not isinstance(req, dict) or "op" not in req:
            return _error("parse", "request must be an object with an 'op' field")
        op = req["op"]
        if self._beam is not None and op not in ("scores", "shutdown"):
            return _error("protocol", "beam evaluation in progress; send 'scores'")
        if op == "info":
            return {
                "ok": True,
                "problem": self.handle.problem,
                "solver": self.handle.name,
                "budget": self.budget,
                "n_instances": len(self.instances),
                "invalid_action_rejections": self.rejections,
            }
        if op == "reset":
            return self._reset(req)
        if op == "step":
            return self._step(req)
        if op == "eval_beam":
            return self._eval_beam(req)
        if op == "scores":
            return self._scores(req)
        if op == "shutdown":
            return {"ok": True, "bye": True,
                    "invalid_action_rejections": self.rejections}
        return _error("unknown_op", f"unknown op {op!r}")

    def _get_instance(self, req: dict) -> tuple[int, ProblemInstance] | dict:
        iid = req.get("instance_id")
        if not isinstance(iid, int) or not (0 <= iid < len(self.instances)):
            return _error("protocol", f"instance_id must be in [0, {len(self.instances)})")
        return iid, self.instances[iid][1]

    def _reset(self, req: dict) -> dict:
        got = self._get_instance(req)
        if isinstance(got, dict):
            return got
        iid, inst = got
        clean = solvers.solve(self.handle, inst)
        payload = self._state_payload(inst, clean, clean.cost, 0.0, 0)
        self._episode = {
            "instance_id": iid,
            "inst": inst,
            "ref": clean,
            "clean_cost": clean.cost,
            "gain": 0.0,
            "step": 0,
            "done": payload["done"],
        }
        out = {"ok": True, "instance_id": iid, "clean_cost": clean.cost}
        out.update(payload)
        return out

    def _step(self, req: dict) -> dict:
        ep = self._episode
        if ep is None:
            return _error("protocol", "no active episode; send 'reset' first")
        if ep.get("done"):
            return _error("protocol", "episode finished; send 'reset'")
        a1, a2 = req.get("a1"), req.get("a2")
        if not (isinstance(a1, int) and isinstance(a2, int)):
            return _error("parse", "step needs integer fields a1 and a2")
        inst = ep["inst"]
        cands = problems.candidates(inst, ep["ref"])
        action = AttackAction(op_for_problem(inst.problem), a1, a2)
        if not any(a == action for a in cands):
            self.rejections += 1
            return _error("invalid_action", f"({a1},{a2}) is not a valid candidate")
        new_inst = apply_action(inst, action)
        sol = solvers.solve(self.handle, new_inst)
        gain = degradation(new_inst.sense, ep["clean_cost"], sol.cost)
        reward = gain - ep["gain"]
        ep["inst"] = new_inst
        if sol.ok:
            ep["ref"] = sol
        ep["gain"] = gain
        ep["step"] += 1
        out = {"ok": True, "reward": reward, "clean_cost": ep["clean_cost"]}
        payload = self._state_payload(new_inst, ep["ref"], sol.cost, gain, ep["step"])
        ep["done"] = payload["done"]
        out.update(payload)
        return out

    # -- remote beam evaluation ----------------------------------------------

    def _eval_beam(self, req: dict) -> dict:
        got = self._get_instance(req)
        if isinstance(got, dict):
            return got
        _, inst = got
        beam = req.get("beam", 1)
        if not isinstance(beam, int) or beam < 1:
            return _error("parse", "beam must be an integer >= 1")
        self._beam = BeamDriver(self.handle, inst,
                                AttackConfig(budget=self.budget, beam=beam))
        return self._beam_response()

    def _beam_response(self) -> dict:
        driver = self._beam
        if driver.done:
            res = driver.result()
            self._beam = None
            self._beam_pending = []
            return {
                "ok": True,
                "eval_done": True,
                "best_cost": res.best_cost,
                "clean_cost": res.clean_cost,
                "gain": res.gain,
                "evaluations": res.evaluations,
            }
        pending = driver.pending()
        self._beam_pending = pending
        states = []
        for sid, (inst, ref, cands) in enumerate(pending):
            states.append({
                "state_id": sid,
                "state": instance_to_obj(inst),
                "solution": list(ref.payload),
                "candidates": [[a.a1, a.a2] for a in cands],
            })
        return {"ok": True, "eval_done": False, "pending": states}

    def _scores(self, req: dict) -> dict:
        if self._beam is None:
            return _error("protocol", "no beam evaluation in progress")
        scores = req.get("scores")
        if (not isinstance(scores, list)
                or len(scores) != len(self._beam_pending)
                or not all(isinstance(s, list) for s in scores)):
            return _error("parse",
                          f"scores must be {len(self._beam_pending)} lists")
        for s, (_, _, cands) in zip(scores, self._beam_pending):
            if len(s) != len(cands):
                return _error("parse", "score list length != candidate count")
            if not all(isinstance(x, (int, float)) for x in s):
                return _error("parse", "scores must be numbers")
        self._beam.advance(scores)
        return self._beam_response()

    # -- line protocol ---------------------------------------------------------

    def handle_line(self, line: str) -> str:
        line = line.strip()
        if not line:
            return _dumps(_error("parse", "empty request line"))
        try:
            req = json.loads(line)
        except json.JSONDecodeError as e:
            return _dumps(_error("parse", f"invalid JSON: {e.msg}"))
        try:
            return _dumps(self.handle_request(req))
        except Exception as e:  # keep the session alive on internal errors
            return _dumps(_error("internal", f"{type(e).__name__}: {e}"))


def make_session(solver_name: str, dataset_dir: str, split: str = "train",
                 budget: Optional[int] = None,
                 time_limit: Optional[float] = None) -> BridgeSession:
    from ..attackers import _DEFAULTS

    handle = solvers.resolve_handle(solver_name, time_limit=time_limit)
    instances = load_split(dataset_dir, split)
    if budget is None:
        budget = _DEFAULTS[handle.problem]["budget"]
    return BridgeSession(handle, instances, budget)


def serve_stdio(session: BridgeSession,
                stdin=None, stdout=None) -> None:
    """Serve one session over standard streams until EOF or shutdown."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        response = session.handle_line(line)
        stdout.write(response + "\n")
        stdout.flush()
        if '"bye":true' in response:
            break


def serve_tcp(session_factory, port: int, host: str = "127.0.0.1"):
    """Serve one session per TCP connection; returns the server object."""

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            session = session_factory()
            for raw in self.rfile:
                response = session.handle_line(raw.decode("utf-8"))
                self.wfile.write((response + "\n").encode("utf-8"))
                self.wfile.flush()
                if '"bye":true' in response:
                    break

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    return Server((host, port), Handler)
