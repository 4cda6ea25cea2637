/**
 * JSON-lines client for the solverstress attack-MDP bridge.
 *
 * Spawns `python -m solverstress serve --stdio ...` and speaks the line
 * protocol over the child's standard streams with strict FIFO ordering.
 */

import { ChildProcessWithoutNullStreams, spawn } from "child_process";
import * as readline from "readline";

export type NodeObj = {
  node: number;
  duration?: number;
  resource?: number;
  weight?: number;
  color?: "black" | "white";
};

/** Full problem-instance object as serialized by the bridge. */
export interface StateGraph {
  format_version: number;
  kind: "dag" | "atsp" | "bipartite_coverage";
  node_count: number;
  set_count: number | null;
  params: { k_sets?: number; k_white?: number };
  nodes: NodeObj[];
  edges: [number, number, number][];
}

export interface StepState {
  ok: boolean;
  state: StateGraph;
  solution: number[];
  candidates: [number, number][];
  cost: number;
  gain: number;
  step: number;
  done: boolean;
  clean_cost: number;
  reward?: number;
  instance_id?: number;
}

export interface BridgeInfo {
  ok: boolean;
  problem: string;
  solver: string;
  budget: number;
  n_instances: number;
  invalid_action_rejections: number;
}

export interface PendingBeamState {
  state_id: number;
  state: StateGraph;
  solution: number[];
  candidates: [number, number][];
}

export interface BeamResult {
  best_cost: number;
  clean_cost: number;
  gain: number;
  evaluations: number;
}

export interface BridgeError {
  ok: false;
  error: { type: string; message: string };
}

export interface BridgeOptions {
  solver: string;
  dataset: string;
  split?: "train" | "test";
  budget?: number;
  /** Command prefix for the bridge process; override via SOLVERSTRESS_CMD. */
  command?: string[];
}

function defaultCommand(): string[] {
  const env = process.env.SOLVERSTRESS_CMD;
  if (env) return env.split(" ");
  return ["python3", "-m", "solverstress"];
}

/** Thrown when the bridge answers with ok=false. */
export class BridgeRequestError extends Error {
  constructor(public readonly kind: string, message: string) {
    super(`${kind}: ${message}`);
  }
}

export class BridgeClient {
  private proc: ChildProcessWithoutNullStreams;
  private rl: readline.Interface;
  private pending: Array<{
    resolve: (v: unknown) => void;
    reject: (e: Error) => void;
  }> = [];
  private closed = false;
  /** Count of invalid_action rejections observed client-side. */
  rejections = 0;

  constructor(opts: BridgeOptions) {
    const cmd = opts.command ?? defaultCommand();
    const args = [
      ...cmd.slice(1),
      "serve",
      "--stdio",
      "--solver",
      opts.solver,
      "--dataset",
      opts.dataset,
      "--split",
      opts.split ?? "train",
    ];
    if (opts.budget !== undefined) args.push("--budget", String(opts.budget));
    this.proc = spawn(cmd[0], args, { stdio: ["pipe", "pipe", "pipe"] });
    this.proc.on("error", (e) => this.failAll(e));
    this.proc.on("exit", () => {
      this.closed = true;
      this.failAll(new Error("bridge process exited"));
    });
    this.rl = readline.createInterface({ input: this.proc.stdout });
    this.rl.on("line", (line) => {
      const waiter = this.pending.shift();
      if (!waiter) return;
      try {
        waiter.resolve(JSON.parse(line));
      } catch (e) {
        waiter.reject(e as Error);
      }
    });
  }

  private failAll(e: Error): void {
    while (this.pending.length) this.pending.shift()!.reject(e);
  }

  /** Send one request object; resolves with the raw response object. */
  request(obj: Record<string, unknown>): Promise<unknown> {
    if (this.closed) return Promise.reject(new Error("bridge closed"));
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.proc.stdin.write(JSON.stringify(obj) + "\n");
    });
  }

  private async checked<T>(obj: Record<string, unknown>): Promise<T> {
    const res = (await this.request(obj)) as { ok: boolean } & Record<string, unknown>;
    if (!res.ok) {
      const err = (res as unknown as BridgeError).error;
      if (err.type === "invalid_action") this.rejections += 1;
      throw new BridgeRequestError(err.type, err.message);
    }
    return res as T;
  }

  info(): Promise<BridgeInfo> {
    return this.checked<BridgeInfo>({ op: "info" });
  }

  reset(instanceId: number): Promise<StepState> {
    return this.checked<StepState>({ op: "reset", instance_id: instanceId });
  }

  step(a1: number, a2: number): Promise<StepState> {
    return this.checked<StepState>({ op: "step", a1, a2 });
  }

  /**
   * Drive the server-side beam search, answering each pending-states
   * message with one score list per state until the search completes.
   */
  async evalBeam(
    instanceId: number,
    beam: number,
    scorer: (state: PendingBeamState) => number[],
  ): Promise<BeamResult> {
    type Resp = { eval_done: boolean; pending?: PendingBeamState[] } & BeamResult;
    let res = await this.checked<Resp>({
      op: "eval_beam",
      instance_id: instanceId,
      beam,
    });
    while (!res.eval_done) {
      const scores = res.pending!.map((st) => scorer(st));
      res = await this.checked<Resp>({ op: "scores", scores });
    }
    return res;
  }

  async shutdown(): Promise<number> {
    const res = await this.checked<{ invalid_action_rejections: number }>({
      op: "shutdown",
    });
    return res.invalid_action_rejections;
  }

  dispose(): void {
    this.closed = true;
    this.rl.close();
    this.proc.kill();
  }
}
