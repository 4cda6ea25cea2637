import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { BridgeClient, BridgeRequestError } from "../src/bridge";

let dataset: string;

beforeAll(() => {
  dataset = fs.mkdtempSync(path.join(os.tmpdir(), "ssbridge-"));
  const code = [
    "from solverstress.harness import datasets",
    "spec = datasets.DatasetSpec(problem='atsp', name='t', params={'cities': 6}, n_train=2, n_test=2, seed=3)",
    `datasets.generate_dataset(spec, r'''${dataset}''')`,
  ].join("\n");
  const res = spawnSync("python3", ["-c", code], { encoding: "utf-8" });
  if (res.status !== 0) throw new Error(res.stderr);
}, 60_000);

describe("BridgeClient", () => {
  it("reports setup via info and serves episodes", async () => {
    const client = new BridgeClient({
      solver: "atsp_nearest_neighbour",
      dataset,
      split: "train",
      budget: 3,
    });
    try {
      const info = await client.info();
      expect(info.problem).toBe("atsp");
      expect(info.n_instances).toBe(2);
      let state = await client.reset(0);
      expect(state.step).toBe(0);
      expect(state.cost).toBe(state.clean_cost);
      expect(state.candidates.length).toBeGreaterThan(0);
      let rewardSum = 0;
      while (!state.done) {
        const [a1, a2] = state.candidates[0];
        state = await client.step(a1, a2);
        rewardSum += state.reward ?? 0;
      }
      expect(state.step).toBe(3);
      expect(rewardSum).toBeCloseTo(state.gain, 6);
      expect(await client.shutdown()).toBe(0);
    } finally {
      client.dispose();
    }
  }, 60_000);

  it("surfaces invalid actions as typed errors and counts them", async () => {
    const client = new BridgeClient({
      solver: "atsp_nearest_neighbour",
      dataset,
      split: "train",
      budget: 2,
    });
    try {
      const state = await client.reset(0);
      // a tour edge is never a candidate
      const [t0, t1] = [state.solution[0], state.solution[1]];
      await expect(client.step(t0, t1)).rejects.toThrowError(BridgeRequestError);
      expect(client.rejections).toBe(1);
      // session survives: a valid step still works
      const [a1, a2] = state.candidates[0];
      const next = await client.step(a1, a2);
      expect(next.step).toBe(1);
      expect(await client.shutdown()).toBe(1);
    } finally {
      client.dispose();
    }
  }, 60_000);

  it("drives a remote beam evaluation with caller scores", async () => {
    const client = new BridgeClient({
      solver: "atsp_nearest_neighbour",
      dataset,
      split: "train",
      budget: 3,
    });
    try {
      const res = await client.evalBeam(1, 2, (st) =>
        st.candidates.map((_, i) => (i * 7919) % 101));
      expect(res.gain).toBeGreaterThanOrEqual(0);
      expect(res.evaluations).toBeGreaterThan(0);
      expect(res.best_cost).toBeCloseTo(res.clean_cost + res.gain, 6);
      // identical scores => identical deterministic outcome
      const again = await client.evalBeam(1, 2, (st) =>
        st.candidates.map((_, i) => (i * 7919) % 101));
      expect(again).toEqual(res);
    } finally {
      client.dispose();
    }
  }, 60_000);
});

afterAll(() => {
  fs.rmSync(dataset, { recursive: true, force: true });
});
