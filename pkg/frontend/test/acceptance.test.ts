/**
 * Secondary acceptance: a desk-scale training run on 20-city instances
 * against the nearest-neighbour solver must (S1) reach a beam-evaluated mean
 * gain at least as good as the random baseline on the held-out split, with
 * deterministic evaluation across two runs, and (S2) finish the whole run
 * without a single invalid-action rejection from the bridge.
 *
 * The full-budget variant of S1 is the same entry point with
 * `--minutes 30`; this test uses a small fixed update count to stay fast.
 */

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { runBaseline } from "../src/baseline";
import { evaluateBeamOverSplit } from "../src/beam";
import { BridgeClient } from "../src/bridge";
import { loadCheckpoint } from "../src/checkpoint";
import { train } from "../src/train";

let dataset: string;
let workdir: string;

beforeAll(() => {
  workdir = fs.mkdtempSync(path.join(os.tmpdir(), "ssaccept-"));
  dataset = path.join(workdir, "atsp20");
  const code = [
    "from solverstress.harness import datasets",
    "spec = datasets.DatasetSpec(problem='atsp', name='atsp-20', params={'cities': 20}, n_train=6, n_test=5, seed=12)",
    `datasets.generate_dataset(spec, r'''${dataset}''')`,
  ].join("\n");
  const res = spawnSync("python3", ["-c", code], { encoding: "utf-8" });
  if (res.status !== 0) throw new Error(res.stderr);
}, 120_000);

afterAll(() => {
  fs.rmSync(workdir, { recursive: true, force: true });
});

describe("secondary acceptance", () => {
  it("S1+S2: trained beam attack >= random baseline, deterministic eval, zero rejections", async () => {
    const ckptPath = path.join(workdir, "ckpt.json");
    const metricsPath = path.join(workdir, "metrics.csv");
    // S2 is enforced inside train(): it throws if the bridge rejected an action
    const ckpt = await train({
      dataset,
      solver: "atsp_nearest_neighbour",
      out: ckptPath,
      budget: 20,
      updates: 8,
      seed: 3,
      metrics: metricsPath,
      quiet: true,
    });
    expect(ckpt.updates).toBe(8);
    expect(fs.existsSync(metricsPath)).toBe(true);
    const metrics = fs.readFileSync(metricsPath, "utf-8").trim().split("\n");
    expect(metrics).toHaveLength(9); // header + one row per update
    for (const row of metrics.slice(1)) {
      expect(Number.isFinite(Number(row.split(",")[5]))).toBe(true); // loss
    }

    // deterministic beam evaluation, run twice on fresh bridges
    async function evalOnce() {
      const { model } = loadCheckpoint(ckptPath, dataset);
      const bridge = new BridgeClient({
        solver: "atsp_nearest_neighbour",
        dataset,
        split: "test",
        budget: 20,
      });
      try {
        const info = await bridge.info();
        const out = await evaluateBeamOverSplit(model, bridge, info.n_instances, 3);
        expect(await bridge.shutdown()).toBe(0);
        return out;
      } finally {
        model.dispose();
        bridge.dispose();
      }
    }
    const first = await evalOnce();
    const second = await evalOnce();
    expect(second.perInstance).toEqual(first.perInstance);

    const baseline = runBaseline({
      solver: "atsp_nearest_neighbour",
      dataset,
      split: "test",
      budget: 20,
      trials: 50,
      seed: 0,
    });
    // S1: beam-evaluated mean gain at least matches the random baseline
    expect(first.meanGain).toBeGreaterThanOrEqual(baseline.meanGain);
    expect(first.meanGain).toBeGreaterThanOrEqual(0); // clean fallback
  }, 600_000);
});
