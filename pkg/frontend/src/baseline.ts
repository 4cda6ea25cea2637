/**
 * Random-baseline reference numbers, obtained by running the primary
 * package's attack CLI (files + exit codes only; no in-process coupling).
 */

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

export interface BaselineStats {
  meanGain: number;
  meanAttackedCost: number;
  successRate: number;
  trials: number;
}

export function runBaseline(opts: {
  solver: string;
  dataset: string;
  split?: "train" | "test";
  budget: number;
  trials?: number;
  seed?: number;
}): BaselineStats {
  const cmd = (process.env.SOLVERSTRESS_CMD ?? "python3 -m solverstress").split(" ");
  const out = path.join(fs.mkdtempSync(path.join(os.tmpdir(), "ssbase-")), "cell.json");
  const args = [
    ...cmd.slice(1),
    "attack",
    "--solver", opts.solver,
    "--attacker", "baseline",
    "--dataset", opts.dataset,
    "--split", opts.split ?? "test",
    "--budget", String(opts.budget),
    "--trials", String(opts.trials ?? 100),
    "--seed", String(opts.seed ?? 0),
    "--out", out,
  ];
  const proc = spawnSync(cmd[0], args, { encoding: "utf-8", timeout: 600_000 });
  if (proc.status !== 0) {
    throw new Error(`baseline attack failed: ${proc.stderr}`);
  }
  const cell = JSON.parse(fs.readFileSync(out, "utf-8")) as {
    trials: number;
    instances: { clean_cost: number; trials: { best_cost: number; gain: number }[] }[];
  };
  let gainSum = 0;
  let costSum = 0;
  let successes = 0;
  let count = 0;
  for (const inst of cell.instances) {
    for (const trial of inst.trials) {
      gainSum += trial.gain;
      costSum += trial.best_cost;
      if (trial.gain > 0) successes += 1;
      count += 1;
    }
  }
  return {
    meanGain: gainSum / Math.max(1, count),
    meanAttackedCost: costSum / Math.max(1, count),
    successRate: successes / Math.max(1, count),
    trials: cell.trials,
  };
}
