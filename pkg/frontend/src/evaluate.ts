/**
 * Deterministic beam evaluation of a checkpoint on a dataset split, with an
 * optional random-baseline comparison.
 *
 * npx ts-node src/evaluate.ts --checkpoint ckpt/atsp20.json --dataset ../data/atsp20 \
 *     --beam 3 --baseline-trials 100
 */

import { runBaseline } from "./baseline";
import { evaluateBeamOverSplit } from "./beam";
import { BridgeClient } from "./bridge";
import { loadCheckpoint } from "./checkpoint";

export interface EvalArgs {
  checkpoint: string;
  dataset: string;
  split?: "train" | "test";
  beam?: number;
  baselineTrials?: number;
  seed?: number;
}

export async function evaluate(args: EvalArgs) {
  const { ckpt, model } = loadCheckpoint(args.checkpoint, args.dataset);
  const beam = args.beam ?? 3;
  const bridge = new BridgeClient({
    solver: ckpt.solver,
    dataset: args.dataset,
    split: args.split ?? "test",
    budget: ckpt.budget,
  });
  try {
    const info = await bridge.info();
    const evaluation = await evaluateBeamOverSplit(model, bridge, info.n_instances, beam);
    const result: Record<string, unknown> = {
      solver: ckpt.solver,
      problem: ckpt.problem,
      beam,
      budget: ckpt.budget,
      split: args.split ?? "test",
      mean_gain: evaluation.meanGain,
      mean_best_cost: evaluation.meanBestCost,
      per_instance: evaluation.perInstance,
    };
    if (args.baselineTrials) {
      const base = runBaseline({
        solver: ckpt.solver,
        dataset: args.dataset,
        split: args.split ?? "test",
        budget: ckpt.budget,
        trials: args.baselineTrials,
        seed: args.seed ?? 0,
      });
      result.baseline_mean_gain = base.meanGain;
      result.baseline_success_rate = base.successRate;
      result.beats_baseline = evaluation.meanGain >= base.meanGain;
    }
    return result;
  } finally {
    model.dispose();
    bridge.dispose();
  }
}

function parseArgs(argv: string[]): EvalArgs {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad argument ${argv[i]}`);
    }
    out[argv[i].slice(2)] = argv[i + 1];
  }
  if (!out.checkpoint || !out.dataset) {
    throw new Error("required: --checkpoint CKPT.json --dataset DIR");
  }
  return {
    checkpoint: out.checkpoint,
    dataset: out.dataset,
    split: out.split as EvalArgs["split"],
    beam: out.beam ? Number(out.beam) : undefined,
    baselineTrials: out["baseline-trials"] ? Number(out["baseline-trials"]) : undefined,
    seed: out.seed ? Number(out.seed) : undefined,
  };
}

if (require.main === module) {
  evaluate(parseArgs(process.argv.slice(2)))
    .then((result) => console.log(JSON.stringify(result)))
    .catch((e) => {
      console.error(e);
      process.exit(1);
    });
}
