/**
 * Training entry point.
 *
 * npx ts-node src/train.ts --dataset ../data/atsp20 --solver atsp_nearest_neighbour \
 *     --minutes 30 --out ckpt/atsp20.json --metrics ckpt/train_metrics.csv
 */

import * as fs from "fs";
import * as path from "path";
import { BridgeClient } from "./bridge";
import { Checkpoint, loadCheckpoint, manifestHash, saveCheckpoint } from "./checkpoint";
import { defaultModelConfig, PolicyModel } from "./model";
import { defaultPPOConfig, PPOTrainer } from "./ppo";

export interface TrainArgs {
  dataset: string;
  solver: string;
  out: string;
  budget?: number;
  minutes?: number;
  updates?: number;
  seed?: number;
  metrics?: string;
  episodesPerUpdate?: number;
  /** checkpoint to continue from (e.g. after a bridge disconnect) */
  resume?: string;
  quiet?: boolean;
}

export async function train(args: TrainArgs): Promise<Checkpoint> {
  const bridge = new BridgeClient({
    solver: args.solver,
    dataset: args.dataset,
    split: "train",
    budget: args.budget,
  });
  try {
    const info = await bridge.info();
    let model: PolicyModel;
    let priorUpdates = 0;
    if (args.resume) {
      const resumed = loadCheckpoint(args.resume, args.dataset);
      if (resumed.ckpt.problem !== info.problem) {
        throw new Error(
          `checkpoint is for ${resumed.ckpt.problem}, bridge serves ${info.problem}`);
      }
      model = resumed.model;
      priorUpdates = resumed.ckpt.updates;
    } else {
      model = new PolicyModel(defaultModelConfig(info.problem, args.seed ?? 0));
    }
    const ppoCfg = defaultPPOConfig(info.problem, args.seed ?? 0);
    if (args.episodesPerUpdate) ppoCfg.episodesPerUpdate = args.episodesPerUpdate;
    const trainer = new PPOTrainer(model, bridge, ppoCfg, info.n_instances);

    const datasetHash = manifestHash(args.dataset);
    const snapshot = (updates: number): Checkpoint => ({
      problem: info.problem,
      solver: info.solver,
      budget: info.budget,
      modelConfig: model.cfg,
      datasetManifestSha256: datasetHash,
      updates,
      weights: model.exportWeights(),
    });

    const metricsRows = ["update,episodes,steps,mean_gain,mean_return,loss"];
    const history = await trainer.train(
      { updates: args.updates, minutes: args.minutes ?? 30 },
      (m) => {
        metricsRows.push(
          `${m.update},${m.episodes},${m.steps},${m.meanGain},${m.meanReturn},${m.loss}`,
        );
        // persist after every update so a crash or disconnect is resumable
        saveCheckpoint(args.out, snapshot(priorUpdates + m.update));
        if (!args.quiet) {
          console.error(
            `update ${m.update}: mean gain ${m.meanGain.toFixed(4)} ` +
            `loss ${m.loss.toFixed(4)} (${m.steps} steps)`,
          );
        }
      },
    );

    const rejections = await bridge.shutdown();
    if (rejections !== 0 || bridge.rejections !== 0) {
      throw new Error(`bridge rejected ${rejections} actions; masking is broken`);
    }
    const ckpt = snapshot(priorUpdates + history.length);
    saveCheckpoint(args.out, ckpt);
    if (args.metrics) {
      fs.mkdirSync(path.dirname(path.resolve(args.metrics)), { recursive: true });
      fs.writeFileSync(args.metrics, metricsRows.join("\n") + "\n");
    }
    model.dispose();
    return ckpt;
  } finally {
    bridge.dispose();
  }
}

function parseArgs(argv: string[]): TrainArgs {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad argument ${argv[i]}`);
    }
    out[argv[i].slice(2)] = argv[i + 1];
  }
  if (!out.dataset || !out.solver || !out.out) {
    throw new Error("required: --dataset DIR --solver NAME --out CKPT.json");
  }
  return {
    dataset: out.dataset,
    solver: out.solver,
    out: out.out,
    budget: out.budget ? Number(out.budget) : undefined,
    minutes: out.minutes ? Number(out.minutes) : undefined,
    updates: out.updates ? Number(out.updates) : undefined,
    seed: out.seed ? Number(out.seed) : undefined,
    episodesPerUpdate: out.episodes ? Number(out.episodes) : undefined,
    resume: out.resume,
    metrics: out.metrics,
  };
}

if (require.main === module) {
  train(parseArgs(process.argv.slice(2)))
    .then((ckpt) => {
      console.log(JSON.stringify({
        ok: true,
        updates: ckpt.updates,
        problem: ckpt.problem,
        solver: ckpt.solver,
      }));
    })
    .catch((e) => {
      console.error(e);
      process.exit(1);
    });
}
