/**
 * PPO training against the bridge: clipped surrogate on the joint two-node
 * action log-prob, value regression, entropy regularization, and
 * scale-normalized rewards (step rewards are divided by the episode's clean
 * cost so the magnitudes are problem-size independent).
 */

import * as tf from "@tensorflow/tfjs";
import { BridgeClient } from "./bridge";
import { ActionMasks, buildMasks, featurize, GraphFeatures } from "./features";
import { PolicyModel } from "./model";

export interface PPOConfig {
  gamma: number;
  clip: number;
  lr: number;
  episodesPerUpdate: number;
  epochs: number;
  entropyCoef: number;
  valueCoef: number;
  seed: number;
}

/** Discount 0.95 and trust-region clip 0.1 everywhere; lr per problem. */
export function defaultPPOConfig(problem: string, seed = 0): PPOConfig {
  return {
    gamma: 0.95,
    clip: 0.1,
    lr: problem === "dag" ? 1e-4 : 1e-3,
    episodesPerUpdate: 4,
    epochs: 3,
    entropyCoef: 0.01,
    valueCoef: 0.5,
    seed,
  };
}

interface StepRecord {
  feat: GraphFeatures;
  masks: ActionMasks;
  a1: number;
  a2: number;
  logp: number;
  value: number;
  reward: number; // normalized
  ret: number; // filled by returns pass
  adv: number;
}

export interface UpdateMetrics {
  update: number;
  episodes: number;
  meanGain: number;
  meanReturn: number;
  loss: number;
  steps: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function sample(probs: Float32Array, rand: () => number): number {
  const u = rand();
  let acc = 0;
  for (let i = 0; i < probs.length; i++) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return probs.length - 1;
}

export class PPOTrainer {
  private readonly optimizer: tf.Optimizer;
  private readonly rand: () => number;
  private updateCount = 0;

  constructor(
    readonly model: PolicyModel,
    readonly bridge: BridgeClient,
    readonly cfg: PPOConfig,
    readonly nInstances: number,
  ) {
    this.optimizer = tf.train.adam(cfg.lr);
    this.rand = mulberry32(cfg.seed ^ 0x9e3779b9);
  }

  /** Roll one episode with the current policy; returns its steps and gain. */
  async collectEpisode(instanceId: number): Promise<{ steps: StepRecord[]; gain: number }> {
    let state = await this.bridge.reset(instanceId);
    const cleanScale = Math.max(1e-9, Math.abs(state.clean_cost));
    const steps: StepRecord[] = [];
    let gain = 0;
    while (!state.done && state.candidates.length > 0) {
      const feat = featurize(state.state);
      const masks = buildMasks(state.candidates);
      const { pA1, pA2For, value } = this.model.policyArrays(feat, masks);
      const a1 = masks.validA1[sample(pA1, this.rand)];
      const validA2 = masks.a2ByA1.get(a1)!;
      const pA2 = pA2For(a1);
      const i2 = sample(pA2, this.rand);
      const a2 = validA2[i2];
      const i1 = masks.validA1.indexOf(a1);
      const logp = Math.log(Math.max(pA1[i1], 1e-12)) + Math.log(Math.max(pA2[i2], 1e-12));
      state = await this.bridge.step(a1, a2);
      gain = state.gain;
      steps.push({
        feat,
        masks,
        a1,
        a2,
        logp,
        value,
        reward: (state.reward ?? 0) / cleanScale,
        ret: 0,
        adv: 0,
      });
    }
    return { steps, gain };
  }

  private fillReturnsAndAdvantages(episodes: StepRecord[][]): void {
    const all: StepRecord[] = [];
    for (const steps of episodes) {
      let ret = 0;
      for (let i = steps.length - 1; i >= 0; i--) {
        ret = steps[i].reward + this.cfg.gamma * ret;
        steps[i].ret = ret;
        steps[i].adv = ret - steps[i].value;
        all.push(steps[i]);
      }
    }
    const mean = all.reduce((s, r) => s + r.adv, 0) / Math.max(1, all.length);
    const sq = all.reduce((s, r) => s + (r.adv - mean) ** 2, 0) / Math.max(1, all.length);
    const std = Math.sqrt(sq) || 1;
    for (const r of all) r.adv = (r.adv - mean) / std;
  }

  private lossFor(batch: StepRecord[]): tf.Scalar {
    const surr: tf.Scalar[] = [];
    const vloss: tf.Scalar[] = [];
    const ents: tf.Scalar[] = [];
    for (const rec of batch) {
      const { logp, value, entropy } = this.model.evalStep(
        rec.feat, rec.masks, rec.a1, rec.a2);
      const ratio = tf.exp(tf.sub(logp, rec.logp));
      const clipped = tf.clipByValue(ratio, 1 - this.cfg.clip, 1 + this.cfg.clip);
      surr.push(
        tf.minimum(tf.mul(ratio, rec.adv), tf.mul(clipped, rec.adv)) as tf.Scalar);
      vloss.push(tf.square(tf.sub(value, rec.ret)) as tf.Scalar);
      ents.push(entropy);
    }
    const policyLoss = tf.neg(tf.mean(tf.stack(surr)));
    const valueLoss = tf.mean(tf.stack(vloss));
    const entropyBonus = tf.mean(tf.stack(ents));
    return tf.add(
      tf.add(policyLoss, tf.mul(this.cfg.valueCoef, valueLoss)),
      tf.mul(-this.cfg.entropyCoef, entropyBonus),
    ) as tf.Scalar;
  }

  /** One PPO update: collect episodes, then several clipped-surrogate epochs. */
  async update(): Promise<UpdateMetrics> {
    const episodes: StepRecord[][] = [];
    const gains: number[] = [];
    for (let e = 0; e < this.cfg.episodesPerUpdate; e++) {
      const id = (this.updateCount * this.cfg.episodesPerUpdate + e) % this.nInstances;
      const { steps, gain } = await this.collectEpisode(id);
      if (steps.length > 0) episodes.push(steps);
      gains.push(gain);
    }
    this.fillReturnsAndAdvantages(episodes);
    const batch = episodes.flat();
    let lastLoss = 0;
    for (let epoch = 0; epoch < this.cfg.epochs; epoch++) {
      const { value, grads } = tf.variableGrads(
        () => this.lossFor(batch),
        this.model.trainableVariables(),
      );
      this.optimizer.applyGradients(grads);
      lastLoss = value.dataSync()[0];
      value.dispose();
      for (const g of Object.values(grads)) g.dispose();
      if (!Number.isFinite(lastLoss)) throw new Error("non-finite loss");
    }
    this.updateCount += 1;
    return {
      update: this.updateCount,
      episodes: episodes.length,
      meanGain: gains.reduce((s, g) => s + g, 0) / Math.max(1, gains.length),
      meanReturn: batch.reduce((s, r) => s + r.ret, 0) / Math.max(1, batch.length),
      loss: lastLoss,
      steps: batch.length,
    };
  }

  /** Train until the update budget or the wall-clock budget runs out. */
  async train(
    opts: { updates?: number; minutes?: number },
    onMetrics?: (m: UpdateMetrics) => void,
  ): Promise<UpdateMetrics[]> {
    const deadline = opts.minutes ? Date.now() + opts.minutes * 60_000 : Infinity;
    const maxUpdates = opts.updates ?? Infinity;
    const history: UpdateMetrics[] = [];
    while (history.length < maxUpdates && Date.now() < deadline) {
      const metrics = await this.update();
      history.push(metrics);
      onMetrics?.(metrics);
    }
    return history;
  }
}
