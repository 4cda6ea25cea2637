/**
 * Actor-critic policy over problem graphs.
 *
 * Encoder: graph convolutions (a single stream for the complete ATSP graph;
 * forward+reverse streams concatenated for DAGs and bipartite coverage),
 * then attention pooling into a graph embedding. The critic reads
 * [maxpool(n) || g]; the actor picks an edge as two sequential node
 * selections, the second conditioned on the first node's embedding. Invalid
 * endpoints are never scored: distributions live on the candidate lists.
 */

import * as tf from "@tensorflow/tfjs";
import { ActionMasks, FEAT_DIM, GraphFeatures } from "./features";

export interface ModelConfig {
  kind: "dag" | "atsp" | "bipartite_coverage";
  hidden: number;
  layers: number;
  seed: number;
}

/** Encoder widths and depths by problem (node dims 64/20/16, layers 5/3/3). */
export function defaultModelConfig(
  problem: string,
  seed = 0,
): ModelConfig {
  if (problem === "dag") return { kind: "dag", hidden: 64, layers: 5, seed };
  if (problem === "atsp") return { kind: "atsp", hidden: 20, layers: 3, seed };
  return { kind: "bipartite_coverage", hidden: 16, layers: 3, seed };
}

/** Deterministic PRNG for reproducible weight init. */
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

export interface Encoded {
  n: tf.Tensor2D; // [nodes, hidden]
  g: tf.Tensor1D; // [hidden]
}

export interface StepEval {
  logp: tf.Scalar;
  value: tf.Scalar;
  entropy: tf.Scalar;
}

let modelCounter = 0;

export class PolicyModel {
  readonly cfg: ModelConfig;
  readonly vars: Map<string, tf.Variable> = new Map();
  /** tfjs registers variable names globally; prefix per instance */
  private readonly ns: string;

  constructor(cfg: ModelConfig) {
    this.cfg = cfg;
    this.ns = `m${modelCounter++}/`;
    const rand = mulberry32(cfg.seed ^ 0x5f3759df);
    const h = cfg.hidden;
    const twoStream = cfg.kind !== "atsp";
    const streamDim = twoStream ? h / 2 : h;
    if (twoStream && h % 2 !== 0) throw new Error("hidden must be even");
    const streams = twoStream ? ["fwd", "rev"] : ["fwd"];
    for (const s of streams) {
      let inDim = FEAT_DIM;
      for (let l = 0; l < cfg.layers; l++) {
        this.dense(rand, `enc_${s}_${l}`, inDim, streamDim);
        inDim = streamDim;
      }
    }
    this.weight(rand, "att_w", [h, 1]);
    this.mlp(rand, "critic", 2 * h, h, 1);
    this.mlp(rand, "actor1", 2 * h, h, 1);
    this.mlp(rand, "actor2", 3 * h, h, 1);
  }

  private weight(rand: () => number, name: string, shape: [number, number]): void {
    const [fanIn, fanOut] = shape;
    const scale = Math.sqrt(2 / (fanIn + fanOut));
    const data = new Float32Array(fanIn * fanOut);
    for (let i = 0; i < data.length; i++) {
      // Box-Muller from the seeded uniform stream
      const u = Math.max(rand(), 1e-12);
      const v = rand();
      data[i] = scale * Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
    }
    this.vars.set(name, tf.variable(tf.tensor2d(data, shape), true, this.ns + name));
  }

  private dense(rand: () => number, name: string, inDim: number, outDim: number): void {
    this.weight(rand, `${name}_W`, [inDim, outDim]);
    this.vars.set(
      `${name}_b`,
      tf.variable(tf.zeros([outDim]), true, this.ns + `${name}_b`),
    );
  }

  private mlp(rand: () => number, name: string, inDim: number, hid: number, outDim: number): void {
    this.dense(rand, `${name}_0`, inDim, hid);
    this.dense(rand, `${name}_1`, hid, hid);
    this.dense(rand, `${name}_2`, hid, outDim);
  }

  private v(name: string): tf.Variable {
    const out = this.vars.get(name);
    if (!out) throw new Error(`unknown variable ${name}`);
    return out;
  }

  private applyDense(name: string, x: tf.Tensor2D): tf.Tensor2D {
    return tf.add(tf.matMul(x, this.v(`${name}_W`)), this.v(`${name}_b`)) as tf.Tensor2D;
  }

  /** Two dense layers with a residual skip, then a linear output layer. */
  private applyMlp(name: string, x: tf.Tensor2D): tf.Tensor2D {
    const h1 = tf.relu(this.applyDense(`${name}_0`, x)) as tf.Tensor2D;
    const h2 = tf.add(tf.relu(this.applyDense(`${name}_1`, h1)), h1) as tf.Tensor2D;
    return this.applyDense(`${name}_2`, h2);
  }

  private encodeStream(stream: string, adj: tf.Tensor2D, x: tf.Tensor2D): tf.Tensor2D {
    let h = x;
    for (let l = 0; l < this.cfg.layers; l++) {
      h = tf.relu(this.applyDense(`enc_${stream}_${l}`, tf.matMul(adj, h))) as tf.Tensor2D;
    }
    return h;
  }

  /** Node embeddings and the attention-pooled graph embedding. */
  encode(feat: GraphFeatures): Encoded {
    const x = tf.tensor2d(feat.x, [feat.nodeCount, FEAT_DIM]);
    const adj = tf.tensor2d(feat.adj);
    let n: tf.Tensor2D;
    if (this.cfg.kind === "atsp") {
      n = this.encodeStream("fwd", adj, x);
    } else {
      const adjRev = tf.tensor2d(feat.adjRev);
      n = tf.concat(
        [this.encodeStream("fwd", adj, x), this.encodeStream("rev", adjRev, x)],
        1,
      ) as tf.Tensor2D;
    }
    const scores = tf.softmax(tf.squeeze(tf.matMul(n, this.v("att_w")), [1]));
    const g = tf.squeeze(tf.matMul(scores.expandDims(0), n), [0]) as tf.Tensor1D;
    return { n, g };
  }

  private withGraph(n: tf.Tensor2D, g: tf.Tensor1D): tf.Tensor2D {
    const rows = n.shape[0];
    return tf.concat([n, g.expandDims(0).tile([rows, 1])], 1) as tf.Tensor2D;
  }

  /** Critic value from max-pooled node features and the graph embedding. */
  value(enc: Encoded): tf.Scalar {
    const pooled = tf.max(enc.n, 0) as tf.Tensor1D;
    const input = tf.concat([pooled, enc.g]).expandDims(0) as tf.Tensor2D;
    return tf.squeeze(this.applyMlp("critic", input)) as tf.Scalar;
  }

  /** Log-probabilities over the valid start nodes. */
  logProbsA1(enc: Encoded, masks: ActionMasks): tf.Tensor1D {
    const logits = tf.squeeze(this.applyMlp("actor1", this.withGraph(enc.n, enc.g)), [1]);
    const valid = tf.gather(logits, tf.tensor1d(masks.validA1, "int32"));
    return tf.logSoftmax(valid) as tf.Tensor1D;
  }

  /** Log-probabilities over the valid end nodes, conditioned on a1. */
  logProbsA2(enc: Encoded, a1: number, validA2: number[]): tf.Tensor1D {
    const rows = enc.n.shape[0];
    const a1Emb = tf.gather(enc.n, tf.tensor1d([a1], "int32"));
    const input = tf.concat(
      [enc.n, a1Emb.tile([rows, 1]), enc.g.expandDims(0).tile([rows, 1])],
      1,
    ) as tf.Tensor2D;
    const logits = tf.squeeze(this.applyMlp("actor2", input), [1]);
    const valid = tf.gather(logits, tf.tensor1d(validA2, "int32"));
    return tf.logSoftmax(valid) as tf.Tensor1D;
  }

  /**
   * Training-path evaluation of one stored step: joint log-prob of the taken
   * action, state value, and the policy entropy (start head plus the taken
   * conditional head).
   */
  evalStep(feat: GraphFeatures, masks: ActionMasks, a1: number, a2: number): StepEval {
    const enc = this.encode(feat);
    const lp1 = this.logProbsA1(enc, masks);
    const i1 = masks.validA1.indexOf(a1);
    const validA2 = masks.a2ByA1.get(a1)!;
    const lp2 = this.logProbsA2(enc, a1, validA2);
    const i2 = validA2.indexOf(a2);
    if (i1 < 0 || i2 < 0) throw new Error("action outside the candidate mask");
    const logp = tf.add(
      tf.gather(lp1, tf.tensor1d([i1], "int32")).squeeze(),
      tf.gather(lp2, tf.tensor1d([i2], "int32")).squeeze(),
    ) as tf.Scalar;
    const ent = (lps: tf.Tensor1D) =>
      tf.neg(tf.sum(tf.mul(tf.exp(lps), lps)));
    const entropy = tf.add(ent(lp1), ent(lp2)) as tf.Scalar;
    return { logp, value: this.value(enc), entropy };
  }

  /** Sampling-path probabilities as plain arrays (no gradients). */
  policyArrays(feat: GraphFeatures, masks: ActionMasks): {
    pA1: Float32Array;
    pA2For: (a1: number) => Float32Array;
    value: number;
  } {
    const head = tf.tidy(() => {
      const enc = this.encode(feat);
      return {
        pA1: tf.exp(this.logProbsA1(enc, masks)).dataSync() as Float32Array,
        value: this.value(enc).dataSync() as Float32Array,
      };
    });
    const pA2For = (a1: number) =>
      tf.tidy(() => {
        const enc = this.encode(feat);
        return tf
          .exp(this.logProbsA2(enc, a1, masks.a2ByA1.get(a1)!))
          .dataSync() as Float32Array;
      });
    return { pA1: head.pA1, pA2For, value: head.value[0] };
  }

  /**
   * Joint probability P(a1) * P(a2|a1) for every candidate pair, in the
   * candidate list's order; used to score beam-search expansions.
   */
  candidateScores(feat: GraphFeatures, candidates: [number, number][], masks: ActionMasks): number[] {
    if (candidates.length === 0) return [];
    return tf.tidy(() => {
      const enc = this.encode(feat);
      const p1 = tf.exp(this.logProbsA1(enc, masks)).dataSync();
      const p1ByNode = new Map<number, number>();
      masks.validA1.forEach((node, i) => p1ByNode.set(node, p1[i]));
      const p2ByPair = new Map<string, number>();
      for (const a1 of masks.validA1) {
        const validA2 = masks.a2ByA1.get(a1)!;
        const p2 = tf.exp(this.logProbsA2(enc, a1, validA2)).dataSync();
        validA2.forEach((a2, i) => p2ByPair.set(`${a1},${a2}`, p2[i]));
      }
      return candidates.map(
        ([a1, a2]) => (p1ByNode.get(a1) ?? 0) * (p2ByPair.get(`${a1},${a2}`) ?? 0),
      );
    });
  }

  trainableVariables(): tf.Variable[] {
    return [...this.vars.values()];
  }

  exportWeights(): Record<string, { shape: number[]; data: number[] }> {
    const out: Record<string, { shape: number[]; data: number[] }> = {};
    for (const [name, variable] of this.vars) {
      out[name] = {
        shape: variable.shape.slice(),
        data: Array.from(variable.dataSync()),
      };
    }
    return out;
  }

  importWeights(weights: Record<string, { shape: number[]; data: number[] }>): void {
    for (const [name, variable] of this.vars) {
      const w = weights[name];
      if (!w) throw new Error(`checkpoint missing variable ${name}`);
      variable.assign(tf.tensor(w.data, w.shape as [number, number]));
    }
  }

  dispose(): void {
    for (const variable of this.vars.values()) variable.dispose();
  }
}
