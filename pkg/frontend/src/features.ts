/**
 * State-graph featurization: node feature matrices, normalized message
 * passing structures, and action masks derived from the candidate list.
 */

import { StateGraph } from "./bridge";

export interface GraphFeatures {
  kind: StateGraph["kind"];
  nodeCount: number;
  /** node feature rows, [nodeCount x featDim] */
  x: number[][];
  /** row-normalized adjacency (with self loops), [nodeCount x nodeCount] */
  adj: number[][];
  /** reverse-direction adjacency; equals adj for undirected-style kinds */
  adjRev: number[][];
}

export const FEAT_DIM = 6;

function zeros(n: number, m: number): number[][] {
  return Array.from({ length: n }, () => new Array<number>(m).fill(0));
}

function rowNormalize(a: number[][]): number[][] {
  return a.map((row) => {
    const s = row.reduce((acc, v) => acc + v, 0);
    return s > 0 ? row.map((v) => v / s) : row.slice();
  });
}

function withSelfLoops(a: number[][]): number[][] {
  for (let i = 0; i < a.length; i++) a[i][i] = 1;
  return a;
}

/** Featurize one problem state for the encoders. */
export function featurize(state: StateGraph): GraphFeatures {
  const n = state.node_count;
  const x = zeros(n, FEAT_DIM);
  const fwd = zeros(n, n);
  const rev = zeros(n, n);

  if (state.kind === "atsp") {
    // affinity = mean/(mean+d): close cities couple strongly
    const d = zeros(n, n);
    let total = 0;
    for (const [u, v, w] of state.edges) {
      d[u][v] = w;
      total += w;
    }
    const mean = state.edges.length ? total / state.edges.length : 1;
    for (let i = 0; i < n; i++) {
      let outSum = 0;
      let outMin = Infinity;
      let inSum = 0;
      let inMin = Infinity;
      for (let j = 0; j < n; j++) {
        if (i === j) continue;
        outSum += d[i][j];
        outMin = Math.min(outMin, d[i][j]);
        inSum += d[j][i];
        inMin = Math.min(inMin, d[j][i]);
        const aff = mean / (mean + d[i][j]);
        fwd[i][j] = aff;
        rev[j][i] = aff;
      }
      const denom = mean * Math.max(1, n - 1);
      x[i][0] = outSum / denom;
      x[i][1] = n > 1 ? outMin / mean : 0;
      x[i][2] = inSum / denom;
      x[i][3] = n > 1 ? inMin / mean : 0;
      x[i][5] = 1;
    }
  } else if (state.kind === "dag") {
    let meanDur = 0;
    for (const nd of state.nodes) meanDur += nd.duration ?? 0;
    meanDur = n ? meanDur / n : 1;
    const inDeg = new Array(n).fill(0);
    const outDeg = new Array(n).fill(0);
    for (const [u, v] of state.edges) {
      fwd[u][v] = 1;
      rev[v][u] = 1;
      outDeg[u] += 1;
      inDeg[v] += 1;
    }
    const degCap = Math.max(1, ...inDeg, ...outDeg);
    for (let i = 0; i < n; i++) {
      x[i][0] = (state.nodes[i].duration ?? 0) / (meanDur || 1);
      x[i][1] = state.nodes[i].resource ?? 0;
      x[i][2] = outDeg[i] / degCap;
      x[i][3] = inDeg[i] / degCap;
      x[i][5] = 1;
    }
  } else {
    // bipartite coverage: one-hot side markers, weight and color features
    const sets = state.set_count ?? 0;
    let maxW = 0;
    for (const nd of state.nodes) maxW = Math.max(maxW, nd.weight ?? 0);
    const deg = new Array(n).fill(0);
    for (const [u, v] of state.edges) {
      fwd[u][v] = 1;
      rev[v][u] = 1;
      deg[u] += 1;
      deg[v] += 1;
    }
    const degCap = Math.max(1, ...deg);
    for (let i = 0; i < n; i++) {
      const isSet = i < sets;
      x[i][0] = isSet ? 1 : 0;
      x[i][1] = isSet ? 0 : 1;
      x[i][2] = deg[i] / degCap;
      x[i][3] = isSet ? 0 : (state.nodes[i].weight ?? 0) / (maxW || 1);
      x[i][4] = state.nodes[i].color === "white" ? 1 : 0;
      x[i][5] = 1;
    }
  }

  return {
    kind: state.kind,
    nodeCount: n,
    x,
    adj: rowNormalize(withSelfLoops(fwd)),
    adjRev: rowNormalize(withSelfLoops(rev)),
  };
}

/** Candidate (a1, a2) pairs regrouped for two-step node selection. */
export interface ActionMasks {
  /** distinct valid start nodes, ascending */
  validA1: number[];
  /** a1 -> ascending list of valid end nodes */
  a2ByA1: Map<number, number[]>;
}

export function buildMasks(candidates: [number, number][]): ActionMasks {
  const a2ByA1 = new Map<number, number[]>();
  for (const [a1, a2] of candidates) {
    const lst = a2ByA1.get(a1);
    if (lst) lst.push(a2);
    else a2ByA1.set(a1, [a2]);
  }
  const validA1 = [...a2ByA1.keys()].sort((a, b) => a - b);
  for (const lst of a2ByA1.values()) lst.sort((a, b) => a - b);
  return { validA1, a2ByA1 };
}
