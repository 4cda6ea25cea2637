import { describe, expect, it } from "vitest";
import { StateGraph } from "../src/bridge";
import { buildMasks, FEAT_DIM, featurize } from "../src/features";

function atspState(d: number[][]): StateGraph {
  const n = d.length;
  const edges: [number, number, number][] = [];
  for (let i = 0; i < n; i++)
    for (let j = 0; j < n; j++)
      if (i !== j) edges.push([i, j, d[i][j]]);
  return {
    format_version: 1,
    kind: "atsp",
    node_count: n,
    set_count: null,
    params: {},
    nodes: Array.from({ length: n }, (_, i) => ({ node: i })),
    edges,
  };
}

describe("featurize", () => {
  it("produces row-stochastic adjacency with self loops", () => {
    const feat = featurize(atspState([
      [0, 2, 8],
      [3, 0, 5],
      [7, 4, 0],
    ]));
    expect(feat.nodeCount).toBe(3);
    expect(feat.x[0]).toHaveLength(FEAT_DIM);
    for (const row of feat.adj) {
      const sum = row.reduce((a, b) => a + b, 0);
      expect(sum).toBeCloseTo(1, 10);
    }
    for (let i = 0; i < 3; i++) expect(feat.adj[i][i]).toBeGreaterThan(0);
  });

  it("featurizes dag states with duration and resource columns", () => {
    const state: StateGraph = {
      format_version: 1,
      kind: "dag",
      node_count: 2,
      set_count: null,
      params: {},
      nodes: [
        { node: 0, duration: 2, resource: 0.5 },
        { node: 1, duration: 4, resource: 0.25 },
      ],
      edges: [[0, 1, 1]],
    };
    const feat = featurize(state);
    expect(feat.x[0][0]).toBeCloseTo(2 / 3);
    expect(feat.x[1][0]).toBeCloseTo(4 / 3);
    expect(feat.x[0][1]).toBe(0.5);
    // reverse stream sees the flipped edge
    expect(feat.adjRev[0][1]).toBe(0);
    expect(feat.adjRev[1][0]).toBeGreaterThan(0);
  });

  it("marks bipartite sides and colors", () => {
    const state: StateGraph = {
      format_version: 1,
      kind: "bipartite_coverage",
      node_count: 3,
      set_count: 1,
      params: { k_white: 1 },
      nodes: [
        { node: 0 },
        { node: 1, weight: 2, color: "black" },
        { node: 2, weight: 0, color: "white" },
      ],
      edges: [[0, 1, 1]],
    };
    const feat = featurize(state);
    expect(feat.x[0][0]).toBe(1); // set side
    expect(feat.x[1][1]).toBe(1); // element side
    expect(feat.x[2][4]).toBe(1); // white marker
    expect(feat.x[1][3]).toBeCloseTo(1); // max-normalized weight
  });
});

describe("buildMasks", () => {
  it("groups candidates by start node, sorted", () => {
    const masks = buildMasks([
      [3, 1],
      [0, 2],
      [3, 0],
      [0, 5],
    ]);
    expect(masks.validA1).toEqual([0, 3]);
    expect(masks.a2ByA1.get(0)).toEqual([2, 5]);
    expect(masks.a2ByA1.get(3)).toEqual([0, 1]);
  });

  it("handles the empty candidate list", () => {
    const masks = buildMasks([]);
    expect(masks.validA1).toEqual([]);
  });
});
