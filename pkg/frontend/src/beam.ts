/**
 * Test-time beam evaluation: the bridge runs the iterative edge-manipulation
 * beam search, the policy scores every pending state's candidate actions
 * with joint probabilities. Deterministic for fixed weights.
 */

import { BeamResult, BridgeClient, PendingBeamState } from "./bridge";
import { buildMasks, featurize } from "./features";
import { PolicyModel } from "./model";

export async function evaluateBeam(
  model: PolicyModel,
  bridge: BridgeClient,
  instanceId: number,
  beam: number,
): Promise<BeamResult> {
  const scorer = (st: PendingBeamState): number[] =>
    model.candidateScores(
      featurize(st.state),
      st.candidates,
      buildMasks(st.candidates),
    );
  return bridge.evalBeam(instanceId, beam, scorer);
}

export interface BeamEvaluation {
  perInstance: BeamResult[];
  meanGain: number;
  meanBestCost: number;
}

export async function evaluateBeamOverSplit(
  model: PolicyModel,
  bridge: BridgeClient,
  nInstances: number,
  beam: number,
): Promise<BeamEvaluation> {
  const perInstance: BeamResult[] = [];
  for (let i = 0; i < nInstances; i++) {
    perInstance.push(await evaluateBeam(model, bridge, i, beam));
  }
  const meanGain =
    perInstance.reduce((s, r) => s + r.gain, 0) / Math.max(1, perInstance.length);
  const meanBestCost =
    perInstance.reduce((s, r) => s + r.best_cost, 0) / Math.max(1, perInstance.length);
  return { perInstance, meanGain, meanBestCost };
}
