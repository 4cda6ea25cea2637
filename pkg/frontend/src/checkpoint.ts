/**
 * Checkpoint files: model config + weights + the dataset manifest hash, so a
 * checkpoint trained on one data distribution is not silently evaluated on
 * another.
 */

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";
import { ModelConfig, PolicyModel } from "./model";

export interface Checkpoint {
  problem: string;
  solver: string;
  budget: number;
  modelConfig: ModelConfig;
  datasetManifestSha256: string;
  updates: number;
  weights: Record<string, { shape: number[]; data: number[] }>;
}

export function manifestHash(datasetDir: string): string {
  const manifest = fs.readFileSync(path.join(datasetDir, "manifest.json"));
  return crypto.createHash("sha256").update(manifest).digest("hex");
}

export function saveCheckpoint(file: string, ckpt: Checkpoint): void {
  fs.mkdirSync(path.dirname(path.resolve(file)), { recursive: true });
  fs.writeFileSync(file, JSON.stringify(ckpt));
}

export function loadCheckpoint(
  file: string,
  datasetDir?: string,
): { ckpt: Checkpoint; model: PolicyModel } {
  const ckpt = JSON.parse(fs.readFileSync(file, "utf-8")) as Checkpoint;
  if (datasetDir !== undefined) {
    const hash = manifestHash(datasetDir);
    if (hash !== ckpt.datasetManifestSha256) {
      throw new Error(
        `checkpoint was trained on a different dataset (manifest ${ckpt.datasetManifestSha256.slice(0, 12)}..., got ${hash.slice(0, 12)}...)`,
      );
    }
  }
  const model = new PolicyModel(ckpt.modelConfig);
  model.importWeights(ckpt.weights);
  return { ckpt, model };
}
