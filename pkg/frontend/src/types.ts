// Shape of the plot document served at GET /api/plot.

export const SUPPORTED_FORMAT_VERSION = 1;

export interface MetricInfo {
  id: string;
  display_name: string;
  orientation: string;
}

export interface FamilyInfo {
  id: string;
  color: string;
}

export interface MetricCell {
  raw: number | null;
  score: number | null;
  defined: boolean;
}

export interface PlotPoint {
  config_id: number;
  family: string;
  hyperparams: Record<string, string>;
  threshold: number;
  preprocessor: string;
  postprocessor: string;
  exclude_protected: boolean;
  failed: boolean;
  error: string;
  metrics: Record<string, MetricCell>;
}

export interface FrontierEntry {
  metrics: string[];
  config_ids: number[];
}

export interface PlotDocument {
  format_version: number;
  metrics: MetricInfo[];
  families: FamilyInfo[];
  points: PlotPoint[];
  frontiers: FrontierEntry[];
}

export class VersionMismatchError extends Error {
  constructor(public readonly found: unknown) {
    super(
      `plot document format_version ${String(found)} is not supported ` +
        `(expected ${SUPPORTED_FORMAT_VERSION})`,
    );
    this.name = 'VersionMismatchError';
  }
}

export function validateDocument(doc: unknown): PlotDocument {
  if (typeof doc !== 'object' || doc === null) {
    throw new Error('plot document is not an object');
  }
  const candidate = doc as PlotDocument;
  if (candidate.format_version !== SUPPORTED_FORMAT_VERSION) {
    throw new VersionMismatchError(candidate.format_version);
  }
  for (const key of ['metrics', 'families', 'points', 'frontiers'] as const) {
    if (!Array.isArray(candidate[key])) {
      throw new Error(`plot document is missing the ${key} list`);
    }
  }
  return candidate;
}
